#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace radctl {

inline constexpr std::size_t kDefaultRegionCount = 36;
inline constexpr std::size_t kDefaultFindingCount = 71;
inline constexpr std::size_t kLabelerFindingCount = 14;
inline constexpr std::size_t kDefaultTokenDim = 1024;

/// Index of a region in a RegionVocabulary.
struct RegionId {
  std::uint16_t value = 0;

  friend auto operator<=>(const RegionId&, const RegionId&) = default;
};

using RegionSet = std::set<RegionId>;

/// Ordered list of unique identifiers.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Throws InvalidSpec on empty input, duplicate or blank names.
  explicit Vocabulary(std::vector<std::string> names);

  /// One identifier per line; blank lines and lines starting with '#' are skipped.
  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  std::optional<std::size_t> find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name).has_value(); }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

class RegionVocabulary : public Vocabulary {
 public:
  using Vocabulary::Vocabulary;
  RegionVocabulary(Vocabulary v) : Vocabulary(std::move(v)) {}

  /// Throws UnknownRegion.
  RegionId id(const std::string& name) const;
  const std::string& name(RegionId id) const { return Vocabulary::name(id.value); }
  using Vocabulary::name;

  RegionSet ids(const std::vector<std::string>& names) const;
  std::vector<std::string> names_of(const RegionSet& regions) const;
  RegionSet all() const;
};

using FindingVocabulary = Vocabulary;

/// The 36 anatomical regions of the Chest ImaGenome scene graphs.
const RegionVocabulary& default_region_vocabulary();
/// The 71 detector findings.
const FindingVocabulary& default_finding_vocabulary();
/// The 14 observations produced by CheXpert-style labelers.
const FindingVocabulary& default_labeler_vocabulary();

}  // namespace radctl
