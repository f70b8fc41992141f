#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "radctl/vocabulary.hpp"

namespace radctl {

/// Per-region anatomical feature vectors of one scan, in vocabulary order.
/// Undetected regions hold the exact all-zeros vector and present() == false.
class AnatomicalTokenSet {
 public:
  AnatomicalTokenSet() = default;
  AnatomicalTokenSet(std::size_t region_count, std::size_t dim);

  std::size_t region_count() const noexcept { return present_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  bool present(RegionId r) const { return present_.at(r.value) != 0; }
  std::span<const double> vector(RegionId r) const;

  /// Marks the region detected. Throws ShapeMismatch on wrong length.
  void set(RegionId r, std::span<const double> values);
  /// Marks the region undetected and zeroes its vector.
  void clear(RegionId r);

  std::size_t present_count() const noexcept;

  friend bool operator==(const AnatomicalTokenSet&, const AnatomicalTokenSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint8_t> present_;
  std::vector<double> values_;
};

struct ScanKey {
  std::string study_id;
  std::string scan_id;

  friend auto operator<=>(const ScanKey&, const ScanKey&) = default;
};

/// Read-only lookup of token sets by (study, scan) after loading.
class TokenStore {
 public:
  void insert(ScanKey key, AnatomicalTokenSet tokens);
  std::shared_ptr<const AnatomicalTokenSet> find(const ScanKey& key) const;
  std::size_t size() const noexcept { return sets_.size(); }

  const std::map<ScanKey, std::shared_ptr<const AnatomicalTokenSet>>& entries() const noexcept { return sets_; }

 private:
  std::map<ScanKey, std::shared_ptr<const AnatomicalTokenSet>> sets_;
};

}  // namespace radctl
