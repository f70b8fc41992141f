#pragma once

#include <string>
#include <vector>

#include "radctl/fusion.hpp"
#include "radctl/vocabulary.hpp"

namespace radctl {

/// Seam for a report generator consuming an assembled multimodal sequence.
class ReportGenerator {
 public:
  virtual ~ReportGenerator() = default;
  virtual std::string name() const = 0;
  virtual std::string generate(const MultimodalSequence& sequence) = 0;
};

/// A canned sentence for a group of regions that are reported together.
struct RegionTemplate {
  RegionSet regions;
  std::string sentence;
};

/// Reference generator: no model, one canned normal-finding sentence per
/// unmasked region group. Groups come from the template table; a region not
/// in any group yields "The <region> is unremarkable.". Sentences follow the
/// vocabulary order of each group's first unmasked region.
class TemplateGenerator final : public ReportGenerator {
 public:
  explicit TemplateGenerator(const RegionVocabulary& vocab = default_region_vocabulary());
  TemplateGenerator(const RegionVocabulary& vocab, std::vector<RegionTemplate> templates);

  std::string name() const override { return "template"; }
  std::string generate(const MultimodalSequence& sequence) override;

  /// Generates directly from a set of unmasked regions.
  std::string generate_for(const RegionSet& unmasked) const;

  static std::vector<RegionTemplate> default_templates(const RegionVocabulary& vocab);

 private:
  const RegionVocabulary* vocab_;
  std::vector<RegionTemplate> templates_;
};

/// Runs the generator, wrapping any failure as GeneratorFailure with the
/// generator name and `context`.
std::string generate_report(const MultimodalSequence& sequence, ReportGenerator& generator,
                            const std::string& context = {});

}  // namespace radctl
