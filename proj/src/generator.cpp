#include "radctl/generator.hpp"

#include "radctl/error.hpp"

namespace radctl {

TemplateGenerator::TemplateGenerator(const RegionVocabulary& vocab)
    : TemplateGenerator(vocab, default_templates(vocab)) {}

TemplateGenerator::TemplateGenerator(const RegionVocabulary& vocab, std::vector<RegionTemplate> templates)
    : vocab_(&vocab), templates_(std::move(templates)) {}

std::vector<RegionTemplate> TemplateGenerator::default_templates(const RegionVocabulary& vocab) {
  const std::vector<std::pair<std::vector<std::string>, std::string>> table = {
      {{"left lung", "right lung"}, "The lungs are clear."},
      {{"left clavicle", "right clavicle"}, "The clavicles are intact."},
      {{"left costophrenic angle", "right costophrenic angle"}, "The costophrenic angles are sharp."},
      {{"left hilar structures", "right hilar structures"}, "The hila are unremarkable."},
      {{"left hemidiaphragm", "right hemidiaphragm"}, "The hemidiaphragms are normal in position."},
      {{"cardiac silhouette"}, "The cardiac silhouette is normal in size."},
      {{"abdomen"}, "The visualized upper abdomen is unremarkable."},
      {{"spine"}, "No acute osseous abnormality of the spine."},
      {{"trachea"}, "The trachea is midline."},
  };
  std::vector<RegionTemplate> out;
  for (const auto& [names, sentence] : table) {
    RegionTemplate t;
    for (const auto& n : names)
      if (auto idx = vocab.find(n)) t.regions.insert(RegionId{static_cast<std::uint16_t>(*idx)});
    if (t.regions.size() == names.size()) {
      t.sentence = sentence;
      out.push_back(std::move(t));
    }
  }
  return out;
}

std::string TemplateGenerator::generate_for(const RegionSet& unmasked) const {
  std::string out;
  RegionSet covered;
  auto emit = [&](const std::string& sentence) {
    if (!out.empty()) out.push_back(' ');
    out += sentence;
  };
  for (RegionId r : unmasked) {
    if (covered.contains(r)) continue;
    const RegionTemplate* group = nullptr;
    for (const auto& t : templates_)
      if (t.regions.contains(r)) {
        group = &t;
        break;
      }
    if (group) {
      covered.insert(group->regions.begin(), group->regions.end());
      emit(group->sentence);
    } else {
      covered.insert(r);
      emit("The " + vocab_->name(r) + " is unremarkable.");
    }
  }
  return out;
}

std::string TemplateGenerator::generate(const MultimodalSequence& sequence) {
  RegionSet unmasked;
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (sequence.segments[i] != Segment::Vision || sequence.masked[i] || !sequence.regions[i]) continue;
    if (sequence.regions[i]->value >= vocab_->size())
      fail(ErrorCode::UnknownRegion, "region index " + std::to_string(sequence.regions[i]->value));
    unmasked.insert(*sequence.regions[i]);
  }
  return generate_for(unmasked);
}

std::string generate_report(const MultimodalSequence& sequence, ReportGenerator& generator,
                            const std::string& context) {
  try {
    return generator.generate(sequence);
  } catch (const std::exception& e) {
    std::string msg = "generator '" + generator.name() + "'";
    if (!context.empty()) msg += " on " + context;
    fail(ErrorCode::GeneratorFailure, msg + ": " + e.what());
  }
}

}  // namespace radctl
