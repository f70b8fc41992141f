#include "radctl/vocabulary.hpp"

#include <fstream>

#include "radctl/error.hpp"

namespace radctl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) fail(ErrorCode::InvalidSpec, "vocabulary is empty");
  index_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) fail(ErrorCode::InvalidSpec, "blank vocabulary entry at " + std::to_string(i));
    if (!index_.emplace(names_[i], i).second)
      fail(ErrorCode::InvalidSpec, "duplicate vocabulary entry '" + names_[i] + "'");
  }
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open vocabulary file " + path.string());
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    names.push_back(line);
  }
  return Vocabulary(std::move(names));
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write vocabulary file " + path.string());
  for (const auto& n : names_) out << n << '\n';
}

std::optional<std::size_t> Vocabulary::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

RegionId RegionVocabulary::id(const std::string& name) const {
  auto idx = find(name);
  if (!idx) fail(ErrorCode::UnknownRegion, "'" + name + "'");
  return RegionId{static_cast<std::uint16_t>(*idx)};
}

RegionSet RegionVocabulary::ids(const std::vector<std::string>& names) const {
  RegionSet out;
  for (const auto& n : names) out.insert(id(n));
  return out;
}

std::vector<std::string> RegionVocabulary::names_of(const RegionSet& regions) const {
  std::vector<std::string> out;
  out.reserve(regions.size());
  for (RegionId r : regions) out.push_back(name(r));
  return out;
}

RegionSet RegionVocabulary::all() const {
  RegionSet out;
  for (std::size_t i = 0; i < size(); ++i) out.insert(RegionId{static_cast<std::uint16_t>(i)});
  return out;
}

const RegionVocabulary& default_region_vocabulary() {
  static const RegionVocabulary vocab(std::vector<std::string>{
      "abdomen",
      "aortic arch",
      "cardiac silhouette",
      "carina",
      "cavoatrial junction",
      "descending aorta",
      "left apical zone",
      "left cardiac silhouette",
      "left cardiophrenic angle",
      "left clavicle",
      "left costophrenic angle",
      "left hemidiaphragm",
      "left hilar structures",
      "left lower lung zone",
      "left lung",
      "left mid lung zone",
      "left upper abdomen",
      "left upper lung zone",
      "mediastinum",
      "right apical zone",
      "right atrium",
      "right cardiac silhouette",
      "right cardiophrenic angle",
      "right clavicle",
      "right costophrenic angle",
      "right hemidiaphragm",
      "right hilar structures",
      "right lower lung zone",
      "right lung",
      "right mid lung zone",
      "right upper abdomen",
      "right upper lung zone",
      "spine",
      "svc",
      "trachea",
      "upper mediastinum",
  });
  return vocab;
}

const FindingVocabulary& default_finding_vocabulary() {
  static const FindingVocabulary vocab(std::vector<std::string>{
      "airspace opacity",
      "alveolar hemorrhage",
      "aortic graft/repair",
      "artifact",
      "aspiration",
      "atelectasis",
      "bone lesion",
      "breast/nipple shadows",
      "bronchiectasis",
      "cabg grafts",
      "calcified nodule",
      "cardiac pacer and wires",
      "chest port",
      "chest tube",
      "clavicle fracture",
      "consolidation",
      "copd/emphysema",
      "costophrenic angle blunting",
      "cyst/bullae",
      "diaphragmatic eventration (benign)",
      "elevated hemidiaphragm",
      "endotracheal tube",
      "enlarged cardiac silhouette",
      "enlarged hilum",
      "enteric tube",
      "fluid overload/heart failure",
      "goiter",
      "granulomatous disease",
      "hernia",
      "hydropneumothorax",
      "hyperaeration",
      "ij line",
      "increased reticular markings/ild pattern",
      "infiltration",
      "interstitial lung disease",
      "intra-aortic balloon pump",
      "linear/patchy atelectasis",
      "lobar/segmental collapse",
      "low lung volumes",
      "lung cancer",
      "lung lesion",
      "lung opacity",
      "mass/nodule (not otherwise specified)",
      "mediastinal displacement",
      "mediastinal drain",
      "mediastinal widening",
      "multiple masses/nodules",
      "pericardial effusion",
      "picc",
      "pigtail catheter",
      "pleural effusion",
      "pleural/parenchymal scarring",
      "pneumomediastinum",
      "pneumonia",
      "pneumothorax",
      "prosthetic valve",
      "pulmonary edema/hazy opacity",
      "rotated",
      "scoliosis",
      "shoulder osteoarthritis",
      "spinal degenerative changes",
      "spinal fracture",
      "sub-diaphragmatic air",
      "subclavian line",
      "superior mediastinal mass/enlargement",
      "swan-ganz catheter",
      "tortuous aorta",
      "tracheostomy tube",
      "vascular calcification",
      "vascular congestion",
      "vascular redistribution",
  });
  return vocab;
}

const FindingVocabulary& default_labeler_vocabulary() {
  static const FindingVocabulary vocab(std::vector<std::string>{
      "enlarged_cardiomediastinum",
      "cardiomegaly",
      "lung_opacity",
      "lung_lesion",
      "edema",
      "consolidation",
      "pneumonia",
      "atelectasis",
      "pneumothorax",
      "pleural_effusion",
      "pleural_other",
      "fracture",
      "support_devices",
      "no_finding",
  });
  return vocab;
}

}  // namespace radctl
