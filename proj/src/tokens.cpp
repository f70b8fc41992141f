#include "radctl/tokens.hpp"

#include <algorithm>

#include "radctl/error.hpp"

namespace radctl {

AnatomicalTokenSet::AnatomicalTokenSet(std::size_t region_count, std::size_t dim)
    : dim_(dim), present_(region_count, 0), values_(region_count * dim, 0.0) {}

std::span<const double> AnatomicalTokenSet::vector(RegionId r) const {
  if (r.value >= present_.size()) fail(ErrorCode::UnknownRegion, "region index " + std::to_string(r.value));
  return std::span<const double>(values_).subspan(r.value * dim_, dim_);
}

void AnatomicalTokenSet::set(RegionId r, std::span<const double> values) {
  if (r.value >= present_.size()) fail(ErrorCode::UnknownRegion, "region index " + std::to_string(r.value));
  if (values.size() != dim_)
    fail(ErrorCode::ShapeMismatch,
         "token length " + std::to_string(values.size()) + " != " + std::to_string(dim_));
  std::copy(values.begin(), values.end(), values_.begin() + static_cast<std::ptrdiff_t>(r.value * dim_));
  present_[r.value] = 1;
}

void AnatomicalTokenSet::clear(RegionId r) {
  if (r.value >= present_.size()) fail(ErrorCode::UnknownRegion, "region index " + std::to_string(r.value));
  auto first = values_.begin() + static_cast<std::ptrdiff_t>(r.value * dim_);
  std::fill(first, first + static_cast<std::ptrdiff_t>(dim_), 0.0);
  present_[r.value] = 0;
}

std::size_t AnatomicalTokenSet::present_count() const noexcept {
  return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), std::uint8_t{1}));
}

void TokenStore::insert(ScanKey key, AnatomicalTokenSet tokens) {
  sets_[std::move(key)] = std::make_shared<const AnatomicalTokenSet>(std::move(tokens));
}

std::shared_ptr<const AnatomicalTokenSet> TokenStore::find(const ScanKey& key) const {
  auto it = sets_.find(key);
  return it == sets_.end() ? nullptr : it->second;
}

}  // namespace radctl
