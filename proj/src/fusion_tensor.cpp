#include "starspec/fusion_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "starspec/errors.hpp"

namespace starspec {

FusionTensor::FusionTensor(SpectrumPtr spectrum, FusionMetadata meta,
                           std::vector<std::vector<FusionEntry>> rows, std::vector<std::uint8_t> leaks)
    : spectrum_(std::move(spectrum)), meta_(std::move(meta)), n_(spectrum_->size()), leaks_(std::move(leaks)) {
  const std::size_t pairs = n_ * n_;
  if (rows.size() != pairs || leaks_.size() != pairs) throw InvalidArgument("fusion tensor row count mismatch");

  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  if (total > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("fusion tensor too large");

  pair_offsets_.resize(pairs + 1);
  entries_.reserve(total);
  std::vector<std::uint32_t> out_counts(n_ + 1, 0);
  for (std::size_t p = 0; p < pairs; ++p) {
    pair_offsets_[p] = static_cast<std::uint32_t>(entries_.size());
    auto& r = rows[p];
    std::sort(r.begin(), r.end(), [](const FusionEntry& x, const FusionEntry& y) { return x.out < y.out; });
    for (const auto& e : r) {
      if (e.out >= n_) throw InvalidArgument("fusion channel outside spectrum");
      entries_.push_back(e);
      ++out_counts[e.out + 1];
    }
  }
  pair_offsets_[pairs] = static_cast<std::uint32_t>(entries_.size());

  out_offsets_.assign(n_ + 1, 0);
  for (std::size_t c = 0; c < n_; ++c) out_offsets_[c + 1] = out_offsets_[c] + out_counts[c + 1];
  by_output_.resize(entries_.size());
  std::vector<std::uint32_t> cursor(out_offsets_.begin(), out_offsets_.end() - 1);
  // pairs are visited in (a, b) order, so each column comes out sorted
  for (std::size_t p = 0; p < pairs; ++p) {
    const auto a = static_cast<LabelId>(p / n_);
    const auto b = static_cast<LabelId>(p % n_);
    for (std::uint32_t k = pair_offsets_[p]; k < pair_offsets_[p + 1]; ++k) {
      const auto& e = entries_[k];
      by_output_[cursor[e.out]++] = FusionTriple{a, b, e.value};
    }
  }
}

std::span<const FusionEntry> FusionTensor::channels(LabelId a, LabelId b) const {
  const auto p = pair_index(a, b);
  return {entries_.data() + pair_offsets_[p], entries_.data() + pair_offsets_[p + 1]};
}

std::size_t FusionTensor::leaky_pairs() const {
  return static_cast<std::size_t>(std::count(leaks_.begin(), leaks_.end(), std::uint8_t{1}));
}

std::span<const FusionTriple> FusionTensor::incoming(LabelId c) const {
  return {by_output_.data() + out_offsets_[c], by_output_.data() + out_offsets_[c + 1]};
}

Complex FusionTensor::coefficient(LabelId a, LabelId b, LabelId c) const {
  auto ch = channels(a, b);
  auto it = std::lower_bound(ch.begin(), ch.end(), c, [](const FusionEntry& e, LabelId x) { return e.out < x; });
  return (it != ch.end() && it->out == c) ? it->value : Complex{};
}

double FusionTensor::hermitian_defect() const {
  double worst = 0.0;
  for (LabelId a = 0; a < n_; ++a) {
    for (LabelId b = 0; b < n_; ++b) {
      for (const auto& e : channels(a, b)) {
        worst = std::max(worst, std::abs(std::conj(e.value) - coefficient(b, a, e.out)));
      }
    }
  }
  return worst;
}

}  // namespace starspec
