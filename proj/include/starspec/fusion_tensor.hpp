#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "starspec/spectrum.hpp"

namespace starspec {

/// Serial reference or OpenMP parallel kernel.
enum class Execution { serial, parallel };

struct FusionEntry {
  LabelId out;
  Complex value;
};

struct FusionTriple {
  LabelId left;
  LabelId right;
  Complex value;
};

struct FusionMetadata {
  std::string backend_id;  // e.g. "torus:d=2:N=6:a=1,1"
  int truncation = 0;      // max label degree
  double drop_tol = 0.0;
};

/// Sparse structure constants C^c_{ab} = <phi_a phi_b, phi_c>.
///
/// Stored twice: rows keyed by the input pair (a, b), and columns keyed by the
/// output channel c. Every pair also carries a leakage flag that is set when
/// the product phi_a phi_b has a nonzero component outside the truncation.
class FusionTensor {
 public:
  /// rows[a * n + b] are the in-truncation channels of pair (a, b), sorted by out.
  FusionTensor(SpectrumPtr spectrum, FusionMetadata meta,
               std::vector<std::vector<FusionEntry>> rows, std::vector<std::uint8_t> leaks);

  const Spectrum& spectrum() const { return *spectrum_; }
  const SpectrumPtr& spectrum_ptr() const { return spectrum_; }
  const FusionMetadata& metadata() const { return meta_; }

  std::span<const FusionEntry> channels(LabelId a, LabelId b) const;
  bool leaks(LabelId a, LabelId b) const { return leaks_[pair_index(a, b)] != 0; }
  std::size_t leaky_pairs() const;

  /// All (a, b, C) feeding output channel c, sorted by (a, b).
  std::span<const FusionTriple> incoming(LabelId c) const;

  Complex coefficient(LabelId a, LabelId b, LabelId c) const;

  std::size_t nnz() const { return entries_.size(); }
  std::size_t labels() const { return n_; }

  /// max |conj(C^c_{ab}) - C^c_{ba}| over stored entries.
  double hermitian_defect() const;

 private:
  std::size_t pair_index(LabelId a, LabelId b) const { return static_cast<std::size_t>(a) * n_ + b; }

  SpectrumPtr spectrum_;
  FusionMetadata meta_;
  std::size_t n_;
  std::vector<std::uint32_t> pair_offsets_;  // size n^2 + 1
  std::vector<FusionEntry> entries_;
  std::vector<std::uint8_t> leaks_;
  std::vector<std::uint32_t> out_offsets_;  // size n + 1
  std::vector<FusionTriple> by_output_;
};

}  // namespace starspec
