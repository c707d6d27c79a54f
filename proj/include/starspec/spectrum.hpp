#pragma once

#include <array>
#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace starspec {

using Complex = std::complex<double>;
using LabelId = std::uint32_t;

enum class BasisKind { torus, sphere, su2 };

std::string to_string(BasisKind kind);

/// Index of one eigenfunction.
///
/// Torus labels hold the frequency vector n. Sphere labels hold (l, m).
/// SU(2) labels hold (2l, 2m, 2n) so that half-integer spins stay integral.
struct Label {
  static constexpr std::size_t max_rank = 4;

  std::array<int, max_rank> v{};
  std::uint8_t rank = 0;

  Label() = default;
  Label(std::initializer_list<int> values);

  int operator[](std::size_t i) const { return v[i]; }
  std::span<const int> values() const { return {v.data(), rank}; }

  friend bool operator==(const Label&, const Label&) = default;
  friend std::strong_ordering operator<=>(const Label& a, const Label& b);
};

struct LabelHash {
  std::size_t operator()(const Label& l) const noexcept;
};

/// Human-readable label text, e.g. "(1,-2)" or "(1/2,-1/2,1/2)" for SU(2).
std::string format_label(BasisKind kind, const Label& label);
Label parse_label(BasisKind kind, const std::string& text);

/// Ordered eigenbasis index set with eigenvalues and complex-conjugation data.
///
/// conj(phi_a) = conj_factor(a) * phi_{conj_partner(a)}. The partner map is an
/// involution preserving eigenvalues; factors are unimodular. Each label also
/// carries an integer degree (torus: sup-norm of n; sphere: l; su2: 2l) which
/// is subadditive under fusion; the truncation is degree <= max_degree.
class Spectrum {
 public:
  struct Entry {
    Label label;
    double eigenvalue = 0.0;
    int degree = 0;
    Label conj_label;
    Complex conj_factor{1.0, 0.0};
  };

  Spectrum(BasisKind kind, int max_degree, std::vector<Entry> entries);

  BasisKind kind() const { return kind_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return labels_.size(); }

  const Label& label(LabelId id) const { return labels_[id]; }
  double eigenvalue(LabelId id) const { return eigenvalues_[id]; }
  int degree(LabelId id) const { return degrees_[id]; }
  LabelId conj_partner(LabelId id) const { return conj_partner_[id]; }
  Complex conj_factor(LabelId id) const { return conj_factor_[id]; }

  std::span<const Label> labels() const { return labels_; }
  std::span<const double> eigenvalues() const { return eigenvalues_; }

  std::optional<LabelId> find(const Label& label) const;
  LabelId index_of(const Label& label) const;  // throws if absent

  /// Ids with degree <= bound, in label order.
  std::vector<LabelId> ids_up_to_degree(int bound) const;

  /// True when both spectra index the same labels in the same order.
  bool same_labels(const Spectrum& other) const;

  std::string describe(LabelId id) const { return format_label(kind_, labels_[id]); }

 private:
  BasisKind kind_;
  int max_degree_;
  std::vector<Label> labels_;
  std::vector<double> eigenvalues_;
  std::vector<int> degrees_;
  std::vector<LabelId> conj_partner_;
  std::vector<Complex> conj_factor_;
  std::unordered_map<Label, LabelId, LabelHash> lookup_;
};

using SpectrumPtr = std::shared_ptr<const Spectrum>;

/// Sparse spectral coefficient vector. Absent keys are zero.
class CoeffVec {
 public:
  using Storage = std::map<LabelId, Complex>;

  explicit CoeffVec(SpectrumPtr spectrum);

  const Spectrum& spectrum() const { return *spectrum_; }
  const SpectrumPtr& spectrum_ptr() const { return spectrum_; }

  Complex operator[](LabelId id) const;
  Complex at(const Label& label) const;

  void set(LabelId id, Complex value);
  void set(const Label& label, Complex value) { set(spectrum_->index_of(label), value); }
  void add(LabelId id, Complex value);

  const Storage& entries() const { return entries_; }
  std::size_t nonzeros() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int max_degree() const;  // -1 for the zero vector

  std::vector<Complex> dense() const;
  static CoeffVec from_dense(SpectrumPtr spectrum, std::span<const Complex> values);

  /// Same coefficients viewed in another spectrum with identical labels.
  CoeffVec rebind(SpectrumPtr spectrum) const;

  /// Removes entries with |c| <= tol.
  CoeffVec pruned(double tol) const;

  CoeffVec& operator+=(const CoeffVec& other);
  CoeffVec& operator-=(const CoeffVec& other);
  CoeffVec& operator*=(Complex scale);

  friend CoeffVec operator+(CoeffVec a, const CoeffVec& b) { return a += b; }
  friend CoeffVec operator-(CoeffVec a, const CoeffVec& b) { return a -= b; }
  friend CoeffVec operator*(Complex s, CoeffVec a) { return a *= s; }

  static CoeffVec unit(SpectrumPtr spectrum, LabelId id, Complex value = 1.0);

 private:
  void require_same_spectrum(const CoeffVec& other) const;

  SpectrumPtr spectrum_;
  Storage entries_;
};

struct SobolevParams {
  double order = 0.0;
};

/// sqrt(sum_a (1 + lambda_a)^s |f_a|^2).
double hs_norm(const CoeffVec& f, SobolevParams s = {});

/// Largest coefficient magnitude.
double max_abs(const CoeffVec& f);

/// Coefficients of the pointwise complex conjugate.
CoeffVec involution(const CoeffVec& f);

/// Dyadic block index of an eigenvalue: the j with 2^j <= 1 + lambda < 2^{j+1}.
int dyadic_block(double eigenvalue);

/// Sharp dyadic spectral projection onto block j.
CoeffVec dyadic_project(const CoeffVec& f, int j);

/// Deterministic random coefficients with |f_a| ~ (1 + lambda_a)^{-decay}.
///
/// Real and imaginary parts are uniform in [-1, 1] before scaling; the stream
/// is mt19937_64 consumed in label order, so output is platform independent.
/// A non-negative max_degree restricts the support to degree <= max_degree.
CoeffVec random_coeff_vec(SpectrumPtr spectrum, std::uint64_t seed, double decay,
                          int max_degree = -1);

/// Portable uniform double in [0, 1) from a 64-bit generator output.
double unit_interval(std::uint64_t bits);

}  // namespace starspec
