#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "starspec/bases.hpp"
#include "starspec/fusion_tensor.hpp"
#include "starspec/spectrum.hpp"

namespace starspec {

/// Real skew-symmetric d x d matrix, row-major.
struct SkewMatrix {
  int dim = 0;
  std::vector<double> entries;

  SkewMatrix() = default;
  SkewMatrix(int d, std::vector<double> values);  // throws unless J + J^T = 0
  /// 2x2 matrix [[0, j12], [-j12, 0]].
  static SkewMatrix planar(double j12);

  double operator()(int i, int j) const { return entries[static_cast<std::size_t>(i * dim + j)]; }
  SkewMatrix scaled(double s) const;
  /// x . J y
  double form(const Label& x, const Label& y) const;
};

enum class WeightFamily {
  constant_one,
  eigenvalue_phase,
  torus_triphase,
  bicharacter,
  su2_phase,
  random_phase,
  perturbed,
  product,
  conjugate,
};

/// Unit-modulus weight on label triples. Cheap to copy; immutable.
///
/// Families are total functions of (a, b, c); only admissible triples matter.
class Weight {
 public:
  struct Node;

  /// omega(a, b, c); throws PreconditionError when |omega| deviates from 1.
  Complex operator()(const Spectrum& s, LabelId a, LabelId b, LabelId c) const;
  /// omega without the unimodularity guard, for diagnostics.
  Complex raw(const Spectrum& s, LabelId a, LabelId b, LabelId c) const;

  WeightFamily family() const;
  /// Whether the family asserts conj omega(a,b,c) = omega(b,a,c).
  bool claims_hermitian() const;
  /// Canonical spec string; parse_weight(describe()) rebuilds the weight.
  std::string describe() const;
  /// Throws InvalidArgument when the family does not apply to the spectrum.
  void validate_for(const Spectrum& s) const;
  /// r such that d omega / dt = i r (dl_a + dl_b - dl_c) omega when the
  /// eigenvalues move; 0 for eigenvalue-independent families, empty when the
  /// weight depends on eigenvalues in another way.
  std::optional<double> eigenvalue_rate() const;

  static Weight one();
  /// exp(i c (lambda_a + lambda_b - lambda_c)).
  static Weight eigenvalue_phase(double c);
  /// exp(pi i [a.Jb + b.Jc + c.Ja]) on torus labels.
  static Weight torus_triphase(SkewMatrix j);
  /// Triphase with J = -Theta, so that U_j * U_k = e^{2 pi i Theta_jk} U_k * U_j.
  static Weight nc_torus(SkewMatrix theta);
  /// sigma(a, b) = e^{-pi i a.Jb}, defined only when c = a + b.
  static Weight bicharacter(SkewMatrix j);
  /// exp(-pi i [m1(n2-n3) + m2(n3-n1) + m3(n1-n2)]) on SU(2) labels.
  static Weight su2_phase();
  /// exp(i pi r(a,b,c)) with r a hash of the label values in [-1, 1].
  static Weight random_phase(std::uint64_t seed);
  /// w * exp(i eps r(a,b,c)).
  static Weight perturbed(Weight base, double eps, std::uint64_t seed);

  friend Weight weight_mul(const Weight& w1, const Weight& w2);
  friend Weight weight_inv(const Weight& w);

 private:
  explicit Weight(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Weight weight_mul(const Weight& w1, const Weight& w2);
Weight weight_inv(const Weight& w);

/// Parses e.g. "one", "eigenphase:c=1.0", "triphase:J=[[0,0.3],[-0.3,0]]",
/// "triphase:J=0.3", "nctorus:Theta=0.25", "bicharacter:J=0.3", "su2phase",
/// "random:seed=7", "perturbed:eps=0.01,seed=3,base=<spec>", "conj:<spec>",
/// "product:<spec>*<spec>".
Weight parse_weight(const std::string& text);

/// "0.3" (planar) or a JSON nested array.
SkewMatrix parse_skew_matrix(const std::string& text);

/// Deterministic hash value in [-1, 1] of a label triple.
double triple_hash(const Spectrum& s, LabelId a, LabelId b, LabelId c, std::uint64_t seed);

struct WeightDiagnostics {
  double unimodularity_defect = 0.0;
  double hermitian_defect = 0.0;
  double square_defect = 0.0;
  double summed_defect = 0.0;
  double log_lipschitz = 0.0;
  /// max over quadruples of sum |C C| on both sides (square-to-summed bound).
  double path_mass = 0.0;
  std::size_t triples = 0;
  std::size_t squares = 0;
  std::size_t quadruples = 0;
  std::size_t excluded = 0;
};

inline constexpr double kPassThreshold = 1e-10;
inline constexpr double kFailThreshold = 1e-6;

/// Unimodularity and Hermitian-symmetry defects over all stored triples.
WeightDiagnostics check_admissible(const Weight& w, const FusionTensor& t);

/// Channelwise cocycle identity over all admissible squares whose paths stay
/// inside the truncation. Input triples touching a leaky pair are excluded.
WeightDiagnostics check_square_cocycle(const Weight& w, const FusionTensor& t);

/// Summed (associativity) form of the cocycle identity on leakage-free quadruples.
WeightDiagnostics check_summed_cocycle(const Weight& w, const FusionTensor& t);

/// Sampled admissible triples (a, b, c), deterministic in the seed.
std::vector<std::array<LabelId, 3>> sample_admissible_triples(const FusionTensor& t, std::size_t count,
                                                             std::uint64_t seed);

/// Lower bound on the log-Lipschitz constant from sampled triple pairs.
WeightDiagnostics estimate_log_lipschitz(const Weight& w, const FusionTensor& t, std::size_t sample_count,
                                         std::uint64_t seed = 1);

/// Unimodular label function chi.
class GaugeCharacter {
 public:
  using Fn = std::function<Complex(const Spectrum&, LabelId)>;
  using Phase = std::function<double(const Spectrum&, LabelId)>;

  GaugeCharacter(std::string name, Fn fn);

  static GaugeCharacter trivial();
  /// chi(n) = e^{i theta.n}.
  static GaugeCharacter torus(std::vector<double> theta);
  /// chi(l, m) = e^{i m phi0} on the sphere.
  static GaugeCharacter azimuthal(double phi0);
  /// chi(l, m, n) = e^{i (m a + n b)} on SU(2), with half-integer m, n.
  static GaugeCharacter su2_torus(double a, double b);
  /// chi = e^{i t theta(alpha)}.
  static GaugeCharacter exponential(Phase theta, double t, std::string name = "exp");

  /// Enforces |chi| = 1.
  Complex operator()(const Spectrum& s, LabelId id) const;
  const std::string& name() const { return name_; }

  friend GaugeCharacter operator*(const GaugeCharacter& x, const GaugeCharacter& y);

 private:
  std::string name_;
  Fn fn_;
};

/// max |chi(a) chi(b) - chi(c)| over stored triples.
double check_gauge_cocycle(const GaugeCharacter& chi, const FusionTensor& t);

/// Equivariance defect of w under h. Label-permuting actions compare
/// omega(h.a, h.b, h.c) with omega(a, b, c) directly; mixing actions compare
/// U(phi_a * phi_b) with U phi_a * U phi_b over leakage-free basis pairs.
double check_equivariance(const Weight& w, const Basis& basis, const FusionTensor& t, const IsometryAction& h);

}  // namespace starspec
