#pragma once

#include <array>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "starspec/angular.hpp"
#include "starspec/fusion_tensor.hpp"
#include "starspec/spectrum.hpp"

namespace starspec {

/// Coordinates in a backend chart. Torus: x in [0,1)^d. Sphere: (theta, phi)
/// with theta in [0,pi], phi in [0,2pi). SU(2): Euler angles (alpha, beta,
/// gamma) with alpha, gamma in [0,4pi), beta in [0,pi].
using Point = std::vector<double>;

/// Points and weights integrating band-limited integrands of total degree
/// <= exact_degree exactly against the normalized volume of the backend.
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int exact_degree = 0;
};

/// x -> A x + shift (mod 1) with A in GL(d, Z) preserving the flat metric.
struct TorusMap {
  std::vector<int> matrix;    // row-major d x d
  std::vector<double> shift;  // length d

  static TorusMap translation(std::vector<double> v);
  static TorusMap lattice(std::vector<int> matrix, std::size_t d);
};

/// Rotation of the round sphere, stored as a 3x3 row-major matrix.
struct SphereRotation {
  std::array<double, 9> matrix{1, 0, 0, 0, 1, 0, 0, 0, 1};

  /// R = Rz(alpha) Ry(beta) Rz(gamma).
  static SphereRotation from_euler(double alpha, double beta, double gamma);
  static SphereRotation about_z(double angle) { return from_euler(angle, 0.0, 0.0); }
  std::array<double, 3> euler() const;
};

/// g -> exp(-i a s3/2) g exp(-i b s3/2): left and right maximal-torus translation.
struct SU2Translation {
  double left = 0.0;
  double right = 0.0;
};

using IsometryAction = std::variant<TorusMap, SphereRotation, SU2Translation>;

/// h1 o h2 (apply h2 first).
IsometryAction compose(const IsometryAction& h1, const IsometryAction& h2);

/// U phi_a = factor * phi_target for actions that permute labels up to phase.
struct MonomialImage {
  LabelId target;
  Complex factor;
};

inline constexpr double kDefaultDropTol = 1e-14;

/// Geometry provider: eigenbasis, fusion tensor, evaluation, quadrature
/// projection and isometry actions. Immutable after construction.
class Basis {
 public:
  virtual ~Basis() = default;

  BasisKind kind() const { return spectrum_->kind(); }
  const Spectrum& spectrum() const { return *spectrum_; }
  const SpectrumPtr& spectrum_ptr() const { return spectrum_; }

  virtual std::string id() const = 0;
  /// Manifold dimension n.
  virtual int dimension() const = 0;

  FusionTensor build_fusion(double drop_tol = kDefaultDropTol, Execution exec = Execution::parallel) const;

  /// Orthonormal eigenfunction value; throws for points outside the chart.
  virtual Complex evaluate(LabelId id, const Point& x) const = 0;
  Complex synthesize(const CoeffVec& f, const Point& x) const;

  /// Rule exact for integrands of total degree <= integrand_degree.
  virtual QuadratureRule quadrature(int integrand_degree) const = 0;

  /// Coefficients <f, phi_a> of a callable. Exact when the input has degree
  /// <= input_degree (default: the truncation degree).
  CoeffVec project(const std::function<Complex(const Point&)>& f, int input_degree = -1) const;
  /// Coefficients from samples on a rule. Throws when the rule cannot
  /// resolve inputs at the truncation degree.
  CoeffVec project_samples(const QuadratureRule& rule, std::span<const Complex> samples) const;

  /// Coefficients of (U_h f)(x) = f(h^{-1} x).
  virtual CoeffVec act(const IsometryAction& h, const CoeffVec& f) const = 0;
  /// h^{-1} x, for pointwise checks of act().
  virtual Point pull_back_point(const IsometryAction& h, const Point& x) const = 0;
  /// Label permutation with phases, when U_h maps each basis function to a
  /// multiple of a single basis function.
  virtual std::optional<std::vector<MonomialImage>> monomial_action(const IsometryAction& h) const = 0;
  /// Throws InvalidArgument when h is not a valid isometry for this backend.
  virtual void validate(const IsometryAction& h) const = 0;

 protected:
  explicit Basis(SpectrumPtr spectrum) : spectrum_(std::move(spectrum)) {}

  /// In-truncation channels of phi_a phi_b (|C| > drop_tol); sets leaks when a
  /// channel with |C| > drop_tol falls outside.
  virtual void pair_channels(LabelId a, LabelId b, double drop_tol, std::vector<FusionEntry>& out,
                             bool& leaks) const = 0;
  /// Called once before pair_channels is used concurrently.
  virtual void prepare_fusion() const {}
  /// All basis functions at one point; out has spectrum().size() entries.
  virtual void evaluate_all(const Point& x, std::span<Complex> out) const;

 private:
  SpectrumPtr spectrum_;
};

using BasisPtr = std::shared_ptr<const Basis>;

class TorusBasis final : public Basis {
 public:
  /// Labels n in Z^d with |n|_inf <= nmax; flat metric diag(radii).
  TorusBasis(int dimension, int nmax, std::vector<double> radii = {});

  std::string id() const override;
  int dimension() const override { return d_; }
  int nmax() const { return nmax_; }
  const std::vector<double>& radii() const { return radii_; }
  double volume() const { return volume_; }

  Complex evaluate(LabelId id, const Point& x) const override;
  QuadratureRule quadrature(int integrand_degree) const override;
  CoeffVec act(const IsometryAction& h, const CoeffVec& f) const override;
  Point pull_back_point(const IsometryAction& h, const Point& x) const override;
  std::optional<std::vector<MonomialImage>> monomial_action(const IsometryAction& h) const override;
  void validate(const IsometryAction& h) const override;

  /// Label of the unit vector e_axis.
  LabelId unit_mode(int axis) const;

 private:
  void pair_channels(LabelId a, LabelId b, double drop_tol, std::vector<FusionEntry>& out,
                     bool& leaks) const override;
  void evaluate_all(const Point& x, std::span<Complex> out) const override;
  const TorusMap& as_map(const IsometryAction& h) const;
  std::vector<double> inverse_matrix(const TorusMap& h) const;

  int d_;
  int nmax_;
  std::vector<double> radii_;
  double volume_;
};

class SphereBasis final : public Basis {
 public:
  explicit SphereBasis(int lmax);

  std::string id() const override;
  int dimension() const override { return 2; }
  int lmax() const { return lmax_; }
  LabelId mode(int l, int m) const { return spectrum().index_of(Label{l, m}); }

  Complex evaluate(LabelId id, const Point& x) const override;
  QuadratureRule quadrature(int integrand_degree) const override;
  CoeffVec act(const IsometryAction& h, const CoeffVec& f) const override;
  Point pull_back_point(const IsometryAction& h, const Point& x) const override;
  std::optional<std::vector<MonomialImage>> monomial_action(const IsometryAction& h) const override;
  void validate(const IsometryAction& h) const override;

  /// Wigner D^l_{m'm} for a rotation, row m' and column m offset by l.
  std::vector<Complex> rotation_block(const SphereRotation& r, int l) const;

 private:
  void pair_channels(LabelId a, LabelId b, double drop_tol, std::vector<FusionEntry>& out,
                     bool& leaks) const override;
  void prepare_fusion() const override;
  void evaluate_all(const Point& x, std::span<Complex> out) const override;

  int lmax_;
  mutable std::once_flag table_once_;
  mutable std::unique_ptr<angular::ThreeJTable> table_;
};

class SU2Basis final : public Basis {
 public:
  /// two_lmax = 2 * l_max, so half-integer truncations are exact.
  explicit SU2Basis(int two_lmax);

  std::string id() const override;
  int dimension() const override { return 3; }
  int two_lmax() const { return two_lmax_; }
  LabelId mode(int tl, int tm, int tn) const { return spectrum().index_of(Label{tl, tm, tn}); }

  Complex evaluate(LabelId id, const Point& x) const override;
  QuadratureRule quadrature(int integrand_degree) const override;
  CoeffVec act(const IsometryAction& h, const CoeffVec& f) const override;
  Point pull_back_point(const IsometryAction& h, const Point& x) const override;
  std::optional<std::vector<MonomialImage>> monomial_action(const IsometryAction& h) const override;
  void validate(const IsometryAction& h) const override;

 private:
  void pair_channels(LabelId a, LabelId b, double drop_tol, std::vector<FusionEntry>& out,
                     bool& leaks) const override;
  void prepare_fusion() const override;
  void evaluate_all(const Point& x, std::span<Complex> out) const override;

  int two_lmax_;
  mutable std::once_flag table_once_;
  mutable std::unique_ptr<angular::ThreeJTable> table_;
};

}  // namespace starspec
