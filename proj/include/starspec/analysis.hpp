#pragma once

#include <functional>
#include <string>
#include <vector>

#include "starspec/report.hpp"
#include "starspec/star.hpp"

namespace starspec {

/// t in [0, 1] -> weight, with the t = 0 weight identically 1.
class WeightPath {
 public:
  /// t -> eigenphase with parameter t c.
  static WeightPath eigenvalue_phase(double c);
  /// t -> triphase with matrix t J.
  static WeightPath torus_triphase(SkewMatrix j);
  /// "eigenphase:c=0.1", "triphase:J=0.1" or "triphase:J=[[..]]".
  static WeightPath parse(const std::string& text);

  /// Throws InvalidArgument for t outside [0, 1].
  Weight at(double t) const;
  const std::string& describe() const { return text_; }

 private:
  WeightPath(std::string text, std::function<Weight(double)> fn) : text_(std::move(text)), fn_(std::move(fn)) {}
  std::string text_;
  std::function<Weight(double)> fn_;
};

/// Flat torus metrics diag(a(t)) with a(t) = base + t rate.
class FlatMetricFamily {
 public:
  FlatMetricFamily(std::vector<double> base, std::vector<double> rate);
  /// "a=(1,1+t)". Components are affine in t: "2", "t", "1+0.5t", "3-2*t".
  static FlatMetricFamily parse(const std::string& text);

  int dimension() const { return static_cast<int>(base_.size()); }
  const std::vector<double>& base() const { return base_; }
  const std::vector<double>& rate() const { return rate_; }
  /// Throws InvalidArgument if some radius is not positive at t.
  std::vector<double> radii(double t) const;
  /// d lambda_n / dt at t = 0.
  double eigenvalue_rate(const Label& n) const;
  /// sum_j a_j'(0) / a_j(0), the log-derivative of vol^2.
  double log_volume_rate() const;
  std::string describe() const;

 private:
  std::vector<double> base_, rate_;
};

/// Continuity of t -> star_{omega_t}(f, g) against the undeformed product.
/// The pass rule: defects decrease monotonically on the grid sorted by
/// decreasing t, consecutive ratios (normalized to halvings) lie in
/// [ratio_lo, ratio_hi], and product norms stay within norm_band of t = 0.
struct ContinuityOptions {
  double s = 0.0;
  double ratio_lo = 1.7;
  double ratio_hi = 2.3;
  double norm_band = 0.05;
};

ExperimentReport continuity_sweep(const WeightPath& path, const DeformedAlgebra& templ, const CoeffVec& f,
                                  const CoeffVec& g, const std::vector<double>& t_grid,
                                  const ContinuityOptions& opt = {});

/// Fixed coefficients with respect to the t = 0 basis, or fixed functions
/// (coefficients rescale with the volume).
enum class MetricFix { coefficients, function };

/// Switches for the two pieces of the analytic derivative.
struct MetricTerms {
  bool weight = true;  // eigenvalue motion inside omega
  bool volume = true;  // vol^{-1/2} in the fusion coefficients
};

/// Exact t-derivative at 0 of the truncated product on the torus with radii
/// a(t) (coefficients are given on the t = 0 torus). Requires a weight whose
/// eigenvalue dependence is captured by Weight::eigenvalue_rate().
CoeffVec metric_derivative_analytic(const FlatMetricFamily& fam, int nmax, const Weight& w, const CoeffVec& f,
                                    const CoeffVec& g, MetricFix fix = MetricFix::coefficients,
                                    MetricTerms terms = {});

/// The same product at t, with the basis and tensor rebuilt for radii a(t).
CoeffVec metric_star_at(const FlatMetricFamily& fam, int nmax, const Weight& w, const CoeffVec& f,
                        const CoeffVec& g, double t, MetricFix fix = MetricFix::coefficients);

struct MetricOptions {
  double s = 0.0;
  double rel_tol = 1e-6;
  double richardson_lo = 3.5;
  double richardson_hi = 4.5;
  MetricFix fix = MetricFix::coefficients;
};

/// Central differences at each step against the analytic derivative.
ExperimentReport metric_derivative_fd(const FlatMetricFamily& fam, int nmax, const Weight& w, const CoeffVec& f,
                                      const CoeffVec& g, const std::vector<double>& steps,
                                      const MetricOptions& opt = {});

/// Max difference between the triphase product and the bicharacter product on
/// the same torus tensor, taken over output coefficients and per-channel terms.
double rieffel_equivalence(const DeformedAlgebra& triphase_alg, const SkewMatrix& j, const CoeffVec& f,
                           const CoeffVec& g);

/// rieffel_equivalence over seeded random inputs of degree <= band.
ExperimentReport rieffel_experiment(const DeformedAlgebra& triphase_alg, const SkewMatrix& j, std::size_t samples,
                                    std::uint64_t seed, int band, double tol = 1e-12);

struct SobolevOptions {
  double s = 1.0;
  std::size_t samples = 200;
  std::uint64_t seed = 1;
  int band = -1;  // default: half the truncation
  double decay = 1.0;
  double growth_tol = 0.1;
};

/// ||f*g||_s / (||f||_s ||g||_s) over random leakage-free pairs. Passes when
/// the max over all samples exceeds the max over the first half by at most
/// growth_tol (relative).
ExperimentReport sobolev_ratio_experiment(const DeformedAlgebra& alg, const SobolevOptions& opt = {});

/// The ratio for f = g = constant mode.
double constant_mode_ratio(const DeformedAlgebra& alg, double s);

}  // namespace starspec
