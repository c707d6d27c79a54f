#include "starspec/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "starspec/errors.hpp"

namespace starspec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kFourPi2 = 4.0 * std::numbers::pi * std::numbers::pi;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void require_unit_t(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("path parameter t = " + format_number(t) + " outside [0, 1]");
}

// (x_i / x_{i+1})^{log 2 / log(t_i / t_{i+1})}: the ratio a halving step would give
double ratio_per_halving(double x0, double x1, double t0, double t1) {
  if (!(x1 > 0.0) || !(t1 > 0.0)) return kNaN;
  return std::pow(x0 / x1, std::log(2.0) / std::log(t0 / t1));
}

}  // namespace

WeightPath WeightPath::eigenvalue_phase(double c) {
  const Weight probe = Weight::eigenvalue_phase(c);  // validates c
  return WeightPath(probe.describe(), [c](double t) { return Weight::eigenvalue_phase(t * c); });
}

WeightPath WeightPath::torus_triphase(SkewMatrix j) {
  const std::string text = Weight::torus_triphase(j).describe();
  return WeightPath(text, [j](double t) { return Weight::torus_triphase(j.scaled(t)); });
}

WeightPath WeightPath::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  if (name == "eigenphase") {
    const Weight w = parse_weight(text);
    const auto c = w.eigenvalue_rate();
    return eigenvalue_phase(*c);
  }
  if (name == "triphase") {
    if (colon == std::string::npos || text.compare(colon + 1, 2, "J=") != 0) {
      throw InvalidArgument("triphase path needs J=: " + text);
    }
    return torus_triphase(parse_skew_matrix(text.substr(colon + 3)));
  }
  throw InvalidArgument("unknown weight path '" + text + "' (expected eigenphase:c=... or triphase:J=...)");
}

Weight WeightPath::at(double t) const {
  require_unit_t(t);
  return fn_(t);
}

FlatMetricFamily::FlatMetricFamily(std::vector<double> base, std::vector<double> rate)
    : base_(std::move(base)), rate_(std::move(rate)) {
  if (base_.empty() || base_.size() != rate_.size()) throw InvalidArgument("metric family needs matching radii and rates");
  for (std::size_t j = 0; j < base_.size(); ++j) {
    if (!(base_[j] > 0.0) || !std::isfinite(base_[j])) throw InvalidArgument("metric radii must be positive at t = 0");
    if (!std::isfinite(rate_[j])) throw InvalidArgument("metric rates must be finite");
  }
}

namespace {

// "c0 + c1 t" from text such as "1+0.5t", "2*t", "-t", "3".
std::pair<double, double> parse_affine(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (c != ' ') s += c;
  if (s.empty()) throw InvalidArgument("empty metric component");
  double c0 = 0.0, c1 = 0.0;
  std::size_t i = 0;
  while (i < s.size()) {
    double sign = 1.0;
    if (s[i] == '+' || s[i] == '-') {
      sign = s[i] == '-' ? -1.0 : 1.0;
      ++i;
    } else if (i != 0) {
      throw InvalidArgument("malformed metric component: " + raw);
    }
    std::size_t j = i;
    while (j < s.size() && s[j] != '+' && s[j] != '-') {
      // exponent signs belong to the number
      if ((s[j] == 'e' || s[j] == 'E') && j + 1 < s.size() && (s[j + 1] == '+' || s[j + 1] == '-')) ++j;
      ++j;
    }
    std::string term = s.substr(i, j - i);
    if (term.empty()) throw InvalidArgument("malformed metric component: " + raw);
    bool has_t = false;
    if (term.back() == 't') {
      has_t = true;
      term.pop_back();
      if (!term.empty() && term.back() == '*') term.pop_back();
    }
    double v = 1.0;
    if (!term.empty()) {
      std::size_t used = 0;
      try {
        v = std::stod(term, &used);
      } catch (const std::exception&) {
        throw InvalidArgument("malformed metric component: " + raw);
      }
      if (used != term.size()) throw InvalidArgument("malformed metric component: " + raw);
    } else if (!has_t) {
      throw InvalidArgument("malformed metric component: " + raw);
    }
    (has_t ? c1 : c0) += sign * v;
    i = j;
  }
  return {c0, c1};
}

}  // namespace

FlatMetricFamily FlatMetricFamily::parse(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ') s += c;
  if (s.rfind("a=", 0) == 0) s = s.substr(2);
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') {
    throw InvalidArgument("metric family must look like a=(1,1+t): " + text);
  }
  s = s.substr(1, s.size() - 2);
  std::vector<double> base, rate;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const auto [c0, c1] = parse_affine(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    base.push_back(c0);
    rate.push_back(c1);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return FlatMetricFamily(std::move(base), std::move(rate));
}

std::vector<double> FlatMetricFamily::radii(double t) const {
  std::vector<double> a(base_.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    a[j] = base_[j] + t * rate_[j];
    if (!(a[j] > 0.0)) throw InvalidArgument("metric radius " + std::to_string(j) + " is not positive at t = " + format_number(t));
  }
  return a;
}

double FlatMetricFamily::eigenvalue_rate(const Label& n) const {
  double s = 0.0;
  for (std::size_t j = 0; j < base_.size(); ++j) s += double(n[j]) * n[j] * rate_[j] / (base_[j] * base_[j]);
  return -kFourPi2 * s;
}

double FlatMetricFamily::log_volume_rate() const {
  double s = 0.0;
  for (std::size_t j = 0; j < base_.size(); ++j) s += rate_[j] / base_[j];
  return s;
}

std::string FlatMetricFamily::describe() const {
  std::string s = "a=(";
  for (std::size_t j = 0; j < base_.size(); ++j) {
    if (j) s += ',';
    s += format_number(base_[j]);
    if (rate_[j] != 0.0) s += (rate_[j] > 0 ? "+" : "") + format_number(rate_[j]) + "t";
  }
  return s + ")";
}

ExperimentReport continuity_sweep(const WeightPath& path, const DeformedAlgebra& templ, const CoeffVec& f,
                                  const CoeffVec& g, const std::vector<double>& t_grid,
                                  const ContinuityOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (t_grid.empty()) throw InvalidArgument("continuity sweep needs a non-empty t grid");
  for (double t : t_grid) require_unit_t(t);
  if (!templ.leaking_pairs(f, g).empty()) throw PreconditionError("continuity inputs leak outside the truncation");

  ExperimentReport rep;
  rep.experiment = "continuity";
  rep.config_echo["path"] = path.describe();
  rep.config_echo["basis"] = templ.basis().id();
  rep.config_echo["s"] = opt.s;
  rep.config_echo["t_grid"] = t_grid;
  if (opt.s <= templ.basis().dimension() / 2.0) rep.flags.push_back("s <= n/2: outside the regime of the continuity claim");

  std::vector<double> ts = t_grid;
  std::sort(ts.begin(), ts.end(), std::greater<>());
  const CoeffVec undeformed = templ.with_weight(Weight::one()).star(f, g);
  const double n0 = hs_norm(undeformed, {opt.s});

  std::vector<double> defect(ts.size()), norm(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const CoeffVec p = templ.with_weight(path.at(ts[i])).star(f, g);
    defect[i] = hs_norm(p - undeformed, {opt.s});
    norm[i] = hs_norm(p, {opt.s});
  }

  bool monotone = true, in_window = true, zero_ok = true;
  double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin, band = 0.0;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    Json row = Json::object();
    row["t"] = ts[i];
    row["defect"] = defect[i];
    row["product_norm"] = norm[i];
    const double dev = n0 > 0.0 ? std::abs(norm[i] / n0 - 1.0) : 0.0;
    row["norm_deviation"] = dev;
    band = std::max(band, dev);
    double ratio = kNaN;
    if (i > 0 && ts[i] < ts[i - 1]) {
      if (!(defect[i] < defect[i - 1])) monotone = false;
      if (ts[i] > 0.0) {
        ratio = ratio_per_halving(defect[i - 1], defect[i], ts[i - 1], ts[i]);
        if (!(ratio >= opt.ratio_lo && ratio <= opt.ratio_hi)) in_window = false;
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
      }
    }
    row["ratio"] = ratio;
    if (ts[i] == 0.0 && defect[i] > 1e-12) zero_ok = false;
    if (ts[i] > 0.0) {
      num += ts[i] * defect[i];
      den += ts[i] * ts[i];
    }
    rep.rows.push_back(std::move(row));
  }
  const double k = den > 0.0 ? num / den : 0.0;
  double fit = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (ts[i] > 0.0 && k > 0.0) fit = std::max(fit, std::abs(defect[i] - k * ts[i]) / (k * ts[i]));

  rep.max_defect = band;
  rep.threshold = opt.norm_band;
  rep.pass = monotone && in_window && zero_ok && band <= opt.norm_band;
  rep.extra["monotone"] = monotone;
  rep.extra["ratio_min"] = rmin;
  rep.extra["ratio_max"] = rmax;
  rep.extra["ratio_window"] = Json::array({opt.ratio_lo, opt.ratio_hi});
  rep.extra["linear_coefficient"] = k;
  rep.extra["linear_fit_max_rel_residual"] = fit;
  rep.extra["undeformed_norm"] = n0;
  if (!monotone) rep.flags.push_back("defect is not monotone in t");
  if (!in_window) rep.flags.push_back("successive defect ratios outside the linear-order window");
  if (!zero_ok) rep.flags.push_back("nonzero defect at t = 0");
  rep.wall_clock_seconds = seconds_since(t0);
  return rep;
}

namespace {

DeformedAlgebra metric_algebra(const FlatMetricFamily& fam, int nmax, const Weight& w, double t) {
  auto basis = std::make_shared<const TorusBasis>(fam.dimension(), nmax, fam.radii(t));
  return DeformedAlgebra(basis, w);
}

double volume_at(const FlatMetricFamily& fam, double t) {
  double v = 1.0;
  for (double a : fam.radii(t)) v *= std::sqrt(a);
  return v;
}

}  // namespace

CoeffVec metric_star_at(const FlatMetricFamily& fam, int nmax, const Weight& w, const CoeffVec& f, const CoeffVec& g,
                        double t, MetricFix fix) {
  const DeformedAlgebra alg = metric_algebra(fam, nmax, w, t);
  CoeffVec ft = f.rebind(alg.spectrum_ptr());
  CoeffVec gt = g.rebind(alg.spectrum_ptr());
  if (fix == MetricFix::function) {
    // phi_n(t) = vol(t)^{-1/2} e_n, so a fixed function has coefficients scaled by sqrt(vol(t)/vol(0))
    const double k = std::sqrt(volume_at(fam, t) / volume_at(fam, 0.0));
    ft *= k;
    gt *= k;
  }
  return alg.star(ft, gt);
}

CoeffVec metric_derivative_analytic(const FlatMetricFamily& fam, int nmax, const Weight& w, const CoeffVec& f,
                                    const CoeffVec& g, MetricFix fix, MetricTerms terms) {
  const auto rate = w.eigenvalue_rate();
  if (!rate) throw InvalidArgument("analytic metric derivative is not available for weight " + w.describe());
  const DeformedAlgebra alg = metric_algebra(fam, nmax, w, 0.0);
  const Spectrum& s = alg.tensor().spectrum();
  if (!f.spectrum().same_labels(s) || !g.spectrum().same_labels(s)) {
    throw InvalidArgument("coefficient vectors do not match the torus truncation");
  }
  std::vector<double> ldot(s.size());
  for (LabelId id = 0; id < s.size(); ++id) ldot[id] = fam.eigenvalue_rate(s.label(id));
  // vol^{-1/2} = prod a_j^{-1/4}; a fixed function adds 1/4 per input through its coefficients
  double vol = -0.25 * fam.log_volume_rate();
  if (fix == MetricFix::function) vol += 0.5 * fam.log_volume_rate();
  if (!terms.volume) vol = 0.0;
  const double r = terms.weight ? *rate : 0.0;
  CoeffVec out(alg.spectrum_ptr());
  for (const auto& [a, fa] : f.entries())
    for (const auto& [b, gb] : g.entries())
      for (const auto& e : alg.tensor().channels(a, b)) {
        const Complex factor(vol, r * (ldot[a] + ldot[b] - ldot[e.out]));
        out.add(e.out, factor * w(s, a, b, e.out) * e.value * fa * gb);
      }
  return out.rebind(f.spectrum_ptr());
}

ExperimentReport metric_derivative_fd(const FlatMetricFamily& fam, int nmax, const Weight& w, const CoeffVec& f,
                                      const CoeffVec& g, const std::vector<double>& steps,
                                      const MetricOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (steps.empty()) throw InvalidArgument("metric experiment needs at least one step");
  for (double h : steps)
    if (!(h > 0.0)) throw InvalidArgument("finite-difference steps must be positive");

  ExperimentReport rep;
  rep.experiment = "metric";
  rep.config_echo["family"] = fam.describe();
  rep.config_echo["nmax"] = nmax;
  rep.config_echo["weight"] = w.describe();
  rep.config_echo["s"] = opt.s;
  rep.config_echo["steps"] = steps;
  rep.config_echo["fix"] = opt.fix == MetricFix::function ? "function" : "coefficients";

  const CoeffVec exact = metric_derivative_analytic(fam, nmax, w, f, g, opt.fix);
  const double bnorm = hs_norm(exact, {opt.s});
  const bool relative = bnorm > 0.0;
  if (!relative) rep.flags.push_back("analytic derivative is zero: absolute errors reported");

  std::vector<double> hs = steps;
  std::sort(hs.begin(), hs.end(), std::greater<>());
  std::vector<double> err(hs.size());
  bool cancellation = false, window = true;
  double worst = 0.0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const double h = hs[i];
    CoeffVec fd = metric_star_at(fam, nmax, w, f, g, h, opt.fix) - metric_star_at(fam, nmax, w, f, g, -h, opt.fix);
    fd *= 1.0 / (2.0 * h);
    fd = fd.rebind(exact.spectrum_ptr());
    const double abs_err = hs_norm(fd - exact, {opt.s});
    err[i] = relative ? abs_err / bnorm : abs_err;
    worst = std::max(worst, err[i]);
    Json row = Json::object();
    row["step"] = h;
    row["error"] = err[i];
    row["abs_error"] = abs_err;
    row["fd_norm"] = hs_norm(fd, {opt.s});
    row["analytic_norm"] = bnorm;
    double ratio = kNaN;
    if (i > 0 && hs[i] < hs[i - 1]) {
      if (err[i] > err[i - 1]) cancellation = true;
      if (err[i] > 0.0) {
        ratio = ratio_per_halving(err[i - 1], err[i], hs[i - 1], hs[i]);
        if (!(ratio >= opt.richardson_lo && ratio <= opt.richardson_hi)) window = false;
      } else if (err[i - 1] > 0.0) {
        window = false;
      }
    }
    row["richardson"] = ratio;
    rep.rows.push_back(std::move(row));
  }
  rep.max_defect = worst;
  rep.threshold = opt.rel_tol;
  // exact agreement at every step leaves nothing to extrapolate
  const bool exact_fd = worst <= std::numeric_limits<double>::epsilon();
  rep.pass = worst <= opt.rel_tol && !cancellation && (window || exact_fd);
  rep.extra["error_kind"] = relative ? "relative" : "absolute";
  rep.extra["richardson_window"] = Json::array({opt.richardson_lo, opt.richardson_hi});
  rep.extra["coefficients_fixed_at_t0"] = opt.fix == MetricFix::coefficients;
  if (cancellation) rep.flags.push_back("error grows as the step shrinks: cancellation dominates");
  if (!window && !exact_fd) rep.flags.push_back("Richardson ratio outside the second-order window");
  rep.wall_clock_seconds = seconds_since(t0);
  return rep;
}

double rieffel_equivalence(const DeformedAlgebra& triphase_alg, const SkewMatrix& j, const CoeffVec& f,
                           const CoeffVec& g) {
  if (triphase_alg.basis().kind() != BasisKind::torus) throw InvalidArgument("Rieffel comparison needs a torus algebra");
  const DeformedAlgebra bi = triphase_alg.with_weight(Weight::bicharacter(j));
  double worst = max_abs(triphase_alg.star(f, g) - bi.star(f, g));
  const Spectrum& s = triphase_alg.tensor().spectrum();
  const Weight& w3 = triphase_alg.weight();
  const Weight& w2 = bi.weight();
  for (const auto& [a, fa] : f.entries())
    for (const auto& [b, gb] : g.entries())
      for (const auto& e : triphase_alg.tensor().channels(a, b)) {
        const Complex term = e.value * fa * gb;
        worst = std::max(worst, std::abs((w3(s, a, b, e.out) - w2(s, a, b, e.out)) * term));
      }
  return worst;
}

ExperimentReport rieffel_experiment(const DeformedAlgebra& triphase_alg, const SkewMatrix& j, std::size_t samples,
                                    std::uint64_t seed, int band, double tol) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.experiment = "rieffel";
  rep.config_echo["basis"] = triphase_alg.basis().id();
  rep.config_echo["weight"] = triphase_alg.weight().describe();
  rep.config_echo["samples"] = samples;
  rep.config_echo["seed"] = seed;
  rep.config_echo["band"] = band;
  const auto sp = triphase_alg.spectrum_ptr();
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const CoeffVec f = random_coeff_vec(sp, seed * 7919 + 2 * i, 1.0, band);
    const CoeffVec g = random_coeff_vec(sp, seed * 7919 + 2 * i + 1, 1.0, band);
    const double d = rieffel_equivalence(triphase_alg, j, f, g);
    worst = std::max(worst, d);
    Json row = Json::object();
    row["sample"] = i;
    row["defect"] = d;
    rep.rows.push_back(std::move(row));
  }
  rep.max_defect = worst;
  rep.threshold = tol;
  rep.pass = worst <= tol;
  rep.wall_clock_seconds = seconds_since(t0);
  return rep;
}

double constant_mode_ratio(const DeformedAlgebra& alg, double s) {
  const auto ids = alg.tensor().spectrum().ids_up_to_degree(0);
  if (ids.empty()) throw InvalidArgument("spectrum has no constant mode");
  const CoeffVec u = CoeffVec::unit(alg.spectrum_ptr(), ids.front());
  const double n = hs_norm(u, {s});
  return hs_norm(alg.star(u, u), {s}) / (n * n);
}

ExperimentReport sobolev_ratio_experiment(const DeformedAlgebra& alg, const SobolevOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  if (opt.samples < 2) throw InvalidArgument("Sobolev experiment needs at least two samples");
  const auto sp = alg.spectrum_ptr();
  const int band = opt.band >= 0 ? opt.band : sp->max_degree() / 2;
  ExperimentReport rep;
  rep.experiment = "sobolev";
  rep.config_echo["basis"] = alg.basis().id();
  rep.config_echo["weight"] = alg.weight().describe();
  rep.config_echo["s"] = opt.s;
  rep.config_echo["samples"] = opt.samples;
  rep.config_echo["seed"] = opt.seed;
  rep.config_echo["band"] = band;
  rep.config_echo["decay"] = opt.decay;
  if (opt.s <= alg.basis().dimension() / 2.0) rep.flags.push_back("s <= n/2: no boundedness is expected");

  double running = 0.0, half = 0.0;
  for (std::size_t i = 0; i < opt.samples; ++i) {
    const CoeffVec f = random_coeff_vec(sp, opt.seed * 1000003 + 2 * i, opt.decay, band);
    const CoeffVec g = random_coeff_vec(sp, opt.seed * 1000003 + 2 * i + 1, opt.decay, band);
    if (!alg.leaking_pairs(f, g).empty()) throw PreconditionError("Sobolev samples leak: lower the band");
    const double r = hs_norm(alg.star(f, g), {opt.s}) / (hs_norm(f, {opt.s}) * hs_norm(g, {opt.s}));
    running = std::max(running, r);
    if (i < opt.samples / 2) half = running;
    Json row = Json::object();
    row["sample"] = i;
    row["ratio"] = r;
    row["running_max"] = running;
    rep.rows.push_back(std::move(row));
  }
  const double growth = half > 0.0 ? running / half - 1.0 : 0.0;
  rep.max_defect = growth;
  rep.threshold = opt.growth_tol;
  rep.pass = growth <= opt.growth_tol;
  rep.extra["max_ratio"] = running;
  rep.extra["half_sample_max_ratio"] = half;
  rep.extra["constant_mode_ratio"] = constant_mode_ratio(alg, opt.s);
  try {
    rep.extra["log_lipschitz"] = estimate_log_lipschitz(alg.weight(), alg.tensor(), 500, opt.seed).log_lipschitz;
  } catch (const InvalidArgument&) {
    rep.extra["log_lipschitz"] = nullptr;
    rep.flags.push_back("log-Lipschitz estimate unavailable for this spectrum");
  }
  if (!rep.pass) rep.flags.push_back("max ratio grows with the sample count");
  rep.wall_clock_seconds = seconds_since(t0);
  return rep;
}

}  // namespace starspec
