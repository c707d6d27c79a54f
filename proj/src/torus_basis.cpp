#include <cmath>
#include <cstdio>
#include <numbers>

#include "starspec/bases.hpp"
#include "starspec/errors.hpp"

namespace starspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Spectrum::Entry> torus_entries(int d, int nmax, const std::vector<double>& radii) {
  std::vector<Spectrum::Entry> out;
  std::vector<int> n(d, -nmax);
  for (;;) {
    Spectrum::Entry e;
    e.label.rank = static_cast<std::uint8_t>(d);
    e.conj_label.rank = static_cast<std::uint8_t>(d);
    double lam = 0.0;
    int deg = 0;
    for (int j = 0; j < d; ++j) {
      e.label.v[j] = n[j];
      e.conj_label.v[j] = -n[j];
      lam += static_cast<double>(n[j]) * n[j] / radii[j];
      deg = std::max(deg, std::abs(n[j]));
    }
    e.eigenvalue = 4.0 * std::numbers::pi * std::numbers::pi * lam;
    e.degree = deg;
    out.push_back(e);
    int j = d - 1;
    while (j >= 0 && n[j] == nmax) n[j--] = -nmax;
    if (j < 0) break;
    ++n[j];
  }
  return out;
}

std::vector<double> default_radii(int d, std::vector<double> radii) {
  if (d < 1 || d > static_cast<int>(Label::max_rank)) throw InvalidArgument("torus dimension must be in 1..4");
  if (radii.empty()) radii.assign(d, 1.0);
  if (static_cast<int>(radii.size()) != d) throw InvalidArgument("torus radii must have one entry per axis");
  for (double a : radii) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("torus radii must be positive");
  }
  return radii;
}

}  // namespace

TorusBasis::TorusBasis(int dimension, int nmax, std::vector<double> radii)
    : Basis([&] {
        if (nmax < 0) throw InvalidArgument("torus truncation must be non-negative");
        radii = default_radii(dimension, std::move(radii));
        return std::make_shared<const Spectrum>(BasisKind::torus, nmax, torus_entries(dimension, nmax, radii));
      }()),
      d_(dimension),
      nmax_(nmax),
      radii_(std::move(radii)),
      volume_(1.0) {
  for (double a : radii_) volume_ *= std::sqrt(a);
}

std::string TorusBasis::id() const {
  std::string s = "torus:d=" + std::to_string(d_) + ":N=" + std::to_string(nmax_) + ":a=";
  char buf[32];
  for (int j = 0; j < d_; ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", radii_[j]);
    if (j) s += ',';
    s += buf;
  }
  return s;
}

LabelId TorusBasis::unit_mode(int axis) const {
  if (axis < 0 || axis >= d_) throw InvalidArgument("torus axis out of range");
  if (nmax_ < 1) throw InvalidArgument("unit modes need truncation N >= 1");
  Label l;
  l.rank = static_cast<std::uint8_t>(d_);
  l.v[axis] = 1;
  return spectrum().index_of(l);
}

Complex TorusBasis::evaluate(LabelId id, const Point& x) const {
  if (static_cast<int>(x.size()) != d_) throw InvalidArgument("torus point has wrong dimension");
  const Label& n = spectrum().label(id);
  double phase = 0.0;
  for (int j = 0; j < d_; ++j) {
    if (!(x[j] >= 0.0 && x[j] < 1.0)) throw InvalidArgument("torus point outside [0,1)^d");
    phase += n[j] * x[j];
  }
  return std::polar(1.0 / std::sqrt(volume_), kTwoPi * phase);
}

void TorusBasis::evaluate_all(const Point& x, std::span<Complex> out) const {
  if (static_cast<int>(x.size()) != d_) throw InvalidArgument("torus point has wrong dimension");
  // Per-axis powers e^{2 pi i k x_j}, then products.
  const int w = 2 * nmax_ + 1;
  std::vector<Complex> pw(static_cast<std::size_t>(d_ * w));
  for (int j = 0; j < d_; ++j) {
    if (!(x[j] >= 0.0 && x[j] < 1.0)) throw InvalidArgument("torus point outside [0,1)^d");
    for (int k = -nmax_; k <= nmax_; ++k) pw[j * w + k + nmax_] = std::polar(1.0, kTwoPi * k * x[j]);
  }
  const double norm = 1.0 / std::sqrt(volume_);
  for (LabelId i = 0; i < spectrum().size(); ++i) {
    const Label& n = spectrum().label(i);
    Complex v = norm;
    for (int j = 0; j < d_; ++j) v *= pw[j * w + n[j] + nmax_];
    out[i] = v;
  }
}

QuadratureRule TorusBasis::quadrature(int integrand_degree) const {
  if (integrand_degree < 0) throw InvalidArgument("quadrature degree must be non-negative");
  const int m = integrand_degree + 1;
  QuadratureRule rule;
  rule.exact_degree = integrand_degree;
  std::size_t total = 1;
  for (int j = 0; j < d_; ++j) total *= static_cast<std::size_t>(m);
  rule.points.reserve(total);
  rule.weights.assign(total, volume_ / static_cast<double>(total));
  std::vector<int> idx(d_, 0);
  for (std::size_t p = 0; p < total; ++p) {
    Point x(d_);
    for (int j = 0; j < d_; ++j) x[j] = static_cast<double>(idx[j]) / m;
    rule.points.push_back(std::move(x));
    for (int j = d_ - 1; j >= 0; --j) {
      if (++idx[j] < m) break;
      idx[j] = 0;
    }
  }
  return rule;
}

void TorusBasis::pair_channels(LabelId a, LabelId b, double drop_tol, std::vector<FusionEntry>& out,
                               bool& leaks) const {
  const double c = 1.0 / std::sqrt(volume_);
  if (c <= drop_tol) return;
  const Label& n = spectrum().label(a);
  const Label& m = spectrum().label(b);
  Label k;
  k.rank = n.rank;
  for (int j = 0; j < d_; ++j) {
    k.v[j] = n[j] + m[j];
    if (std::abs(k.v[j]) > nmax_) {
      leaks = true;
      return;
    }
  }
  out.push_back({spectrum().index_of(k), Complex(c, 0.0)});
}

const TorusMap& TorusBasis::as_map(const IsometryAction& h) const {
  const auto* map = std::get_if<TorusMap>(&h);
  if (!map) throw InvalidArgument("isometry does not act on the torus");
  return *map;
}

void TorusBasis::validate(const IsometryAction& h) const {
  const TorusMap& t = as_map(h);
  const auto d = static_cast<std::size_t>(d_);
  if (t.matrix.size() != d * d || t.shift.size() != d) throw InvalidArgument("torus map has wrong dimension");
  for (double v : t.shift) {
    if (!std::isfinite(v)) throw InvalidArgument("torus shift must be finite");
  }
  // Metric preservation: A^T diag(a) A = diag(a).
  double amax = 0.0;
  for (double a : radii_) amax = std::max(amax, a);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += t.matrix[k * d + i] * radii_[k] * t.matrix[k * d + j];
      const double want = i == j ? radii_[i] : 0.0;
      if (std::abs(s - want) > 1e-12 * amax) throw InvalidArgument("torus matrix does not preserve the metric");
    }
  }
  // Metric preservation forces det = +-1 when A is integral; check integrality of the inverse.
  const auto inv = inverse_matrix(t);
  for (double v : inv) {
    if (std::abs(v - std::round(v)) > 1e-9) throw InvalidArgument("torus matrix is not in GL(d,Z)");
  }
}

std::vector<double> TorusBasis::inverse_matrix(const TorusMap& h) const {
  const auto d = static_cast<std::size_t>(d_);
  std::vector<double> inv(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) inv[i * d + j] = h.matrix[j * d + i] * radii_[j] / radii_[i];
  }
  return inv;
}

std::optional<std::vector<MonomialImage>> TorusBasis::monomial_action(const IsometryAction& h) const {
  validate(h);
  const TorusMap& t = as_map(h);
  const auto d = static_cast<std::size_t>(d_);
  const auto inv = inverse_matrix(t);
  std::vector<double> u(d, 0.0);  // A^{-1} v
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) u[i] += inv[i * d + k] * t.shift[k];
  }
  std::vector<MonomialImage> out;
  out.reserve(spectrum().size());
  for (LabelId id = 0; id < spectrum().size(); ++id) {
    const Label& n = spectrum().label(id);
    Label target;
    target.rank = n.rank;
    double phase = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += inv[j * d + i] * n[j];
      target.v[i] = static_cast<int>(std::lround(s));
      phase += n[i] * u[i];
    }
    const auto tid = spectrum().find(target);
    if (!tid) throw InvalidArgument("isometry image leaves truncation");
    out.push_back({*tid, std::polar(1.0, -kTwoPi * phase)});
  }
  return out;
}

CoeffVec TorusBasis::act(const IsometryAction& h, const CoeffVec& f) const {
  const auto images = *monomial_action(h);
  CoeffVec out(spectrum_ptr());
  for (const auto& [id, c] : f.entries()) out.add(images[id].target, images[id].factor * c);
  return out;
}

Point TorusBasis::pull_back_point(const IsometryAction& h, const Point& x) const {
  validate(h);
  const TorusMap& t = as_map(h);
  if (static_cast<int>(x.size()) != d_) throw InvalidArgument("torus point has wrong dimension");
  const auto d = static_cast<std::size_t>(d_);
  const auto inv = inverse_matrix(t);
  Point y(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) y[i] += inv[i * d + j] * (x[j] - t.shift[j]);
    y[i] -= std::floor(y[i]);
    if (y[i] >= 1.0) y[i] = 0.0;
  }
  return y;
}

}  // namespace starspec
