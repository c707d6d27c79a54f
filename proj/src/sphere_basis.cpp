#include <algorithm>
#include <cmath>
#include <numbers>

#include "starspec/bases.hpp"
#include "starspec/errors.hpp"
#include "starspec/quadrature.hpp"

namespace starspec {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Spectrum::Entry> sphere_entries(int lmax) {
  if (lmax < 0) throw InvalidArgument("sphere truncation must be non-negative");
  std::vector<Spectrum::Entry> out;
  for (int l = 0; l <= lmax; ++l) {
    for (int m = -l; m <= l; ++m) {
      Spectrum::Entry e;
      e.label = Label{l, m};
      e.conj_label = Label{l, -m};
      e.eigenvalue = static_cast<double>(l) * (l + 1);
      e.degree = l;
      e.conj_factor = (m & 1) ? -1.0 : 1.0;
      out.push_back(e);
    }
  }
  return out;
}

void check_point(const Point& x) {
  if (x.size() != 2) throw InvalidArgument("sphere point must be (theta, phi)");
  if (!(x[0] >= 0.0 && x[0] <= kPi) || !(x[1] >= 0.0 && x[1] < 2.0 * kPi)) {
    throw InvalidArgument("sphere point outside [0,pi] x [0,2pi)");
  }
}

const SphereRotation& as_rotation(const IsometryAction& h) {
  const auto* r = std::get_if<SphereRotation>(&h);
  if (!r) throw InvalidArgument("isometry does not act on the sphere");
  return *r;
}

}  // namespace

SphereBasis::SphereBasis(int lmax)
    : Basis(std::make_shared<const Spectrum>(BasisKind::sphere, lmax, sphere_entries(lmax))), lmax_(lmax) {
  // evaluate_all relies on the packed order l*l + l + m matching label ids.
  for (LabelId i = 0; i < spectrum().size(); ++i) {
    const Label& lm = spectrum().label(i);
    if (static_cast<LabelId>(lm[0] * lm[0] + lm[0] + lm[1]) != i) throw Error("unexpected sphere label order");
  }
}

std::string SphereBasis::id() const { return "sphere:lmax=" + std::to_string(lmax_); }

Complex SphereBasis::evaluate(LabelId id, const Point& x) const {
  check_point(x);
  const Label& lm = spectrum().label(id);
  return angular::spherical_harmonic(lm[0], lm[1], x[0], x[1]);
}

void SphereBasis::evaluate_all(const Point& x, std::span<Complex> out) const {
  check_point(x);
  const auto y = angular::spherical_harmonics_upto(lmax_, x[0], x[1]);
  std::copy(y.begin(), y.end(), out.begin());
}

QuadratureRule SphereBasis::quadrature(int integrand_degree) const {
  if (integrand_degree < 0) throw InvalidArgument("quadrature degree must be non-negative");
  const int ntheta = integrand_degree / 2 + 1;
  const int nphi = integrand_degree + 1;
  const GaussLegendre gl = gauss_legendre(ntheta);
  QuadratureRule rule;
  rule.exact_degree = integrand_degree;
  rule.points.reserve(static_cast<std::size_t>(ntheta) * nphi);
  for (int i = 0; i < ntheta; ++i) {
    const double theta = std::acos(gl.nodes[i]);
    for (int k = 0; k < nphi; ++k) {
      rule.points.push_back({theta, 2.0 * kPi * k / nphi});
      rule.weights.push_back(gl.weights[i] * 2.0 * kPi / nphi);
    }
  }
  return rule;
}

void SphereBasis::prepare_fusion() const {
  std::call_once(table_once_, [this] { table_ = std::make_unique<angular::ThreeJTable>(2 * lmax_); });
}

void SphereBasis::pair_channels(LabelId a, LabelId b, double drop_tol, std::vector<FusionEntry>& out,
                                bool& leaks) const {
  const auto& t = *table_;
  const int l1 = spectrum().label(a)[0], m1 = spectrum().label(a)[1];
  const int l2 = spectrum().label(b)[0], m2 = spectrum().label(b)[1];
  const int m3 = m1 + m2;
  for (int l3 = std::abs(l1 - l2); l3 <= l1 + l2; l3 += 2) {
    if (std::abs(m3) > l3) continue;
    const double pref = std::sqrt((2.0 * l1 + 1.0) * (2.0 * l2 + 1.0) * (2.0 * l3 + 1.0) / (4.0 * kPi));
    double g = pref * t(2 * l1, 2 * l2, 2 * l3, 0, 0, 0) * t(2 * l1, 2 * l2, 2 * l3, 2 * m1, 2 * m2, -2 * m3);
    if (m3 & 1) g = -g;
    if (std::abs(g) <= drop_tol) continue;
    if (l3 > lmax_) {
      leaks = true;
      continue;
    }
    out.push_back({static_cast<LabelId>(l3 * l3 + l3 + m3), Complex(g, 0.0)});
  }
}

void SphereBasis::validate(const IsometryAction& h) const {
  const auto& m = as_rotation(h).matrix;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += m[k * 3 + i] * m[k * 3 + j];
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > 1e-10) throw InvalidArgument("sphere matrix is not orthogonal");
    }
  }
  const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
                     m[2] * (m[3] * m[7] - m[4] * m[6]);
  if (det < 0.0) throw InvalidArgument("sphere matrix is a reflection");
}

std::vector<Complex> SphereBasis::rotation_block(const SphereRotation& r, int l) const {
  const auto [alpha, beta, gamma] = r.euler();
  const int w = 2 * l + 1;
  std::vector<Complex> block(static_cast<std::size_t>(w * w));
  for (int mp = -l; mp <= l; ++mp) {
    for (int m = -l; m <= l; ++m) {
      const double d = angular::wigner_small_d_2(2 * l, 2 * mp, 2 * m, beta);
      block[(mp + l) * w + (m + l)] = std::polar(d, -(mp * alpha + m * gamma));
    }
  }
  return block;
}

CoeffVec SphereBasis::act(const IsometryAction& h, const CoeffVec& f) const {
  validate(h);
  const auto& r = as_rotation(h);
  std::vector<Complex> dense = f.dense();
  std::vector<Complex> out(dense.size());
  for (int l = 0; l <= lmax_; ++l) {
    const int w = 2 * l + 1;
    const std::size_t base = static_cast<std::size_t>(l * l);
    bool any = false;
    for (int k = 0; k < w; ++k) any = any || dense[base + k] != Complex{};
    if (!any) continue;
    const auto block = rotation_block(r, l);
    for (int i = 0; i < w; ++i) {
      Complex s{};
      for (int k = 0; k < w; ++k) s += block[i * w + k] * dense[base + k];
      out[base + i] = s;
    }
  }
  return CoeffVec::from_dense(spectrum_ptr(), out);
}

Point SphereBasis::pull_back_point(const IsometryAction& h, const Point& x) const {
  validate(h);
  check_point(x);
  const auto& m = as_rotation(h).matrix;
  const double v[3] = {std::sin(x[0]) * std::cos(x[1]), std::sin(x[0]) * std::sin(x[1]), std::cos(x[0])};
  double y[3];
  for (int i = 0; i < 3; ++i) y[i] = m[0 * 3 + i] * v[0] + m[1 * 3 + i] * v[1] + m[2 * 3 + i] * v[2];
  const double theta = std::acos(std::clamp(y[2], -1.0, 1.0));
  double phi = std::atan2(y[1], y[0]);
  if (phi < 0.0) phi += 2.0 * kPi;
  if (phi >= 2.0 * kPi) phi = 0.0;
  return {theta, phi};
}

std::optional<std::vector<MonomialImage>> SphereBasis::monomial_action(const IsometryAction& h) const {
  validate(h);
  const auto& r = as_rotation(h);
  std::vector<MonomialImage> images(spectrum().size());
  for (int l = 0; l <= lmax_; ++l) {
    const int w = 2 * l + 1;
    const auto block = rotation_block(r, l);
    for (int k = 0; k < w; ++k) {
      int hit = -1;
      for (int i = 0; i < w; ++i) {
        if (std::abs(block[i * w + k]) > 1e-12) {
          if (hit >= 0) return std::nullopt;
          hit = i;
        }
      }
      if (hit < 0) return std::nullopt;
      images[static_cast<std::size_t>(l * l + k)] = {static_cast<LabelId>(l * l + hit), block[hit * w + k]};
    }
  }
  return images;
}

}  // namespace starspec
