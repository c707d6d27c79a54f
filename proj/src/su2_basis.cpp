#include <cmath>
#include <numbers>

#include "starspec/bases.hpp"
#include "starspec/errors.hpp"
#include "starspec/quadrature.hpp"

namespace starspec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;

std::vector<Spectrum::Entry> su2_entries(int two_lmax) {
  if (two_lmax < 0) throw InvalidArgument("SU(2) truncation must be non-negative");
  std::vector<Spectrum::Entry> out;
  for (int tj = 0; tj <= two_lmax; ++tj) {
    for (int tm = -tj; tm <= tj; tm += 2) {
      for (int tn = -tj; tn <= tj; tn += 2) {
        Spectrum::Entry e;
        e.label = Label{tj, tm, tn};
        e.conj_label = Label{tj, -tm, -tn};
        e.eigenvalue = static_cast<double>(tj) * (tj + 2);
        e.degree = tj;
        e.conj_factor = (((tm - tn) / 2) & 1) ? -1.0 : 1.0;
        out.push_back(e);
      }
    }
  }
  return out;
}

void check_point(const Point& x) {
  if (x.size() != 3) throw InvalidArgument("SU(2) point must be Euler angles (alpha, beta, gamma)");
  if (!(x[0] >= 0.0 && x[0] < kFourPi) || !(x[1] >= 0.0 && x[1] <= kPi) || !(x[2] >= 0.0 && x[2] < kFourPi)) {
    throw InvalidArgument("SU(2) point outside [0,4pi) x [0,pi] x [0,4pi)");
  }
}

const SU2Translation& as_translation(const IsometryAction& h) {
  const auto* t = std::get_if<SU2Translation>(&h);
  if (!t) throw InvalidArgument("isometry does not act on SU(2)");
  return *t;
}

double wrap(double a) {
  a = std::fmod(a, kFourPi);
  if (a < 0.0) a += kFourPi;
  if (a >= kFourPi) a = 0.0;
  return a;
}

}  // namespace

SU2Basis::SU2Basis(int two_lmax)
    : Basis(std::make_shared<const Spectrum>(BasisKind::su2, two_lmax, su2_entries(two_lmax))),
      two_lmax_(two_lmax) {}

std::string SU2Basis::id() const { return "su2:2lmax=" + std::to_string(two_lmax_); }

Complex SU2Basis::evaluate(LabelId id, const Point& x) const {
  check_point(x);
  const Label& l = spectrum().label(id);
  const double d = angular::wigner_small_d_2(l[0], l[1], l[2], x[1]);
  return std::polar(std::sqrt(l[0] + 1.0) * d, -0.5 * (l[1] * x[0] + l[2] * x[2]));
}

void SU2Basis::evaluate_all(const Point& x, std::span<Complex> out) const {
  check_point(x);
  for (LabelId i = 0; i < spectrum().size(); ++i) {
    const Label& l = spectrum().label(i);
    const double d = angular::wigner_small_d_2(l[0], l[1], l[2], x[1]);
    out[i] = std::polar(std::sqrt(l[0] + 1.0) * d, -0.5 * (l[1] * x[0] + l[2] * x[2]));
  }
}

QuadratureRule SU2Basis::quadrature(int integrand_degree) const {
  if (integrand_degree < 0) throw InvalidArgument("quadrature degree must be non-negative");
  // Degree counts doubled spins; the beta integrand is a polynomial in cos(beta)
  // of degree ceil(D/2).
  const int poly = (integrand_degree + 1) / 2;
  const int nbeta = poly / 2 + 1;
  const int nang = integrand_degree + 1;
  const GaussLegendre gl = gauss_legendre(nbeta);
  QuadratureRule rule;
  rule.exact_degree = integrand_degree;
  const std::size_t total = static_cast<std::size_t>(nbeta) * nang * nang;
  rule.points.reserve(total);
  rule.weights.reserve(total);
  for (int a = 0; a < nang; ++a) {
    const double alpha = kFourPi * a / nang;
    for (int i = 0; i < nbeta; ++i) {
      const double beta = std::acos(gl.nodes[i]);
      const double w = gl.weights[i] / (2.0 * nang * nang);
      for (int g = 0; g < nang; ++g) {
        rule.points.push_back({alpha, beta, kFourPi * g / nang});
        rule.weights.push_back(w);
      }
    }
  }
  return rule;
}

void SU2Basis::prepare_fusion() const {
  std::call_once(table_once_, [this] { table_ = std::make_unique<angular::ThreeJTable>(two_lmax_); });
}

void SU2Basis::pair_channels(LabelId a, LabelId b, double drop_tol, std::vector<FusionEntry>& out,
                             bool& leaks) const {
  const auto& t = *table_;
  const Label& la = spectrum().label(a);
  const Label& lb = spectrum().label(b);
  const int tj1 = la[0], tm1 = la[1], tn1 = la[2];
  const int tj2 = lb[0], tm2 = lb[1], tn2 = lb[2];
  const int tm = tm1 + tm2, tn = tn1 + tn2;
  auto cg = [&](int m1, int m2, int tj, int m3) {
    double v = std::sqrt(tj + 1.0) * t(tj1, tj2, tj, m1, m2, -m3);
    const int e = (tj1 - tj2 + m3) / 2;
    return (e & 1) ? -v : v;
  };
  for (int tj = std::abs(tj1 - tj2); tj <= tj1 + tj2; tj += 2) {
    if (std::abs(tm) > tj || std::abs(tn) > tj) continue;
    const double c = std::sqrt((tj1 + 1.0) * (tj2 + 1.0) / (tj + 1.0)) * cg(tm1, tm2, tj, tm) * cg(tn1, tn2, tj, tn);
    if (std::abs(c) <= drop_tol) continue;
    if (tj > two_lmax_) {
      leaks = true;
      continue;
    }
    out.push_back({spectrum().index_of(Label{tj, tm, tn}), Complex(c, 0.0)});
  }
}

void SU2Basis::validate(const IsometryAction& h) const {
  const auto& t = as_translation(h);
  if (!std::isfinite(t.left) || !std::isfinite(t.right)) throw InvalidArgument("SU(2) translation must be finite");
}

std::optional<std::vector<MonomialImage>> SU2Basis::monomial_action(const IsometryAction& h) const {
  validate(h);
  const auto& t = as_translation(h);
  std::vector<MonomialImage> images;
  images.reserve(spectrum().size());
  for (LabelId i = 0; i < spectrum().size(); ++i) {
    const Label& l = spectrum().label(i);
    images.push_back({i, std::polar(1.0, 0.5 * (l[1] * t.left + l[2] * t.right))});
  }
  return images;
}

CoeffVec SU2Basis::act(const IsometryAction& h, const CoeffVec& f) const {
  const auto images = *monomial_action(h);
  CoeffVec out(spectrum_ptr());
  for (const auto& [id, c] : f.entries()) out.add(images[id].target, images[id].factor * c);
  return out;
}

Point SU2Basis::pull_back_point(const IsometryAction& h, const Point& x) const {
  validate(h);
  check_point(x);
  const auto& t = as_translation(h);
  return {wrap(x[0] - t.left), x[1], wrap(x[2] - t.right)};
}

}  // namespace starspec
