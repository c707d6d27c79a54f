#include <algorithm>
#include <cmath>
#include <numbers>

#include "starspec/bases.hpp"
#include "starspec/errors.hpp"

namespace starspec {

TorusMap TorusMap::translation(std::vector<double> v) {
  const std::size_t d = v.size();
  TorusMap h;
  h.matrix.assign(d * d, 0);
  for (std::size_t i = 0; i < d; ++i) h.matrix[i * d + i] = 1;
  h.shift = std::move(v);
  return h;
}

TorusMap TorusMap::lattice(std::vector<int> matrix, std::size_t d) {
  if (matrix.size() != d * d) throw InvalidArgument("lattice map must be d x d");
  TorusMap h;
  h.matrix = std::move(matrix);
  h.shift.assign(d, 0.0);
  return h;
}

SphereRotation SphereRotation::from_euler(double alpha, double beta, double gamma) {
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double cb = std::cos(beta), sb = std::sin(beta);
  const double cg = std::cos(gamma), sg = std::sin(gamma);
  SphereRotation r;
  r.matrix = {ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb,
              sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb,
              -sb * cg,               sb * sg,                 cb};
  return r;
}

std::array<double, 3> SphereRotation::euler() const {
  const auto& m = matrix;
  const double r33 = std::clamp(m[8], -1.0, 1.0);
  const double beta = std::acos(r33);
  const double sb = std::sqrt(m[2] * m[2] + m[5] * m[5]);
  if (sb > 1e-12) {
    return {std::atan2(m[5], m[2]), beta, std::atan2(m[7], -m[6])};
  }
  if (r33 > 0.0) return {std::atan2(m[3], m[0]), 0.0, 0.0};
  return {std::atan2(-m[1], m[4]), std::numbers::pi, 0.0};
}

IsometryAction compose(const IsometryAction& h1, const IsometryAction& h2) {
  if (h1.index() != h2.index()) throw InvalidArgument("cannot compose actions of different backends");
  if (const auto* a = std::get_if<TorusMap>(&h1)) {
    const auto& b = std::get<TorusMap>(h2);
    const std::size_t d = a->shift.size();
    if (b.shift.size() != d) throw InvalidArgument("torus maps of different dimension");
    TorusMap out;
    out.matrix.assign(d * d, 0);
    out.shift = a->shift;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < d; ++k) out.matrix[i * d + j] += a->matrix[i * d + k] * b.matrix[k * d + j];
        out.shift[i] += a->matrix[i * d + j] * b.shift[j];
      }
    }
    return out;
  }
  if (const auto* a = std::get_if<SphereRotation>(&h1)) {
    const auto& b = std::get<SphereRotation>(h2);
    SphereRotation out;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += a->matrix[i * 3 + k] * b.matrix[k * 3 + j];
        out.matrix[i * 3 + j] = s;
      }
    }
    return out;
  }
  const auto& a = std::get<SU2Translation>(h1);
  const auto& b = std::get<SU2Translation>(h2);
  return SU2Translation{a.left + b.left, a.right + b.right};
}

FusionTensor Basis::build_fusion(double drop_tol, Execution exec) const {
  if (!(drop_tol >= 0.0)) throw InvalidArgument("drop tolerance must be non-negative");
  prepare_fusion();
  const auto n = static_cast<std::int64_t>(spectrum_->size());
  std::vector<std::vector<FusionEntry>> rows(static_cast<std::size_t>(n * n));
  std::vector<std::uint8_t> leaks(static_cast<std::size_t>(n * n), 0);

  auto fill_row = [&](std::int64_t a) {
    for (std::int64_t b = 0; b < n; ++b) {
      const auto p = static_cast<std::size_t>(a * n + b);
      bool leak = false;
      pair_channels(static_cast<LabelId>(a), static_cast<LabelId>(b), drop_tol, rows[p], leak);
      leaks[p] = leak ? 1 : 0;
    }
  };

  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t a = 0; a < n; ++a) fill_row(a);
  } else {
    for (std::int64_t a = 0; a < n; ++a) fill_row(a);
  }

  FusionMetadata meta{id(), spectrum_->max_degree(), drop_tol};
  return FusionTensor(spectrum_, std::move(meta), std::move(rows), std::move(leaks));
}

void Basis::evaluate_all(const Point& x, std::span<Complex> out) const {
  for (LabelId i = 0; i < spectrum_->size(); ++i) out[i] = evaluate(i, x);
}

Complex Basis::synthesize(const CoeffVec& f, const Point& x) const {
  if (f.spectrum_ptr() != spectrum_ && !f.spectrum().same_labels(*spectrum_)) {
    throw InvalidArgument("coefficient vector belongs to another basis");
  }
  Complex sum{};
  for (const auto& [id, c] : f.entries()) sum += c * evaluate(id, x);
  return sum;
}

CoeffVec Basis::project(const std::function<Complex(const Point&)>& f, int input_degree) const {
  const int trunc = spectrum_->max_degree();
  const int deg = std::max(input_degree < 0 ? trunc : input_degree, trunc);
  const QuadratureRule rule = quadrature(deg + trunc);
  std::vector<Complex> samples(rule.points.size());
  for (std::size_t p = 0; p < rule.points.size(); ++p) samples[p] = f(rule.points[p]);
  return project_samples(rule, samples);
}

CoeffVec Basis::project_samples(const QuadratureRule& rule, std::span<const Complex> samples) const {
  if (samples.size() != rule.points.size() || rule.weights.size() != rule.points.size()) {
    throw InvalidArgument("sample count does not match quadrature rule");
  }
  if (rule.exact_degree < 2 * spectrum_->max_degree()) {
    throw InvalidArgument("insufficient grid resolution for requested truncation");
  }
  const std::size_t n = spectrum_->size();
  std::vector<Complex> acc(n);
  std::vector<Complex> vals(n);
  for (std::size_t p = 0; p < rule.points.size(); ++p) {
    evaluate_all(rule.points[p], vals);
    const Complex ws = rule.weights[p] * samples[p];
    for (std::size_t i = 0; i < n; ++i) acc[i] += ws * std::conj(vals[i]);
  }
  return CoeffVec::from_dense(spectrum_, acc);
}

}  // namespace starspec
