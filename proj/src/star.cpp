#include "starspec/star.hpp"

#include <cmath>
#include <string>

#include "starspec/errors.hpp"

namespace starspec {

DeformedAlgebra::DeformedAlgebra(BasisPtr basis, TensorPtr tensor, Weight weight, LeakagePolicy policy)
    : basis_(std::move(basis)), tensor_(std::move(tensor)), weight_(std::move(weight)), policy_(policy) {
  if (!basis_ || !tensor_) throw InvalidArgument("deformed algebra needs a basis and a tensor");
  if (!tensor_->spectrum().same_labels(basis_->spectrum())) throw InvalidArgument("tensor and basis have different spectra");
  prepare();
}

DeformedAlgebra::DeformedAlgebra(BasisPtr basis, Weight weight, LeakagePolicy policy)
    : DeformedAlgebra(basis, std::make_shared<const FusionTensor>(basis->build_fusion()), std::move(weight), policy) {}

void DeformedAlgebra::prepare() {
  const Spectrum& s = tensor_->spectrum();
  weight_.validate_for(s);
  auto cache = std::make_shared<std::vector<Complex>>();
  cache->reserve(tensor_->nnz());
  for (LabelId c = 0; c < tensor_->labels(); ++c) {
    for (const auto& e : tensor_->incoming(c)) cache->push_back(weight_(s, e.left, e.right, c) * e.value);
  }
  weighted_ = std::move(cache);
  hermitian_defect_ = check_admissible(weight_, *tensor_).hermitian_defect;
}

DeformedAlgebra DeformedAlgebra::with_weight(Weight w) const { return DeformedAlgebra(basis_, tensor_, std::move(w), policy_); }

DeformedAlgebra DeformedAlgebra::with_policy(LeakagePolicy p) const {
  DeformedAlgebra out = *this;
  out.policy_ = p;
  return out;
}

std::vector<std::pair<LabelId, LabelId>> DeformedAlgebra::leaking_pairs(const CoeffVec& f, const CoeffVec& g) const {
  std::vector<std::pair<LabelId, LabelId>> out;
  for (const auto& [a, fa] : f.entries())
    for (const auto& [b, gb] : g.entries())
      if (tensor_->leaks(a, b)) out.emplace_back(a, b);
  return out;
}

void DeformedAlgebra::check_inputs(const CoeffVec& f, const CoeffVec& g) const {
  const Spectrum& s = tensor_->spectrum();
  if (!f.spectrum().same_labels(s) || !g.spectrum().same_labels(s)) {
    throw InvalidArgument("coefficient vector does not belong to this algebra");
  }
  if (policy_ != LeakagePolicy::error) return;
  const auto bad = leaking_pairs(f, g);
  if (bad.empty()) return;
  std::string msg = "product leaks outside the truncation for " + std::to_string(bad.size()) + " pair(s):";
  for (std::size_t i = 0; i < bad.size() && i < 8; ++i) {
    msg += " (" + s.describe(bad[i].first) + "," + s.describe(bad[i].second) + ")";
  }
  if (bad.size() > 8) msg += " ...";
  throw LeakageError(msg);
}

CoeffVec DeformedAlgebra::star(const CoeffVec& f, const CoeffVec& g, Execution exec) const {
  check_inputs(f, g);
  const std::vector<Complex> fd = f.dense();
  const std::vector<Complex> gd = g.dense();
  const auto n = static_cast<std::int64_t>(tensor_->labels());
  std::vector<Complex> out(static_cast<std::size_t>(n));
  // offsets of each output block inside the cached omega C array
  std::vector<std::size_t> offset(static_cast<std::size_t>(n) + 1, 0);
  for (std::int64_t c = 0; c < n; ++c) offset[c + 1] = offset[c] + tensor_->incoming(static_cast<LabelId>(c)).size();
  const auto& wc = *weighted_;
#pragma omp parallel for schedule(dynamic, 4) if (exec == Execution::parallel)
  for (std::int64_t c = 0; c < n; ++c) {
    const auto in = tensor_->incoming(static_cast<LabelId>(c));
    const Complex* w = wc.data() + offset[c];
    Complex acc{};
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Complex fa = fd[in[i].left];
      if (fa == Complex{}) continue;
      const Complex gb = gd[in[i].right];
      if (gb == Complex{}) continue;
      acc += w[i] * fa * gb;
    }
    out[c] = acc;
  }
  return CoeffVec::from_dense(spectrum_ptr(), out);
}

Complex commutation_defect(const DeformedAlgebra& alg, int j, int k) {
  const auto* torus = dynamic_cast<const TorusBasis*>(&alg.basis());
  if (!torus) throw InvalidArgument("commutation ratio needs a torus backend");
  const auto uj = CoeffVec::unit(alg.spectrum_ptr(), torus->unit_mode(j));
  const auto uk = CoeffVec::unit(alg.spectrum_ptr(), torus->unit_mode(k));
  const CoeffVec p = alg.star(uj, uk);
  const CoeffVec q = alg.star(uk, uj);
  LabelId pivot = 0;
  double best = 0.0;
  for (const auto& [id, v] : q.entries()) {
    if (std::abs(v) > best) {
      best = std::abs(v);
      pivot = id;
    }
  }
  if (best == 0.0) throw PreconditionError("zero product: commutation ratio undefined");
  const Complex r = p[pivot] / q[pivot];
  if (max_abs(p - r * q) > 1e-12 * best) throw PreconditionError("products are not proportional");
  return r;
}

double associativity_defect(const DeformedAlgebra& alg, const CoeffVec& f, const CoeffVec& g, const CoeffVec& h,
                            double s) {
  if (alg.policy() == LeakagePolicy::error) {
    const int band = alg.tensor().spectrum().max_degree();
    if (f.max_degree() + g.max_degree() + h.max_degree() > band) {
      throw LeakageError("associativity inputs must be band-limited to one third of the truncation");
    }
  }
  const CoeffVec left = alg.star(alg.star(f, g), h);
  const CoeffVec right = alg.star(f, alg.star(g, h));
  return hs_norm(left - right, {s});
}

InvolutionDefect involution_defect(const DeformedAlgebra& alg, const CoeffVec& f, const CoeffVec& g, double s) {
  InvolutionDefect out;
  out.guaranteed = alg.hermitian();
  out.defect = hs_norm(involution(alg.star(f, g)) - alg.star(involution(g), involution(f)), {s});
  return out;
}

CoeffVec gauge_automorphism(const DeformedAlgebra& alg, const GaugeCharacter& chi, const CoeffVec& f) {
  const double d = check_gauge_cocycle(chi, alg.tensor());
  if (d > kPassThreshold) {
    throw PreconditionError("gauge character " + chi.name() + " is not a fusion 1-cocycle (defect " + std::to_string(d) + ")");
  }
  CoeffVec out(f.spectrum_ptr());
  for (const auto& [id, c] : f.entries()) out.set(id, chi(f.spectrum(), id) * c);
  return out;
}

CoeffVec gauge_generator(const DeformedAlgebra&, const GaugeCharacter::Phase& theta, const CoeffVec& f) {
  CoeffVec out(f.spectrum_ptr());
  for (const auto& [id, c] : f.entries()) out.set(id, Complex(0.0, theta(f.spectrum(), id)) * c);
  return out;
}

namespace {

void require_equivariant(const DeformedAlgebra& alg, const IsometryAction& h) {
  const double d = check_equivariance(alg.weight(), alg.basis(), alg.tensor(), h);
  if (d > kPassThreshold) {
    throw PreconditionError("weight " + alg.weight().describe() +
                            " fails the equivariance criterion omega(h.a, h.b, h.c) = omega(a, b, c) (defect " +
                            std::to_string(d) + ")");
  }
}

}  // namespace

CoeffVec pullback(const DeformedAlgebra& alg, const IsometryAction& h, const CoeffVec& f) {
  require_equivariant(alg, h);
  return alg.basis().act(h, f);
}

double pullback_homomorphism_defect(const DeformedAlgebra& alg, const IsometryAction& h, const CoeffVec& f,
                                    const CoeffVec& g, double s) {
  require_equivariant(alg, h);
  const Basis& b = alg.basis();
  const CoeffVec lhs = b.act(h, alg.star(f, g));
  const CoeffVec rhs = alg.star(b.act(h, f), b.act(h, g));
  return hs_norm(lhs - rhs, {s});
}

}  // namespace starspec
