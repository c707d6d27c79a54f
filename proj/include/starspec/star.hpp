#pragma once

#include <memory>
#include <vector>

#include "starspec/bases.hpp"
#include "starspec/fusion_tensor.hpp"
#include "starspec/weights.hpp"

namespace starspec {

/// Hard-truncate leaked channels, or throw LeakageError when an input pair leaks.
enum class LeakagePolicy { truncate, error };

using TensorPtr = std::shared_ptr<const FusionTensor>;

/// Truncated deformed algebra (coefficients, star product, involution).
class DeformedAlgebra {
 public:
  DeformedAlgebra(BasisPtr basis, TensorPtr tensor, Weight weight, LeakagePolicy policy = LeakagePolicy::truncate);
  /// Builds the tensor with the default drop tolerance.
  DeformedAlgebra(BasisPtr basis, Weight weight, LeakagePolicy policy = LeakagePolicy::truncate);

  const Basis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const FusionTensor& tensor() const { return *tensor_; }
  const TensorPtr& tensor_ptr() const { return tensor_; }
  const Weight& weight() const { return weight_; }
  LeakagePolicy policy() const { return policy_; }
  const SpectrumPtr& spectrum_ptr() const { return tensor_->spectrum_ptr(); }

  /// Same basis and tensor with another weight or policy.
  DeformedAlgebra with_weight(Weight w) const;
  DeformedAlgebra with_policy(LeakagePolicy p) const;

  /// (f * g)_c = sum omega(a,b,c) f_a g_b C^c_{ab}. The parallel kernel runs
  /// over output channels with cached omega C; the serial kernel walks input
  /// pairs and evaluates the weight directly.
  CoeffVec star(const CoeffVec& f, const CoeffVec& g, Execution exec = Execution::parallel) const;

  /// Input pairs (a, b) with f_a g_b != 0 whose product leaks outside the truncation.
  std::vector<std::pair<LabelId, LabelId>> leaking_pairs(const CoeffVec& f, const CoeffVec& g) const;

  /// Measured max |conj omega(a,b,c) - omega(b,a,c)| over stored triples.
  double hermitian_defect() const { return hermitian_defect_; }
  bool hermitian() const { return hermitian_defect_ <= kPassThreshold; }

 private:
  void prepare();
  void check_inputs(const CoeffVec& f, const CoeffVec& g) const;

  BasisPtr basis_;
  TensorPtr tensor_;
  Weight weight_;
  LeakagePolicy policy_;
  std::shared_ptr<const std::vector<Complex>> weighted_;  // omega C aligned with tensor incoming() lists
  double hermitian_defect_ = 0.0;
};

/// Ratio r with U_j * U_k = r U_k * U_j for torus unit modes (axes j, k).
Complex commutation_defect(const DeformedAlgebra& alg, int j, int k);

/// ||(f*g)*h - f*(g*h)||_{H^s}. Under the error policy, inputs whose degrees
/// add past the truncation are rejected.
double associativity_defect(const DeformedAlgebra& alg, const CoeffVec& f, const CoeffVec& g, const CoeffVec& h,
                            double s = 0.0);

struct InvolutionDefect {
  double defect = 0.0;
  /// False when the weight fails Hermitian symmetry, so no identity is expected.
  bool guaranteed = true;
};

/// ||(f*g)^* - g^* * f^*||_{H^s}.
InvolutionDefect involution_defect(const DeformedAlgebra& alg, const CoeffVec& f, const CoeffVec& g, double s = 0.0);

/// chi(a) f_a; throws PreconditionError unless chi is a fusion 1-cocycle.
CoeffVec gauge_automorphism(const DeformedAlgebra& alg, const GaugeCharacter& chi, const CoeffVec& f);

/// i theta(a) f_a, the derivative of t -> gauge_automorphism(exp(i t theta), f) at 0.
CoeffVec gauge_generator(const DeformedAlgebra& alg, const GaugeCharacter::Phase& theta, const CoeffVec& f);

/// U_h f; throws PreconditionError unless the weight is equivariant under h.
CoeffVec pullback(const DeformedAlgebra& alg, const IsometryAction& h, const CoeffVec& f);

/// ||U_h(f*g) - U_h f * U_h g||_{H^s} after the equivariance precondition check.
double pullback_homomorphism_defect(const DeformedAlgebra& alg, const IsometryAction& h, const CoeffVec& f,
                                    const CoeffVec& g, double s = 0.0);

}  // namespace starspec
