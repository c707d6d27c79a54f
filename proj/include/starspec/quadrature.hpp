#pragma once

#include <vector>

namespace starspec {

struct GaussLegendre {
  std::vector<double> nodes;    // ascending in [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule (Newton iteration on P_n), exact for degree 2n - 1.
GaussLegendre gauss_legendre(int n);

}  // namespace starspec
