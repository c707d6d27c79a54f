#pragma once

#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace starspec::angular {

// Angular momentum quantum numbers are passed as doubled integers
// (tj = 2j, tm = 2m) in the *_2 entry points, so half-integer spins are exact.

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3) by the Racah formula in exact integer
/// arithmetic; the only rounding is the final square root. Returns exactly 0
/// when a selection rule fails or the arguments are not valid quantum numbers.
double wigner3j_2(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3);
double wigner3j(double j1, double j2, double j3, double m1, double m2, double m3);

/// <j1 m1 j2 m2 | j3 m3> (Condon-Shortley).
double clebsch_gordan_2(int tj1, int tm1, int tj2, int tm2, int tj3, int tm3);
double clebsch_gordan(double j1, double m1, double j2, double m2, double j3, double m3);

/// Gaunt integral of Y_{l1}^{m1} Y_{l2}^{m2} conj(Y_{l3}^{m3}) over the sphere.
double gaunt(int l1, int m1, int l2, int m2, int l3, int m3);

/// Wigner small-d matrix element d^j_{m'm}(beta) (explicit Wigner sum in long
/// double). Convention: D^j_{m'm}(a,b,c) = e^{-i m' a} d^j_{m'm}(b) e^{-i m c}.
double wigner_small_d_2(int tj, int tmp, int tm, double beta);

/// Orthonormal complex spherical harmonic with Condon-Shortley phase.
std::complex<double> spherical_harmonic(int l, int m, double theta, double phi);

/// All Y_l^m for l <= lmax at one point, packed at index l*l + l + m.
std::vector<std::complex<double>> spherical_harmonics_upto(int lmax, double theta, double phi);

/// Memoized 3j symbols for repeated tensor builds. Not thread safe for
/// insertion; call prefill() before sharing across threads, then use lookup().
class ThreeJTable {
 public:
  /// Precomputes every symbol with all 2j <= two_jmax.
  explicit ThreeJTable(int two_jmax);

  /// Returns the cached value; falls back to direct evaluation outside the table.
  double operator()(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) const;

  std::size_t size() const { return table_.size(); }

 private:
  static std::uint64_t key(int tj1, int tj2, int tj3, int tm1, int tm2);

  int two_jmax_;
  std::unordered_map<std::uint64_t, double> table_;
};

}  // namespace starspec::angular
