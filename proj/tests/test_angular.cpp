#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#ifdef STARSPEC_HAVE_GSL
#include <gsl/gsl_sf_coupling.h>
#endif

#include "starspec/angular.hpp"
#include "starspec/quadrature.hpp"

using namespace starspec;
using namespace starspec::angular;

TEST_CASE("3j closed values") {
  CHECK(wigner3j(1, 1, 0, 0, 0, 0) == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(wigner3j(1, 1, 1, 0, 0, 0) == 0.0);
  CHECK(wigner3j(1, 2, 4, 0, 0, 0) == 0.0);
  CHECK(wigner3j(1, 2, 4, 1, -1, 0) == 0.0);
  CHECK(wigner3j(2, 2, 2, 1, 1, 1) == 0.0);  // m sum
  // (1/2 1/2 1; 1/2 -1/2 0) = 1/sqrt(6)
  CHECK(wigner3j(0.5, 0.5, 1, 0.5, -0.5, 0) == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-15));
  // (2 2 2; 0 0 0) = -sqrt(2/35)
  CHECK(wigner3j(2, 2, 2, 0, 0, 0) == doctest::Approx(-std::sqrt(2.0 / 35.0)).epsilon(1e-15));
}

TEST_CASE("3j orthogonality up to j = 16") {
  // sum_{m1,m2} (2 j3 + 1) 3j^2 = 1 for each valid (j3, m3)
  double worst = 0.0;
  for (int tj1 = 0; tj1 <= 32; tj1 += 3) {
    for (int tj2 = 0; tj2 <= 32; tj2 += 5) {
      for (int tj3 = std::abs(tj1 - tj2); tj3 <= std::min(32, tj1 + tj2); tj3 += 2) {
        for (int tm3 = -tj3; tm3 <= tj3; tm3 += 2) {
          double s = 0.0;
          for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2) {
            const int tm2 = -tm1 - tm3;
            if (std::abs(tm2) > tj2) continue;
            const double w = wigner3j_2(tj1, tj2, tj3, tm1, tm2, tm3);
            s += w * w;
          }
          worst = std::max(worst, std::abs((tj3 + 1) * s - 1.0));
        }
      }
    }
  }
  CHECK(worst <= 1e-12);
}

#ifdef STARSPEC_HAVE_GSL
TEST_CASE("3j against an independent library") {
  double worst = 0.0;
  for (int tj1 = 0; tj1 <= 16; ++tj1) {
    for (int tj2 = 0; tj2 <= 16; ++tj2) {
      for (int tj3 = std::abs(tj1 - tj2); tj3 <= tj1 + tj2; tj3 += 2) {
        for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2) {
          for (int tm2 = -tj2; tm2 <= tj2; tm2 += 2) {
            const int tm3 = -tm1 - tm2;
            if (std::abs(tm3) > tj3) continue;
            const double ref = gsl_sf_coupling_3j(tj1, tj2, tj3, tm1, tm2, tm3);
            worst = std::max(worst, std::abs(ref - wigner3j_2(tj1, tj2, tj3, tm1, tm2, tm3)));
          }
        }
      }
    }
  }
  CHECK(worst <= 1e-12);
}
#endif

TEST_CASE("Clebsch-Gordan values") {
  CHECK(clebsch_gordan(0.5, 0.5, 0.5, -0.5, 1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(clebsch_gordan(0.5, -0.5, 0.5, 0.5, 1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(clebsch_gordan(0.5, 0.5, 0.5, -0.5, 0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(clebsch_gordan(0.5, -0.5, 0.5, 0.5, 0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-15));
  for (int l = 0; l <= 4; ++l) {
    for (int m = -l; m <= l; ++m) CHECK(clebsch_gordan(l, m, 0, 0, l, m) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(clebsch_gordan(1, 1, 1, 0, 2, 0) == 0.0);
  // completeness: sum_{j3,m3} CG^2 = 1 for fixed (m1, m2)
  for (int tm1 = -3; tm1 <= 3; tm1 += 2) {
    for (int tm2 = -4; tm2 <= 4; tm2 += 2) {
      double s = 0.0;
      for (int tj3 = 1; tj3 <= 7; tj3 += 2) {
        const double c = clebsch_gordan_2(3, tm1, 4, tm2, tj3, tm1 + tm2);
        s += c * c;
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("spherical harmonics") {
  CHECK(std::abs(spherical_harmonic(0, 0, 0.3, 1.1) - 1.0 / std::sqrt(4.0 * std::numbers::pi)) < 1e-15);
  CHECK(std::abs(spherical_harmonic(1, 0, 0.0, 0.0) - std::sqrt(3.0 / (4.0 * std::numbers::pi))) < 1e-15);
  CHECK(spherical_harmonic(1, 0, 0.0, 0.0).real() == doctest::Approx(0.48860251).epsilon(1e-8));
  // Y_1^1 = -sqrt(3/8pi) sin(theta) e^{i phi}
  const double th = 0.7, ph = 2.3;
  const auto y11 = spherical_harmonic(1, 1, th, ph);
  CHECK(std::abs(y11 + std::sqrt(3.0 / (8.0 * std::numbers::pi)) * std::sin(th) * std::polar(1.0, ph)) < 1e-15);
  const auto all = spherical_harmonics_upto(6, th, ph);
  for (int l = 0; l <= 6; ++l) {
    for (int m = -l; m <= l; ++m) CHECK(std::abs(all[l * l + l + m] - spherical_harmonic(l, m, th, ph)) < 1e-14);
  }
  // small-d relation: Y_l^m(theta, 0) = sqrt((2l+1)/4pi) d^l_{m0}(theta)
  for (int l = 0; l <= 6; ++l) {
    for (int m = -l; m <= l; ++m) {
      const double d = wigner_small_d_2(2 * l, 2 * m, 0, th);
      CHECK(std::abs(spherical_harmonic(l, m, th, 0.0) - std::sqrt((2 * l + 1) / (4 * std::numbers::pi)) * d) < 1e-13);
    }
  }
}

TEST_CASE("Gaunt against Gauss-Legendre quadrature") {
  const auto gl = gauss_legendre(12);
  const int nphi = 24;
  auto quad = [&](int l1, int m1, int l2, int m2, int l3, int m3) {
    std::complex<double> s{};
    for (int i = 0; i < 12; ++i) {
      const double th = std::acos(gl.nodes[i]);
      for (int k = 0; k < nphi; ++k) {
        const double ph = 2 * std::numbers::pi * k / nphi;
        s += gl.weights[i] * (2 * std::numbers::pi / nphi) * spherical_harmonic(l1, m1, th, ph) *
             spherical_harmonic(l2, m2, th, ph) * std::conj(spherical_harmonic(l3, m3, th, ph));
      }
    }
    return s;
  };
  for (int l3 = 0; l3 <= 3; ++l3) {
    const auto q = quad(1, 1, 1, -1, l3, 0);
    CHECK(std::abs(q - gaunt(1, 1, 1, -1, l3, 0)) < 1e-13);
  }
  CHECK(std::abs(quad(3, -2, 4, 1, 5, -1) - gaunt(3, -2, 4, 1, 5, -1)) < 1e-13);
  CHECK(gaunt(1, 0, 1, 0, 1, 0) == 0.0);
}

TEST_CASE("3j table matches direct evaluation") {
  ThreeJTable t(6);
  CHECK(t.size() > 0);
  for (int tj1 = 0; tj1 <= 6; ++tj1)
    for (int tj2 = 0; tj2 <= 6; ++tj2)
      for (int tj3 = 0; tj3 <= 14; ++tj3)
        for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2)
          for (int tm2 = -tj2; tm2 <= tj2; tm2 += 2) {
            const int tm3 = -tm1 - tm2;
            CHECK(t(tj1, tj2, tj3, tm1, tm2, tm3) == wigner3j_2(tj1, tj2, tj3, tm1, tm2, tm3));
          }
}

TEST_CASE("Gauss-Legendre exactness") {
  for (int n = 1; n <= 10; ++n) {
    const auto r = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
      const double exact = (k % 2) ? 0.0 : 2.0 / (k + 1);
      CHECK(std::abs(s - exact) < 1e-14);
    }
  }
}
