#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "starspec/errors.hpp"
#include "starspec/star.hpp"

using namespace starspec;

namespace {

constexpr double kPi = std::numbers::pi;

std::shared_ptr<const TorusBasis> torus(int d, int n) { return std::make_shared<const TorusBasis>(d, n); }

double dist(const CoeffVec& a, const CoeffVec& b) { return max_abs(a - b); }

}  // namespace

TEST_CASE("undeformed torus product adds frequencies") {
  auto b = torus(2, 4);
  DeformedAlgebra alg(b, Weight::one());
  const auto& s = b->spectrum();
  const auto p = alg.star(CoeffVec::unit(alg.spectrum_ptr(), s.index_of(Label{1, -2})),
                          CoeffVec::unit(alg.spectrum_ptr(), s.index_of(Label{2, 1})));
  CHECK(p.nonzeros() == 1);
  CHECK(p.at(Label{3, -1}) == Complex(1.0, 0.0));
}

TEST_CASE("nc torus products and commutation ratios") {
  auto b = torus(2, 3);
  for (double theta : {0.1, 0.25, 0.5}) {
    DeformedAlgebra alg(b, Weight::nc_torus(SkewMatrix::planar(theta)));
    const auto p = alg.star(CoeffVec::unit(alg.spectrum_ptr(), b->unit_mode(0)), CoeffVec::unit(alg.spectrum_ptr(), b->unit_mode(1)));
    CHECK(std::abs(p.at(Label{1, 1}) - std::polar(1.0, kPi * theta)) < 1e-15);
    CHECK(std::abs(commutation_defect(alg, 0, 1) - std::polar(1.0, 2 * kPi * theta)) <= 1e-12);
    CHECK(std::abs(commutation_defect(alg, 1, 0) - std::polar(1.0, -2 * kPi * theta)) <= 1e-12);
    CHECK(std::abs(commutation_defect(alg, 0, 0) - 1.0) <= 1e-15);
  }
  DeformedAlgebra quarter(b, Weight::nc_torus(SkewMatrix::planar(0.25)));
  CHECK(std::abs(commutation_defect(quarter, 0, 1) - Complex(0.0, 1.0)) <= 1e-12);
  DeformedAlgebra flat(b, Weight::nc_torus(SkewMatrix::planar(0.0)));
  CHECK(std::abs(commutation_defect(flat, 0, 1) - 1.0) <= 1e-15);

  auto b3 = torus(3, 2);
  const SkewMatrix th(3, {0, 0.1, -0.3, -0.1, 0, 0.45, 0.3, -0.45, 0});
  DeformedAlgebra a3(b3, Weight::nc_torus(th));
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) CHECK(std::abs(commutation_defect(a3, j, k) - std::polar(1.0, 2 * kPi * th(j, k))) <= 1e-12);
  SphereBasis sp(2);
  CHECK_THROWS_AS(commutation_defect(DeformedAlgebra(std::make_shared<SphereBasis>(2), Weight::one()), 0, 1), InvalidArgument);
}

TEST_CASE("sphere eigenphase channel") {
  auto s = std::make_shared<const SphereBasis>(4);
  DeformedAlgebra alg(s, Weight::eigenvalue_phase(1.0));
  const auto p = alg.star(CoeffVec::unit(alg.spectrum_ptr(), s->mode(1, 1)), CoeffVec::unit(alg.spectrum_ptr(), s->mode(1, -1)));
  const double g = alg.tensor().coefficient(s->mode(1, 1), s->mode(1, -1), s->mode(2, 0)).real();
  CHECK(std::abs(p[s->mode(2, 0)] - std::polar(1.0, -2.0) * g) < 1e-15);
  CHECK(std::abs(p[s->mode(0, 0)] - std::polar(1.0, 4.0) * alg.tensor().coefficient(s->mode(1, 1), s->mode(1, -1), s->mode(0, 0))) < 1e-15);
}

TEST_CASE("serial and parallel kernels agree; bilinearity") {
  auto s = std::make_shared<const SphereBasis>(6);
  DeformedAlgebra alg(s, Weight::eigenvalue_phase(0.3));
  auto f = random_coeff_vec(alg.spectrum_ptr(), 1, 1.0);
  auto g = random_coeff_vec(alg.spectrum_ptr(), 2, 1.0);
  auto h = random_coeff_vec(alg.spectrum_ptr(), 3, 1.0);
  CHECK(dist(alg.star(f, g, Execution::parallel), alg.star(f, g, Execution::serial)) == 0.0);
  const Complex a(0.5, -2.0);
  CHECK(dist(alg.star(a * f + h, g), a * alg.star(f, g) + alg.star(h, g)) < 1e-13);
  CHECK(dist(alg.star(f, a * g + h), a * alg.star(f, g) + alg.star(f, h)) < 1e-13);
}

TEST_CASE("leakage policy") {
  auto b = torus(1, 3);
  DeformedAlgebra strict(b, Weight::one(), LeakagePolicy::error);
  const auto u2 = CoeffVec::unit(strict.spectrum_ptr(), b->spectrum().index_of(Label{2}));
  CHECK_THROWS_AS(strict.star(u2, u2), LeakageError);
  CHECK(strict.with_policy(LeakagePolicy::truncate).star(u2, u2).empty());
  CHECK(strict.leaking_pairs(u2, u2).size() == 1);
  auto f = random_coeff_vec(strict.spectrum_ptr(), 4, 1.0, 2);
  CHECK_THROWS_AS(associativity_defect(strict, f, f, f), LeakageError);
}

TEST_CASE("associativity for cocycle weights") {
  struct Case {
    BasisPtr basis;
    Weight w;
  };
  std::vector<Case> cases{{torus(2, 6), Weight::torus_triphase(SkewMatrix::planar(0.3))},
                          {std::make_shared<const SphereBasis>(6), Weight::eigenvalue_phase(1.0)},
                          {std::make_shared<const SU2Basis>(6), Weight::su2_phase()},
                          {std::make_shared<const SphereBasis>(6), Weight::one()}};
  for (const auto& c : cases) {
    DeformedAlgebra alg(c.basis, c.w, LeakagePolicy::error);
    const int band = alg.tensor().spectrum().max_degree() / 3;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto f = random_coeff_vec(alg.spectrum_ptr(), 3 * seed + 1, 0.5, band);
      auto g = random_coeff_vec(alg.spectrum_ptr(), 3 * seed + 2, 0.5, band);
      auto h = random_coeff_vec(alg.spectrum_ptr(), 3 * seed + 3, 0.5, band);
      worst = std::max(worst, associativity_defect(alg, f, g, h, 1.0));
    }
    CHECK(worst <= 1e-9);
  }
  DeformedAlgebra bad(torus(2, 6), Weight::perturbed(Weight::torus_triphase(SkewMatrix::planar(0.3)), 1e-2, 11));
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto f = random_coeff_vec(bad.spectrum_ptr(), seed + 1, 0.5, 2);
    auto g = random_coeff_vec(bad.spectrum_ptr(), seed + 7, 0.5, 2);
    auto h = random_coeff_vec(bad.spectrum_ptr(), seed + 13, 0.5, 2);
    worst = std::max(worst, associativity_defect(bad, f, g, h));
  }
  CHECK(worst >= 1e-5);
}

TEST_CASE("involution compatibility") {
  DeformedAlgebra tri(torus(2, 6), Weight::torus_triphase(SkewMatrix::planar(0.3)));
  auto f = random_coeff_vec(tri.spectrum_ptr(), 1, 0.5, 3);
  auto g = random_coeff_vec(tri.spectrum_ptr(), 2, 0.5, 3);
  auto r = involution_defect(tri, f, g, 1.0);
  CHECK(r.guaranteed);
  CHECK(r.defect <= 1e-10);

  auto s = std::make_shared<const SphereBasis>(6);
  DeformedAlgebra one(s, Weight::one());
  auto real_f = s->project([](const Point& x) { return Complex(std::cos(x[0]) + std::sin(x[0]) * std::sin(x[1]), 0.0); }, 3);
  auto real_g = s->project([](const Point& x) { return Complex(std::cos(x[0]) * std::cos(x[0]), 0.0); }, 3);
  CHECK(involution_defect(one, real_f, real_g).defect <= 1e-10);

  DeformedAlgebra eig(s, Weight::eigenvalue_phase(1.0));
  const auto y11 = CoeffVec::unit(eig.spectrum_ptr(), s->mode(1, 1));
  const auto y1m = CoeffVec::unit(eig.spectrum_ptr(), s->mode(1, -1));
  auto e = involution_defect(eig, y11, y1m);
  CHECK_FALSE(e.guaranteed);
  CHECK(e.defect >= 1e-3);
}

TEST_CASE("gauge automorphisms and generator") {
  DeformedAlgebra tri(torus(2, 6), Weight::torus_triphase(SkewMatrix::planar(0.3)));
  auto f = random_coeff_vec(tri.spectrum_ptr(), 5, 0.5, 3);
  auto g = random_coeff_vec(tri.spectrum_ptr(), 6, 0.5, 3);
  const auto chi = GaugeCharacter::torus({0.4, -1.1});
  CHECK(dist(gauge_automorphism(tri, chi, tri.star(f, g)), tri.star(gauge_automorphism(tri, chi, f), gauge_automorphism(tri, chi, g))) <= 1e-10);
  CHECK(dist(gauge_automorphism(tri, GaugeCharacter::trivial(), f), f) == 0.0);
  const auto chi2 = GaugeCharacter::torus({1.0, 0.5});
  CHECK(dist(gauge_automorphism(tri, chi, gauge_automorphism(tri, chi2, f)), gauge_automorphism(tri, chi * chi2, f)) < 1e-15);

  auto s = std::make_shared<const SphereBasis>(6);
  DeformedAlgebra eig(s, Weight::eigenvalue_phase(0.5));
  auto p = random_coeff_vec(eig.spectrum_ptr(), 7, 0.5, 3);
  auto q = random_coeff_vec(eig.spectrum_ptr(), 8, 0.5, 3);
  const auto az = GaugeCharacter::azimuthal(0.9);
  CHECK(dist(gauge_automorphism(eig, az, eig.star(p, q)), eig.star(gauge_automorphism(eig, az, p), gauge_automorphism(eig, az, q))) <= 1e-10);
  const auto deg = GaugeCharacter::exponential([](const Spectrum& sp, LabelId id) { return double(sp.label(id)[0]); }, 1.0);
  CHECK_THROWS_AS(gauge_automorphism(eig, deg, p), PreconditionError);

  // generator
  GaugeCharacter::Phase zero = [](const Spectrum&, LabelId) { return 0.0; };
  CHECK(gauge_generator(tri, zero, f).empty());
  const LabelId a0 = tri.tensor().spectrum().index_of(Label{1, 2});
  GaugeCharacter::Phase two = [a0](const Spectrum&, LabelId id) { return id == a0 ? 2.0 : 0.0; };
  auto single = CoeffVec::unit(tri.spectrum_ptr(), a0, Complex(0.5, 0.25));
  CHECK(gauge_generator(tri, two, single)[a0] == Complex(0.0, 2.0) * Complex(0.5, 0.25));
  GaugeCharacter::Phase lin = [](const Spectrum& sp, LabelId id) { return 0.3 * sp.label(id)[0] - 0.7 * sp.label(id)[1]; };
  const auto gen = gauge_generator(tri, lin, f);
  double prev = 0.0;
  for (double t : {1e-2, 1e-3}) {
    const auto step = gauge_automorphism(tri, GaugeCharacter::exponential(lin, t), f);
    const double err = hs_norm((1.0 / t) * (step - f) - gen);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(10.0).epsilon(0.02));
    prev = err;
  }
}

TEST_CASE("pullback homomorphism") {
  auto s = std::make_shared<const SphereBasis>(6);
  DeformedAlgebra eig(s, Weight::eigenvalue_phase(1.0));
  auto f = random_coeff_vec(eig.spectrum_ptr(), 9, 0.5, 3);
  auto g = random_coeff_vec(eig.spectrum_ptr(), 10, 0.5, 3);
  CHECK(pullback_homomorphism_defect(eig, SphereRotation::from_euler(0.2, 2.1, -0.4), f, g) <= 1e-8);
  CHECK(pullback_homomorphism_defect(eig, SphereRotation{}, f, g) <= 1e-14);

  auto t = torus(2, 6);
  DeformedAlgebra tri(t, Weight::torus_triphase(SkewMatrix::planar(0.3)));
  auto a = random_coeff_vec(tri.spectrum_ptr(), 9, 0.5, 3);
  auto b = random_coeff_vec(tri.spectrum_ptr(), 10, 0.5, 3);
  CHECK(pullback_homomorphism_defect(tri, TorusMap::translation({0.3, 0.6}), a, b) <= 1e-10);
  CHECK_THROWS_WITH_AS(pullback(tri, TorusMap::lattice({0, 1, 1, 0}, 2), a), doctest::Contains("equivariance criterion"),
                       PreconditionError);
}

TEST_CASE("synthesis round trip of a twisted product") {
  auto s = std::make_shared<const SphereBasis>(6);
  DeformedAlgebra eig(s, Weight::eigenvalue_phase(0.8));
  auto f = random_coeff_vec(eig.spectrum_ptr(), 12, 0.5, 3);
  auto g = random_coeff_vec(eig.spectrum_ptr(), 13, 0.5, 3);
  const auto p = eig.star(f, g);
  CHECK(dist(s->project([&](const Point& x) { return s->synthesize(p, x); }), p) <= 1e-10);
}

TEST_CASE("sobolev submultiplicativity ratio is stable") {
  DeformedAlgebra tri(torus(1, 16), Weight::one());
  auto ratio_max = [&](int samples, std::uint64_t base) {
    double m = 0.0;
    for (int i = 0; i < samples; ++i) {
      auto f = random_coeff_vec(tri.spectrum_ptr(), base + 2 * i, 1.0, 8);
      auto g = random_coeff_vec(tri.spectrum_ptr(), base + 2 * i + 1, 1.0, 8);
      m = std::max(m, hs_norm(tri.star(f, g), {1.0}) / (hs_norm(f, {1.0}) * hs_norm(g, {1.0})));
    }
    return m;
  };
  const double a = ratio_max(200, 1), b = ratio_max(400, 1);
  CHECK(b == doctest::Approx(a).epsilon(0.1));
}
