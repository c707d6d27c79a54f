#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "starspec/bases.hpp"
#include "starspec/errors.hpp"
#include "starspec/spectrum.hpp"

using namespace starspec;

namespace {

SpectrumPtr toy_spectrum() {
  // Two real modes with eigenvalues 0 and 2.
  std::vector<Spectrum::Entry> e(2);
  e[0].label = Label{0};
  e[0].conj_label = Label{0};
  e[0].eigenvalue = 0.0;
  e[1].label = Label{1};
  e[1].conj_label = Label{1};
  e[1].eigenvalue = 2.0;
  e[1].degree = 1;
  return std::make_shared<const Spectrum>(BasisKind::torus, 1, e);
}

double diff_norm(const CoeffVec& a, const CoeffVec& b) { return hs_norm(a - b); }

}  // namespace

TEST_CASE("hs_norm on hand examples") {
  auto sp = toy_spectrum();
  CHECK(hs_norm(CoeffVec(sp)) == 0.0);
  auto f = CoeffVec::unit(sp, 1);
  CHECK(hs_norm(f, {2.0}) == doctest::Approx(3.0).epsilon(1e-15));
  CoeffVec g(sp);
  g.set(0, 1.0);
  g.set(1, 1.0);
  CHECK(hs_norm(g, {1.0}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(hs_norm(g, {0.0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("hs_norm is a norm and monotone in the order") {
  TorusBasis t(2, 4);
  auto sp = t.spectrum_ptr();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto f = random_coeff_vec(sp, seed, 1.0);
    auto g = random_coeff_vec(sp, seed + 100, 1.0);
    const Complex a(0.3, -1.7);
    CHECK(hs_norm(a * f, {1.0}) == doctest::Approx(std::abs(a) * hs_norm(f, {1.0})).epsilon(1e-13));
    CHECK(hs_norm(f + g, {1.0}) <= hs_norm(f, {1.0}) + hs_norm(g, {1.0}) + 1e-12);
    CHECK(hs_norm(f, {0.5}) <= hs_norm(f, {1.5}));
  }
}

TEST_CASE("involution on torus and sphere labels") {
  TorusBasis t(2, 3);
  CoeffVec f(t.spectrum_ptr());
  const Complex z(1.5, -0.25);
  f.set(Label{1, -2}, z);
  auto fs = involution(f);
  CHECK(fs.nonzeros() == 1);
  CHECK(fs.at(Label{-1, 2}) == std::conj(z));

  SphereBasis s(3);
  CoeffVec g(s.spectrum_ptr());
  g.set(Label{3, 1}, z);
  g.set(Label{2, -2}, z);
  auto gs = involution(g);
  CHECK(gs.at(Label{3, -1}) == -std::conj(z));
  CHECK(gs.at(Label{2, 2}) == std::conj(z));
}

TEST_CASE("involution is an antilinear involution") {
  SphereBasis s(4);
  auto f = random_coeff_vec(s.spectrum_ptr(), 7, 1.0);
  auto g = random_coeff_vec(s.spectrum_ptr(), 8, 1.0);
  const Complex a(0.7, 2.0);
  CHECK(diff_norm(involution(involution(f)), f) < 1e-15);
  CHECK(diff_norm(involution(a * f + g), std::conj(a) * involution(f) + involution(g)) < 1e-14);
}

TEST_CASE("involution of a projected real function is itself") {
  SphereBasis s(5);
  auto f = s.project([](const Point& x) { return Complex(std::cos(x[0]) * std::sin(x[0]) * std::cos(2.0 * x[1]) + 0.5, 0.0); },
                     s.lmax());
  CHECK(diff_norm(involution(f), f) < 1e-12);

  TorusBasis t(1, 4);
  auto g = t.project([](const Point& x) { return Complex(std::sin(2.0 * M_PI * 3.0 * x[0]) - 2.0, 0.0); });
  CHECK(diff_norm(involution(g), g) < 1e-12);
}

TEST_CASE("dyadic blocks") {
  CHECK(dyadic_block(0.0) == 0);
  CHECK(dyadic_block(5.0) == 2);
  CHECK(dyadic_block(3.0) == 2);
  CHECK(dyadic_block(2.999) == 1);
  TorusBasis t(2, 5);
  auto f = random_coeff_vec(t.spectrum_ptr(), 3, 0.5);
  CoeffVec sum(t.spectrum_ptr());
  const int jmax = dyadic_block(t.spectrum().eigenvalues().back()) + 2;
  double blockwise = 0.0;
  std::size_t support = 0;
  for (int j = 0; j <= jmax; ++j) {
    auto p = dyadic_project(f, j);
    support += p.nonzeros();
    sum += p;
    const double n = hs_norm(p);
    blockwise += std::pow(2.0, 2.0 * j * 1.0) * n * n;
  }
  CHECK(support == f.nonzeros());
  CHECK(diff_norm(sum, f) == 0.0);
  // (1+lambda)^s lies in [2^{js}, 2^{(j+1)s}) on block j
  const double hs = hs_norm(f, {2.0});
  CHECK(hs * hs >= blockwise * (1.0 - 1e-12));
  CHECK(hs * hs <= 4.0 * blockwise);
}

TEST_CASE("random coefficient vectors") {
  SphereBasis s(4);
  auto a = random_coeff_vec(s.spectrum_ptr(), 42, 2.0);
  auto b = random_coeff_vec(s.spectrum_ptr(), 42, 2.0);
  auto c = random_coeff_vec(s.spectrum_ptr(), 43, 2.0);
  CHECK(diff_norm(a, b) == 0.0);
  CHECK(diff_norm(a, c) > 0.0);
  CHECK_THROWS_AS(random_coeff_vec(s.spectrum_ptr(), 1, 0.0), InvalidArgument);
  CHECK(std::isfinite(hs_norm(a, {1.0})));
  for (std::uint64_t seed = 1; seed < 6; ++seed) {
    CHECK(hs_norm(random_coeff_vec(s.spectrum_ptr(), seed, 3.0), {1.0}) <
          hs_norm(random_coeff_vec(s.spectrum_ptr(), seed, 2.0), {1.0}));
  }
  auto low = random_coeff_vec(s.spectrum_ptr(), 5, 1.0, 2);
  CHECK(low.max_degree() <= 2);
  // fixed stream: first coefficient is a pinned function of the seed
  CHECK(unit_interval(0) == 0.0);
  CHECK(unit_interval(~0ull) < 1.0);
}

TEST_CASE("spectrum validation") {
  std::vector<Spectrum::Entry> e(1);
  e[0].label = Label{1};
  e[0].conj_label = Label{-1};
  CHECK_THROWS_WITH_AS(Spectrum(BasisKind::torus, 1, e), doctest::Contains("conjugation leaves truncation"),
                       InvalidArgument);
  e[0].conj_label = Label{1};
  e[0].eigenvalue = -1.0;
  CHECK_THROWS_AS(Spectrum(BasisKind::torus, 1, e), InvalidArgument);
}

TEST_CASE("label text round trip") {
  const Label l{3, -1, 1};
  CHECK(format_label(BasisKind::su2, l) == "(3/2,-1/2,1/2)");
  CHECK(parse_label(BasisKind::su2, "(3/2,-1/2,1/2)") == l);
  CHECK(parse_label(BasisKind::su2, "(1.5,-0.5,0.5)") == l);
  CHECK(parse_label(BasisKind::sphere, format_label(BasisKind::sphere, Label{4, -3})) == Label{4, -3});
}
