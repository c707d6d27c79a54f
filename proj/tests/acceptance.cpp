// One PASS/FAIL line per acceptance criterion. Optional argv[1]: path of the
// starspec CLI, used for the exit-code and report-determinism checks.
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>
#include <string>

#include "starspec/analysis.hpp"
#include "starspec/angular.hpp"
#include "starspec/cache.hpp"
#include "starspec/errors.hpp"
#include "starspec/quadrature.hpp"

using namespace starspec;

namespace {

constexpr double kPi = std::numbers::pi;
std::string g_cli;

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [failed]");
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

DeformedAlgebra make(std::shared_ptr<const Basis> b, Weight w, LeakagePolicy p = LeakagePolicy::truncate) {
  return DeformedAlgebra(std::move(b), std::move(w), p);
}

int run_cli(const std::string& args) {
  const std::string cmd = "\"" + g_cli + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// 1. U_j * U_k = e^{2 pi i Theta_jk} U_k * U_j
Outcome check_connes_landi() {
  Outcome o;
  auto t2 = std::make_shared<const TorusBasis>(2, 3);
  double worst = 0.0;
  for (double th : {0.1, 0.25, 0.5}) {
    const auto alg = make(t2, Weight::nc_torus(SkewMatrix::planar(th)));
    worst = std::max(worst, std::abs(commutation_defect(alg, 0, 1) - std::polar(1.0, 2 * kPi * th)));
    worst = std::max(worst, std::abs(commutation_defect(alg, 1, 0) - std::polar(1.0, -2 * kPi * th)));
  }
  o.require(worst <= 1e-12, "d=2 max error " + num(worst));
  const SkewMatrix theta(3, {0, 0.1, 0.25, -0.1, 0, 0.5, -0.25, -0.5, 0});
  const auto alg = make(std::make_shared<const TorusBasis>(3, 2), Weight::nc_torus(theta));
  double w3 = 0.0;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) w3 = std::max(w3, std::abs(commutation_defect(alg, j, k) - std::polar(1.0, 2 * kPi * theta(j, k))));
  o.require(w3 <= 1e-12, "all d=3 generator pairs " + num(w3));
  return o;
}

double assoc_max(const DeformedAlgebra& alg, int band, std::uint64_t seed0) {
  double worst = 0.0;
  const auto sp = alg.spectrum_ptr();
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = random_coeff_vec(sp, seed0 + 3 * s, 1.0, band);
    const auto g = random_coeff_vec(sp, seed0 + 3 * s + 1, 1.0, band);
    const auto h = random_coeff_vec(sp, seed0 + 3 * s + 2, 1.0, band);
    worst = std::max(worst, associativity_defect(alg, f, g, h));
  }
  return worst;
}

// 2. associativity <=> cocycle
Outcome check_associativity() {
  Outcome o;
  auto torus = std::make_shared<const TorusBasis>(2, 6);
  auto sphere = std::make_shared<const SphereBasis>(6);
  auto su2 = std::make_shared<const SU2Basis>(6);
  const auto tri = Weight::torus_triphase(SkewMatrix::planar(0.3));
  const double a1 = assoc_max(make(torus, tri, LeakagePolicy::error), 2, 100);
  const double a2 = assoc_max(make(sphere, Weight::eigenvalue_phase(1.0), LeakagePolicy::error), 2, 200);
  const double a3 = assoc_max(make(su2, Weight::su2_phase(), LeakagePolicy::error), 2, 300);
  o.require(a1 <= 1e-9, "triphase " + num(a1));
  o.require(a2 <= 1e-9, "eigenphase " + num(a2));
  o.require(a3 <= 1e-9, "su2phase " + num(a3));
  const auto pert = Weight::perturbed(tri, 1e-2, 11);
  const auto palg = make(torus, pert, LeakagePolicy::error);
  const double ap = assoc_max(palg, 2, 400);
  o.require(ap >= 1e-5, "perturbed assoc " + num(ap));
  const double sq = check_square_cocycle(pert, palg.tensor()).square_defect;
  o.require(sq >= 1e-4, "perturbed square defect " + num(sq));
  return o;
}

// 3. group law
Outcome check_group_law() {
  Outcome o;
  TorusBasis tb(2, 4);
  SphereBasis sb(4);
  const auto tt = tb.build_fusion();
  const auto ts = sb.build_fusion();
  const auto a = Weight::torus_triphase(SkewMatrix::planar(0.3));
  const auto b = Weight::nc_torus(SkewMatrix::planar(0.2));
  const auto e = Weight::eigenvalue_phase(0.7);
  double worst = 0.0;
  for (const auto& w : {weight_mul(a, b), weight_mul(a, e), weight_inv(a), weight_inv(weight_mul(b, e))})
    worst = std::max(worst, check_square_cocycle(w, tt).square_defect);
  for (const auto& w : {weight_mul(e, Weight::eigenvalue_phase(-0.2)), weight_inv(e)})
    worst = std::max(worst, check_square_cocycle(w, ts).square_defect);
  o.require(worst <= 1e-12, "square defect of products/inverses " + num(worst));
  double unit = 0.0;
  const Spectrum& s = tb.spectrum();
  for (const auto& t : sample_admissible_triples(tt, 1000, 7)) {
    unit = std::max(unit, std::abs(weight_mul(a, weight_inv(a))(s, t[0], t[1], t[2]) - 1.0));
  }
  const Spectrum& ss = sb.spectrum();
  for (const auto& t : sample_admissible_triples(ts, 1000, 8)) {
    unit = std::max(unit, std::abs(weight_mul(e, weight_inv(e))(ss, t[0], t[1], t[2]) - 1.0));
  }
  o.require(unit <= 1e-15, "w inv(w) - 1 over 2000 triples " + num(unit));
  return o;
}

// 4. Rieffel coefficient identity
Outcome check_rieffel() {
  Outcome o;
  double worst = 0.0;
  auto t2 = std::make_shared<const TorusBasis>(2, 6);
  for (double j : {0.1, 0.3}) {
    const SkewMatrix jm = SkewMatrix::planar(j);
    const auto rep = rieffel_experiment(make(t2, Weight::torus_triphase(jm)), jm, 20, 5, 3);
    worst = std::max(worst, rep.max_defect);
  }
  const SkewMatrix j3(3, {0, 0.1, 0.3, -0.1, 0, 0.1, -0.3, -0.1, 0});
  const auto rep = rieffel_experiment(make(std::make_shared<const TorusBasis>(3, 3), Weight::torus_triphase(j3)), j3, 20, 6, 1);
  worst = std::max(worst, rep.max_defect);
  o.require(worst <= 1e-12, "channelwise max over 60 pairs " + num(worst));
  return o;
}

// 5. sphere fusion vs an independent quadrature
Outcome check_sphere_fusion() {
  Outcome o;
  const int L = 6;
  SphereBasis sb(L);
  const auto t = sb.build_fusion();
  const std::size_t n = sb.spectrum().size();
  // product of three harmonics: degree <= 3L in cos(theta), |m| <= 3L in phi
  const auto gl = gauss_legendre(3 * L / 2 + 1);
  const int nphi = 3 * L + 1;
  std::vector<std::vector<std::complex<double>>> y;
  std::vector<double> w;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i)
    for (int k = 0; k < nphi; ++k) {
      y.push_back(angular::spherical_harmonics_upto(L, std::acos(gl.nodes[i]), 2 * kPi * k / nphi));
      w.push_back(gl.weights[i] * 2 * kPi / nphi);
    }
  double worst = 0.0;
  bool rules = true;
  for (LabelId a = 0; a < n; ++a)
    for (LabelId b = 0; b < n; ++b) {
      const Label la = sb.spectrum().label(a), lb = sb.spectrum().label(b);
      std::vector<Complex> q(n);
      for (std::size_t p = 0; p < w.size(); ++p) {
        const Complex ab = w[p] * y[p][a] * y[p][b];
        for (LabelId c = 0; c < n; ++c) q[c] += ab * std::conj(y[p][c]);
      }
      for (LabelId c = 0; c < n; ++c) worst = std::max(worst, std::abs(t.coefficient(a, b, c) - q[c]));
      for (const auto& e : t.channels(a, b)) {
        const Label lc = sb.spectrum().label(e.out);
        rules = rules && lc[1] == la[1] + lb[1] && lc[0] >= std::abs(la[0] - lb[0]) && lc[0] <= la[0] + lb[0] &&
                (la[0] + lb[0] + lc[0]) % 2 == 0;
      }
    }
  o.require(worst <= 1e-10, "lmax 6 max entry error " + num(worst));
  o.require(rules, "triangle, m-additivity and parity on every stored entry");
  double orth = 0.0;
  for (int tj1 = 0; tj1 <= 12; ++tj1)
    for (int tj2 = 0; tj2 <= 12; ++tj2)
      for (int tj3 = std::abs(tj1 - tj2); tj3 <= tj1 + tj2; tj3 += 2)
        for (int tk3 = std::abs(tj1 - tj2); tk3 <= tj1 + tj2; tk3 += 2)
          for (int tm3 = -std::min(tj3, tk3); tm3 <= std::min(tj3, tk3); tm3 += 2) {
            double sum = 0.0;
            for (int tm1 = -tj1; tm1 <= tj1; tm1 += 2) {
              const int tm2 = -tm1 - tm3;
              if (std::abs(tm2) > tj2) continue;
              sum += angular::wigner3j_2(tj1, tj2, tj3, tm1, tm2, tm3) * angular::wigner3j_2(tj1, tj2, tk3, tm1, tm2, tm3);
            }
            orth = std::max(orth, std::abs((tj3 + 1) * sum - (tj3 == tk3 ? 1.0 : 0.0)));
          }
  o.require(orth <= 1e-12, "3j orthogonality for j <= 6 " + num(orth));
  return o;
}

// 6. equivariance
Outcome check_equivariance() {
  Outcome o;
  const auto alg = make(std::make_shared<const SphereBasis>(6), Weight::eigenvalue_phase(1.0));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto r = SphereRotation::from_euler(2 * kPi * u(rng), std::acos(2 * u(rng) - 1), 2 * kPi * u(rng));
    const auto f = random_coeff_vec(alg.spectrum_ptr(), 50 + 2 * i, 1.0, 3);
    const auto g = random_coeff_vec(alg.spectrum_ptr(), 51 + 2 * i, 1.0, 3);
    worst = std::max(worst, pullback_homomorphism_defect(alg, r, f, g));
  }
  o.require(worst <= 1e-8, "10 rotations, homomorphism defect " + num(worst));
  const auto tor = make(std::make_shared<const TorusBasis>(2, 4), Weight::torus_triphase(SkewMatrix::planar(0.3)));
  const auto swap = TorusMap::lattice({0, 1, 1, 0}, 2);
  const double d = check_equivariance(tor.weight(), tor.basis(), tor.tensor(), swap);
  bool rejected = false;
  try {
    (void)pullback(tor, swap, CoeffVec::unit(tor.spectrum_ptr(), 0));
  } catch (const PreconditionError&) {
    rejected = true;
  }
  o.require(d > 1e-6 && rejected, "swap map (A^T J A = -J) defect " + num(d) + (rejected ? ", rejected" : ", accepted"));
  return o;
}

// 7. continuity
Outcome check_continuity() {
  Outcome o;
  const std::vector<double> grid{0.4, 0.2, 0.1, 0.05, 0.025};
  const auto ta = make(std::make_shared<const TorusBasis>(2, 4), Weight::one());
  const auto sa = make(std::make_shared<const SphereBasis>(6), Weight::one());
  const auto r1 = continuity_sweep(WeightPath::torus_triphase(SkewMatrix::planar(0.1)), ta,
                                   random_coeff_vec(ta.spectrum_ptr(), 1, 1.0, 2),
                                   random_coeff_vec(ta.spectrum_ptr(), 2, 1.0, 2), grid, {2.0});
  const auto r2 = continuity_sweep(WeightPath::eigenvalue_phase(0.1), sa, random_coeff_vec(sa.spectrum_ptr(), 3, 1.0, 2),
                                   random_coeff_vec(sa.spectrum_ptr(), 4, 1.0, 2), grid, {2.0});
  for (const auto* r : {&r1, &r2}) {
    o.require(r->pass, (r == &r1 ? std::string("torus J-path") : std::string("sphere c-path")) + " ratios [" +
                           num(r->extra["ratio_min"].get<double>()) + ", " + num(r->extra["ratio_max"].get<double>()) +
                           "], norm band " + num(r->max_defect));
  }
  return o;
}

// 8. metric derivative
Outcome check_metric() {
  Outcome o;
  const auto fam = FlatMetricFamily::parse("a=(1,1+t)");
  TorusBasis b0(2, 6);
  const auto f = random_coeff_vec(b0.spectrum_ptr(), 61, 1.0, 3);
  const auto g = random_coeff_vec(b0.spectrum_ptr(), 62, 1.0, 3);
  const auto rep = metric_derivative_fd(fam, 6, Weight::eigenvalue_phase(0.01), f, g, {1e-4, 5e-5});
  const double err = rep.rows[0]["error"].get<double>();
  const double ratio = rep.rows[1]["richardson"].get<double>();
  o.require(err <= 1e-6, "relative error at 1e-4 " + num(err));
  o.require(ratio >= 3.5 && ratio <= 4.5, "Richardson ratio " + num(ratio));
  return o;
}

// 9. involution
Outcome check_involution() {
  Outcome o;
  double worst = 0.0;
  const std::vector<DeformedAlgebra> algs{
      make(std::make_shared<const TorusBasis>(2, 4), Weight::torus_triphase(SkewMatrix::planar(0.3))),
      make(std::make_shared<const TorusBasis>(2, 4), Weight::nc_torus(SkewMatrix::planar(0.25))),
      make(std::make_shared<const SphereBasis>(4), Weight::one()),
      make(std::make_shared<const SU2Basis>(4), Weight::su2_phase()),
  };
  for (const auto& alg : algs) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto f = random_coeff_vec(alg.spectrum_ptr(), 70 + s, 1.0, 2);
      const auto g = random_coeff_vec(alg.spectrum_ptr(), 90 + s, 1.0, 2);
      const auto d = involution_defect(alg, f, g);
      worst = std::max(worst, d.guaranteed ? d.defect : 1.0);
    }
  }
  o.require(worst <= 1e-10, "Hermitian weights " + num(worst));
  auto sb = std::make_shared<const SphereBasis>(4);
  const auto eig = make(sb, Weight::eigenvalue_phase(1.0));
  const Spectrum& s = sb->spectrum();
  const Weight& w = eig.weight();
  const LabelId a = sb->mode(1, 1), b = sb->mode(1, -1), c = sb->mode(2, 0);
  const double triple = std::abs(std::conj(w(s, a, b, c)) - w(s, b, a, c));
  o.require(triple >= 1e-3 && !eig.hermitian(), "eigenphase violation on l=(1,1,2): " + num(triple));
  if (g_cli.empty()) {
    o.require(false, "CLI exit code not checked (no binary given)");
  } else {
    const int rc = run_cli("verify --basis sphere --lmax 4 --weight eigenphase:c=1 --suite involution");
    o.require(rc == 1, "CLI involution suite exit " + std::to_string(rc));
  }
  return o;
}

// 10. gauge automorphisms
Outcome check_gauge() {
  Outcome o;
  const auto ta = make(std::make_shared<const TorusBasis>(2, 4), Weight::torus_triphase(SkewMatrix::planar(0.3)));
  const auto sa = make(std::make_shared<const SphereBasis>(4), Weight::eigenvalue_phase(1.0));
  const auto chi_t = GaugeCharacter::torus({0.7, -1.3});
  const auto chi_s = GaugeCharacter::azimuthal(0.9);
  const double c1 = check_gauge_cocycle(chi_t, ta.tensor());
  const double c2 = check_gauge_cocycle(chi_s, sa.tensor());
  o.require(std::max(c1, c2) <= 1e-12, "1-cocycle " + num(std::max(c1, c2)));
  double hom = 0.0;
  for (const auto& [alg, chi] : {std::pair{&ta, &chi_t}, std::pair{&sa, &chi_s}}) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto f = random_coeff_vec(alg->spectrum_ptr(), 110 + s, 1.0, 2);
      const auto g = random_coeff_vec(alg->spectrum_ptr(), 130 + s, 1.0, 2);
      const CoeffVec lhs = gauge_automorphism(*alg, *chi, alg->star(f, g));
      const CoeffVec rhs = alg->star(gauge_automorphism(*alg, *chi, f), gauge_automorphism(*alg, *chi, g));
      hom = std::max(hom, hs_norm(lhs - rhs));
    }
  }
  o.require(hom <= 1e-10, "homomorphism " + num(hom));
  // generator: ||(chi_t f - f)/t - i theta f|| = O(t)
  const GaugeCharacter::Phase theta = [](const Spectrum& s, LabelId id) { return 0.7 * s.label(id)[0] - 1.3 * s.label(id)[1]; };
  const auto f = random_coeff_vec(ta.spectrum_ptr(), 150, 1.0, 2);
  const CoeffVec gen = gauge_generator(ta, theta, f);
  auto err = [&](double t) {
    CoeffVec d = gauge_automorphism(ta, GaugeCharacter::exponential(theta, t), f) - f;
    d *= 1.0 / t;
    return hs_norm(d - gen);
  };
  const double r = err(1e-2) / err(5e-3);
  o.require(r >= 1.9 && r <= 2.1, "generator FD ratio per halving " + num(r));
  return o;
}

// 11. determinism
Outcome check_determinism() {
  Outcome o;
  auto report = [] {
    const auto alg = make(std::make_shared<const SphereBasis>(6), Weight::one());
    const auto r = continuity_sweep(WeightPath::eigenvalue_phase(0.1), alg, random_coeff_vec(alg.spectrum_ptr(), 3, 1.0, 2),
                                    random_coeff_vec(alg.spectrum_ptr(), 4, 1.0, 2), {0.4, 0.2, 0.1}, {2.0});
    return format_json(r.to_json()) + format_csv(r);
  };
  o.require(report() == report(), "report bytes");
  bool same = true;
  std::vector<std::shared_ptr<const Basis>> bases{std::make_shared<const TorusBasis>(2, 6),
                                                  std::make_shared<const SphereBasis>(6),
                                                  std::make_shared<const SU2Basis>(6)};
  for (const auto& b : bases) {
    const auto c1 = fusion_cache_text(b->build_fusion(kDefaultDropTol, Execution::parallel), 0);
    const auto c2 = fusion_cache_text(b->build_fusion(kDefaultDropTol, Execution::serial), 0);
    same = same && fnv1a64(c1) == fnv1a64(c2);
  }
  o.require(same, "cache checksums (parallel and serial builds, 3 backends)");
  if (g_cli.empty()) {
    o.require(false, "CLI reports not checked (no binary given)");
  } else {
    const auto dir = std::filesystem::temp_directory_path() / "starspec_acceptance";
    std::filesystem::create_directories(dir);
    const std::string d = dir.string();
    bool ok = true;
    for (int i = 1; i <= 2; ++i) {
      const std::string k = std::to_string(i);
      ok = ok && run_cli("verify --basis torus --dim 2 --nmax 4 --suite all --seed 9 --report " + d + "/v" + k + ".json") == 0;
      ok = ok && run_cli("experiment metric --nmax 6 --report " + d + "/m" + k + ".json --csv " + d + "/m" + k + ".csv") == 0;
      ok = ok && run_cli("build-fusion --basis sphere --lmax 5 --out " + d + "/s" + k + ".fus") == 0;
    }
    for (const char* f : {"v", "m"}) ok = ok && read_text_file(d + "/" + f + "1.json") == read_text_file(d + "/" + f + "2.json");
    ok = ok && read_text_file(d + "/m1.csv") == read_text_file(d + "/m2.csv");
    ok = ok && read_fusion_cache_info(d + "/s1.fus").checksum == read_fusion_cache_info(d + "/s2.fus").checksum;
    ok = ok && read_text_file(d + "/s1.fus") == read_text_file(d + "/s2.fus");
    std::filesystem::remove_all(dir);
    o.require(ok, "CLI reports and caches byte-identical");
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria{
      {"Connes-Landi relations", check_connes_landi},
      {"associativity <=> cocycle", check_associativity},
      {"group law", check_group_law},
      {"Rieffel coefficient identity", check_rieffel},
      {"sphere fusion correctness", check_sphere_fusion},
      {"equivariance", check_equivariance},
      {"continuity", check_continuity},
      {"metric derivative", check_metric},
      {"*-structure", check_involution},
      {"gauge automorphisms", check_gauge},
      {"determinism", check_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome r;
    try {
      r = criteria[i].run();
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    if (!r.pass) ++failed;
    std::printf("%s %2zu %s: %s\n", r.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, r.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
