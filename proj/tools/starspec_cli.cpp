// starspec command-line front end: build-fusion, verify, experiment.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "starspec/analysis.hpp"
#include "starspec/cache.hpp"
#include "starspec/errors.hpp"

using namespace starspec;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct Options {
  // backend
  std::string basis = "torus";
  int dim = 2;
  int nmax = 4;
  std::string radii;
  std::string lmax = "4";
  double drop_tol = kDefaultDropTol;
  std::string cache;
  // weights and inputs
  std::string weight;
  std::string policy = "truncate";
  std::uint64_t seed = 1;
  double s = 0.0;
  int samples = 20;
  int band = -1;
  double decay = 1.0;
  std::optional<double> tol;
  // outputs
  std::string report;
  std::string csv;
  std::string config;
  // build-fusion
  std::string out;
  std::optional<std::int64_t> timestamp;
  // verify
  std::string suite = "all";
  std::string lattice;
  // experiment
  std::string kind;
  std::string path;
  std::string t_grid = "0.4,0.2,0.1,0.05,0.025";
  std::string family = "a=(1,1+t)";
  std::string steps = "1e-4,5e-5";
  std::string fix = "coefficients";
  std::string jmat = "0.3";
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v)) {
      throw UsageError(std::string("malformed ") + what + ": '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what);
  return out;
}

std::shared_ptr<const Basis> make_basis(const Options& o) {
  if (o.basis == "torus") {
    std::vector<double> radii;
    if (!o.radii.empty()) radii = parse_list(o.radii, "radii");
    return std::make_shared<const TorusBasis>(o.dim, o.nmax, radii);
  }
  const double l = parse_list(o.lmax, "lmax").front();
  if (o.basis == "sphere") {
    if (l != std::floor(l) || l < 0) throw UsageError("sphere --lmax must be a non-negative integer");
    return std::make_shared<const SphereBasis>(static_cast<int>(l));
  }
  if (o.basis == "su2") {
    if (2 * l != std::floor(2 * l) || l < 0) throw UsageError("su2 --lmax must be a non-negative multiple of 1/2");
    return std::make_shared<const SU2Basis>(static_cast<int>(2 * l));
  }
  throw UsageError("unknown basis '" + o.basis + "'");
}

std::string default_weight(const Options& o) {
  if (!o.weight.empty()) return o.weight;
  if (o.basis == "torus") return o.dim >= 2 ? "triphase:J=0.3" : "one";
  if (o.basis == "su2") return "su2phase";
  return "eigenphase:c=1";
}

std::string cache_file_name(const Basis& b, double drop_tol) {
  std::string s = b.id() + "_tol" + format_number(drop_tol);
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
  return s + ".fus";
}

std::string cache_dir_path(const Basis& b, double drop_tol) {
  const char* dir = std::getenv("STARSPEC_CACHE_DIR");
  if (!dir || !*dir) return {};
  return (std::filesystem::path(dir) / cache_file_name(b, drop_tol)).string();
}

std::int64_t build_timestamp(const Options& o) {
  if (o.timestamp) return *o.timestamp;
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      return std::stoll(e);
    } catch (const std::logic_error&) {
      throw UsageError("SOURCE_DATE_EPOCH is not an integer");
    }
  }
  return 0;
}

// Loads the cache when one is configured and present, otherwise builds (and
// stores the build when a cache location is configured).
TensorPtr obtain_tensor(const Options& o, const Basis& b) {
  std::string path = o.cache.empty() ? cache_dir_path(b, o.drop_tol) : o.cache;
  if (!path.empty() && std::filesystem::exists(path)) {
    auto t = std::make_shared<const FusionTensor>(load_fusion_cache(path, b));
    if (t->metadata().drop_tol != o.drop_tol) throw InvalidArgument(path + ": cache drop tolerance differs from --drop-tol");
    return t;
  }
  auto t = std::make_shared<const FusionTensor>(b.build_fusion(o.drop_tol));
  if (!path.empty()) write_fusion_cache(path, *t, build_timestamp(o));
  return t;
}

LeakagePolicy policy_of(const Options& o) {
  return o.policy == "error" ? LeakagePolicy::error : LeakagePolicy::truncate;
}

Json backend_echo(const Options& o) {
  Json j = Json::object();
  j["basis"] = o.basis;
  if (o.basis == "torus") {
    j["dim"] = o.dim;
    j["nmax"] = o.nmax;
    j["radii"] = o.radii.empty() ? Json(nullptr) : Json(parse_list(o.radii, "radii"));
  } else {
    j["lmax"] = parse_list(o.lmax, "lmax").front();
  }
  j["drop_tol"] = o.drop_tol;
  return j;
}

void merge_echo(ExperimentReport& rep, const Json& extra) {
  for (const auto& [k, v] : extra.items()) rep.config_echo[k] = v;
}

int emit(const Options& o, const ExperimentReport& rep) {
  const std::string json = format_json(rep.to_json());
  if (o.report.empty()) {
    std::cout << json;
  } else {
    write_text_file(o.report, json);
  }
  if (!o.csv.empty()) write_text_file(o.csv, format_csv(rep));
  for (const auto& f : rep.flags) std::cerr << "flag: " << f << "\n";
  std::cerr << rep.experiment << ": " << (rep.pass ? "PASS" : "FAIL") << " (max_defect " << format_number(rep.max_defect)
            << ", threshold " << format_number(rep.threshold) << ", " << format_number(rep.wall_clock_seconds)
            << " s)\n";
  return rep.pass ? kExitPass : kExitFail;
}

// ---- build-fusion ---------------------------------------------------------

int cmd_build_fusion(const Options& o) {
  const auto b = make_basis(o);
  std::string out = o.out.empty() ? cache_dir_path(*b, o.drop_tol) : o.out;
  if (out.empty()) throw UsageError("build-fusion needs --out or STARSPEC_CACHE_DIR");
  const FusionTensor t = b->build_fusion(o.drop_tol);
  const auto info = write_fusion_cache(out, t, build_timestamp(o));
  Json j = Json::object();
  j["path"] = out;
  j["backend"] = info.backend;
  j["truncation"] = info.truncation;
  j["labels"] = info.labels;
  j["pairs"] = info.pairs;
  j["entries"] = info.entries;
  j["leaky_pairs"] = info.leaky_pairs;
  j["build_timestamp"] = info.build_timestamp;
  j["checksum"] = info.checksum;
  std::cout << format_json(j);
  return kExitPass;
}

// ---- verify ---------------------------------------------------------------

struct SuiteRow {
  std::string suite, check;
  double defect = 0.0, threshold = 0.0;
  bool pass = false;
  std::string note;
};

std::vector<CoeffVec> samples_of(const DeformedAlgebra& alg, std::uint64_t seed, int count, int band, double decay) {
  std::vector<CoeffVec> out;
  for (int i = 0; i < count; ++i) out.push_back(random_coeff_vec(alg.spectrum_ptr(), seed * 104729 + i, decay, band));
  return out;
}

IsometryAction random_symmetry(const Basis& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;
  switch (b.kind()) {
    case BasisKind::torus: {
      std::vector<double> v(static_cast<std::size_t>(b.dimension()));
      for (auto& x : v) x = u(rng);
      return TorusMap::translation(v);
    }
    case BasisKind::sphere: {
      const double a = two_pi * u(rng), beta = std::acos(2.0 * u(rng) - 1.0), g = two_pi * u(rng);
      return SphereRotation::from_euler(a, beta, g);
    }
    case BasisKind::su2:
      return SU2Translation{2.0 * two_pi * u(rng), 2.0 * two_pi * u(rng)};
  }
  throw InvalidArgument("unknown backend");
}

GaugeCharacter random_gauge(const Basis& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  switch (b.kind()) {
    case BasisKind::torus: {
      std::vector<double> th(static_cast<std::size_t>(b.dimension()));
      for (auto& x : th) x = u(rng);
      return GaugeCharacter::torus(th);
    }
    case BasisKind::sphere:
      return GaugeCharacter::azimuthal(u(rng));
    case BasisKind::su2: {
      const double a = u(rng);
      return GaugeCharacter::su2_torus(a, u(rng));
    }
  }
  throw InvalidArgument("unknown backend");
}

void suite_cocycle(const DeformedAlgebra& alg, const Options& o, std::vector<SuiteRow>& rows) {
  const double tol = o.tol.value_or(kPassThreshold);
  const auto adm = check_admissible(alg.weight(), alg.tensor());
  rows.push_back({"cocycle", "unimodularity", adm.unimodularity_defect, 1e-12, adm.unimodularity_defect <= 1e-12, ""});
  const auto sq = check_square_cocycle(alg.weight(), alg.tensor());
  std::string note = std::to_string(sq.squares) + " squares, " + std::to_string(sq.excluded) + " excluded";
  if (sq.square_defect > tol && sq.square_defect < kFailThreshold) note += ", inconclusive";
  rows.push_back({"cocycle", "square", sq.square_defect, tol, sq.square_defect <= tol, note});
  const auto sm = check_summed_cocycle(alg.weight(), alg.tensor());
  rows.push_back({"cocycle", "summed", sm.summed_defect, tol, sm.summed_defect <= tol,
                  std::to_string(sm.quadruples) + " quadruples, " + std::to_string(sm.excluded) + " excluded"});
}

void suite_assoc(const DeformedAlgebra& alg, const Options& o, std::vector<SuiteRow>& rows) {
  const double tol = o.tol.value_or(1e-9);
  const int band = o.band >= 0 ? o.band : alg.tensor().spectrum().max_degree() / 3;
  const auto strict = alg.with_policy(LeakagePolicy::error);
  const auto v = samples_of(alg, o.seed, 3 * o.samples, band, o.decay);
  double worst = 0.0;
  for (int i = 0; i < o.samples; ++i) worst = std::max(worst, associativity_defect(strict, v[3 * i], v[3 * i + 1], v[3 * i + 2], o.s));
  rows.push_back({"assoc", "associativity", worst, tol, worst <= tol,
                  std::to_string(o.samples) + " triples, band " + std::to_string(band)});
}

void suite_involution(const DeformedAlgebra& alg, const Options& o, std::vector<SuiteRow>& rows) {
  const double tol = o.tol.value_or(kPassThreshold);
  const double h = alg.hermitian_defect();
  rows.push_back({"involution", "hermitian_symmetry", h, kPassThreshold, alg.hermitian(),
                  alg.hermitian() ? "" : "hermitian-symmetry violation: conj omega(a,b,c) != omega(b,a,c)"});
  const int band = o.band >= 0 ? o.band : alg.tensor().spectrum().max_degree() / 2;
  const auto v = samples_of(alg, o.seed + 17, 2 * o.samples, band, o.decay);
  double worst = 0.0;
  for (int i = 0; i < o.samples; ++i) worst = std::max(worst, involution_defect(alg, v[2 * i], v[2 * i + 1], o.s).defect);
  rows.push_back({"involution", "star_compatibility", worst, tol, worst <= tol,
                  alg.hermitian() ? "" : "identity not expected for this weight"});
}

void suite_equivariance(const DeformedAlgebra& alg, const Options& o, std::vector<SuiteRow>& rows) {
  const double tol = o.tol.value_or(1e-8);
  std::vector<std::pair<std::string, IsometryAction>> maps;
  if (!o.lattice.empty()) {
    if (alg.basis().kind() != BasisKind::torus) throw UsageError("--lattice needs the torus backend");
    std::vector<int> m;
    for (double x : parse_list(o.lattice, "lattice matrix")) {
      if (x != std::round(x)) throw UsageError("--lattice entries must be integers");
      m.push_back(static_cast<int>(x));
    }
    maps.emplace_back("lattice " + o.lattice, TorusMap::lattice(m, static_cast<std::size_t>(alg.basis().dimension())));
  } else {
    std::mt19937_64 rng(o.seed);
    for (int i = 0; i < 10; ++i) maps.emplace_back("random symmetry " + std::to_string(i), random_symmetry(alg.basis(), rng));
  }
  const int band = o.band >= 0 ? o.band : alg.tensor().spectrum().max_degree() / 2;
  const auto v = samples_of(alg, o.seed + 29, 2 * o.samples, band, o.decay);
  double crit = 0.0, hom = 0.0;
  bool rejected = false;
  for (const auto& [name, h] : maps) {
    alg.basis().validate(h);
    const double d = check_equivariance(alg.weight(), alg.basis(), alg.tensor(), h);
    crit = std::max(crit, d);
    if (d > kPassThreshold) {
      rejected = true;
      continue;
    }
    for (int i = 0; i < o.samples; ++i) hom = std::max(hom, pullback_homomorphism_defect(alg, h, v[2 * i], v[2 * i + 1], o.s));
  }
  rows.push_back({"equivariance", "criterion", crit, kPassThreshold, !rejected,
                  rejected ? "weight is not invariant: pullback rejected" : std::to_string(maps.size()) + " maps"});
  rows.push_back({"equivariance", "pullback_homomorphism", hom, tol, hom <= tol, ""});
}

void suite_gauge(const DeformedAlgebra& alg, const Options& o, std::vector<SuiteRow>& rows) {
  const double tol = o.tol.value_or(kPassThreshold);
  std::mt19937_64 rng(o.seed + 41);
  const int band = o.band >= 0 ? o.band : alg.tensor().spectrum().max_degree() / 2;
  const auto v = samples_of(alg, o.seed + 43, 2 * o.samples, band, o.decay);
  double coc = 0.0, hom = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto chi = random_gauge(alg.basis(), rng);
    coc = std::max(coc, check_gauge_cocycle(chi, alg.tensor()));
    if (coc > 1e-12) continue;
    for (int i = 0; i < o.samples; ++i) {
      const auto& f = v[2 * i];
      const auto& g = v[2 * i + 1];
      const CoeffVec lhs = gauge_automorphism(alg, chi, alg.star(f, g));
      const CoeffVec rhs = alg.star(gauge_automorphism(alg, chi, f), gauge_automorphism(alg, chi, g));
      hom = std::max(hom, hs_norm(lhs - rhs, {o.s}));
    }
  }
  rows.push_back({"gauge", "one_cocycle", coc, 1e-12, coc <= 1e-12, ""});
  rows.push_back({"gauge", "homomorphism", hom, tol, hom <= tol, ""});
}

int cmd_verify(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  static const std::vector<std::string> all{"cocycle", "assoc", "involution", "equivariance", "gauge"};
  std::vector<std::string> suites;
  std::stringstream ss(o.suite);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "all") {
      suites.insert(suites.end(), all.begin(), all.end());
    } else if (std::find(all.begin(), all.end(), tok) != all.end()) {
      suites.push_back(tok);
    } else {
      throw UsageError("unknown suite '" + tok + "' (cocycle|assoc|involution|equivariance|gauge|all)");
    }
  }
  if (suites.empty()) throw UsageError("no suite selected");
  if (o.samples < 1) throw UsageError("--samples must be positive");

  const auto basis = make_basis(o);
  const DeformedAlgebra alg(basis, obtain_tensor(o, *basis), parse_weight(default_weight(o)), policy_of(o));
  std::vector<SuiteRow> rows;
  for (const auto& s : suites) {
    if (s == "cocycle") suite_cocycle(alg, o, rows);
    if (s == "assoc") suite_assoc(alg, o, rows);
    if (s == "involution") suite_involution(alg, o, rows);
    if (s == "equivariance") suite_equivariance(alg, o, rows);
    if (s == "gauge") suite_gauge(alg, o, rows);
  }

  ExperimentReport rep;
  rep.experiment = "verify";
  rep.config_echo = backend_echo(o);
  rep.config_echo["weight"] = alg.weight().describe();
  rep.config_echo["policy"] = o.policy;
  rep.config_echo["suites"] = suites;
  rep.config_echo["seed"] = o.seed;
  rep.config_echo["samples"] = o.samples;
  rep.config_echo["s"] = o.s;
  rep.pass = true;
  double worst_ratio = 0.0;
  for (const auto& r : rows) {
    Json j = Json::object();
    j["suite"] = r.suite;
    j["check"] = r.check;
    j["defect"] = r.defect;
    j["threshold"] = r.threshold;
    j["pass"] = r.pass;
    j["note"] = r.note;
    rep.rows.push_back(j);
    if (!r.pass) {
      rep.pass = false;
      rep.flags.push_back(r.suite + "/" + r.check + " failed" + (r.note.empty() ? "" : ": " + r.note));
    }
    // summary defect: the row closest to (or furthest past) its threshold
    const double ratio = r.threshold > 0.0 ? r.defect / r.threshold : 0.0;
    if (ratio >= worst_ratio) {
      worst_ratio = ratio;
      rep.max_defect = r.defect;
      rep.threshold = r.threshold;
    }
  }
  if (!alg.hermitian()) rep.extra["hermitian_defect"] = alg.hermitian_defect();
  rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return emit(o, rep);
}

// ---- experiment -----------------------------------------------------------

int default_band(const Options& o, const Spectrum& s, int cap) {
  if (o.band >= 0) return o.band;
  return std::min(cap, s.max_degree() / 2);
}

int cmd_experiment(const Options& o) {
  if (o.kind == "continuity") {
    const auto basis = make_basis(o);
    const std::string path_text = !o.path.empty() ? o.path : (o.basis == "torus" ? "triphase:J=0.1" : "eigenphase:c=0.1");
    const WeightPath path = WeightPath::parse(path_text);
    const DeformedAlgebra alg(basis, obtain_tensor(o, *basis), Weight::one(), policy_of(o));
    const int band = default_band(o, alg.tensor().spectrum(), 2);
    const auto f = random_coeff_vec(alg.spectrum_ptr(), o.seed * 2, o.decay, band);
    const auto g = random_coeff_vec(alg.spectrum_ptr(), o.seed * 2 + 1, o.decay, band);
    ContinuityOptions opt;
    opt.s = o.s;
    if (o.tol) opt.norm_band = *o.tol;
    if (o.s <= basis->dimension() / 2.0) std::cerr << "warning: s <= n/2, outside the regime of the continuity claim\n";
    auto rep = continuity_sweep(path, alg, f, g, parse_list(o.t_grid, "t grid"), opt);
    merge_echo(rep, backend_echo(o));
    rep.config_echo["seed"] = o.seed;
    rep.config_echo["band"] = band;
    rep.config_echo["decay"] = o.decay;
    return emit(o, rep);
  }
  if (o.kind == "metric") {
    const auto fam = FlatMetricFamily::parse(o.family);
    const TorusBasis b0(fam.dimension(), o.nmax, fam.radii(0.0));
    const int band = o.band >= 0 ? o.band : o.nmax / 2;
    const auto f = random_coeff_vec(b0.spectrum_ptr(), o.seed * 2, o.decay, band);
    const auto g = random_coeff_vec(b0.spectrum_ptr(), o.seed * 2 + 1, o.decay, band);
    MetricOptions opt;
    opt.s = o.s;
    if (o.tol) opt.rel_tol = *o.tol;
    if (o.fix != "coefficients" && o.fix != "function") throw UsageError("--fix must be coefficients or function");
    opt.fix = o.fix == "function" ? MetricFix::function : MetricFix::coefficients;
    const Weight w = parse_weight(o.weight.empty() ? "eigenphase:c=0.01" : o.weight);
    auto rep = metric_derivative_fd(fam, o.nmax, w, f, g, parse_list(o.steps, "step grid"), opt);
    rep.config_echo["seed"] = o.seed;
    rep.config_echo["band"] = band;
    rep.config_echo["decay"] = o.decay;
    return emit(o, rep);
  }
  if (o.kind == "rieffel") {
    if (o.basis != "torus") throw UsageError("rieffel runs on the torus backend");
    const SkewMatrix j = parse_skew_matrix(o.jmat);
    if (j.dim != o.dim) throw UsageError("--J dimension does not match --dim");
    const auto basis = make_basis(o);
    const DeformedAlgebra alg(basis, obtain_tensor(o, *basis), Weight::torus_triphase(j), policy_of(o));
    const int band = o.band >= 0 ? o.band : o.nmax / 2;
    auto rep = rieffel_experiment(alg, j, static_cast<std::size_t>(o.samples), o.seed, band, o.tol.value_or(1e-12));
    merge_echo(rep, backend_echo(o));
    return emit(o, rep);
  }
  if (o.kind == "sobolev") {
    const auto basis = make_basis(o);
    const DeformedAlgebra alg(basis, obtain_tensor(o, *basis), parse_weight(default_weight(o)), policy_of(o));
    SobolevOptions opt;
    opt.s = o.s;
    opt.samples = static_cast<std::size_t>(o.samples);
    opt.seed = o.seed;
    opt.band = o.band;
    opt.decay = o.decay;
    if (o.tol) opt.growth_tol = *o.tol;
    if (o.s <= basis->dimension() / 2.0) std::cerr << "warning: s <= n/2, no boundedness is expected\n";
    auto rep = sobolev_ratio_experiment(alg, opt);
    merge_echo(rep, backend_echo(o));
    return emit(o, rep);
  }
  throw UsageError("unknown experiment '" + o.kind + "' (continuity|metric|rieffel|sobolev)");
}

// ---- config ---------------------------------------------------------------

std::string json_scalar(const nlohmann::json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer() || v.is_number_unsigned() || v.is_boolean()) return v.dump();
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_array()) {
    // matrices stay JSON, flat lists become comma-separated
    bool nested = false;
    for (const auto& x : v) nested = nested || x.is_array();
    if (nested) return v.dump();
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + json_scalar(v[i], key);
    return s;
  }
  throw UsageError("config key '" + key + "' has an unsupported value");
}

// Config values fill options the command line left unset.
void apply_config(CLI::App* sub, const std::string& path) {
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": malformed JSON config (" + e.what() + ")");
  }
  if (!cfg.is_object()) throw UsageError(path + ": config must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    CLI::Option* opt = name == "config" ? nullptr : sub->get_option_no_throw("--" + name);
    if (!opt) throw UsageError(path + ": unknown config key '" + key + "'");
    if (opt->count() > 0) continue;
    opt->add_result(json_scalar(value, key));
    opt->run_callback();
  }
}

void add_backend(CLI::App* c, Options& o) {
  c->add_option("--basis", o.basis, "torus | sphere | su2")->check(CLI::IsMember({"torus", "sphere", "su2"}));
  c->add_option("--dim", o.dim, "torus dimension")->check(CLI::Range(1, 4));
  c->add_option("--nmax", o.nmax, "torus truncation |n|_inf <= N")->check(CLI::NonNegativeNumber);
  c->add_option("--radii", o.radii, "torus metric radii a_1,...,a_d");
  c->add_option("--lmax", o.lmax, "sphere l_max, or SU(2) l_max in steps of 1/2");
  c->add_option("--drop-tol", o.drop_tol, "fusion coefficients below this are dropped")->check(CLI::NonNegativeNumber);
}

void add_common(CLI::App* c, Options& o) {
  add_backend(c, o);
  c->add_option("--cache", o.cache, "fusion cache to load, or to create when absent");
  c->add_option("--weight", o.weight, "weight spec, e.g. eigenphase:c=1, triphase:J=0.3, su2phase");
  c->add_option("--policy", o.policy, "truncate | error")->check(CLI::IsMember({"truncate", "error"}));
  c->add_option("--seed", o.seed, "seed for random inputs");
  c->add_option("--s", o.s, "Sobolev order for defects");
  c->add_option("--samples", o.samples, "number of random samples");
  c->add_option("--band", o.band, "degree bound of random inputs");
  c->add_option("--decay", o.decay, "coefficient decay (1+lambda)^-decay")->check(CLI::PositiveNumber);
  c->add_option("--tol", o.tol, "override the pass threshold");
  c->add_option("--report", o.report, "JSON report path (default: stdout)");
  c->add_option("--csv", o.csv, "CSV rows path");
  c->add_option("--config", o.config, "JSON file with option values");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral deformation engine"};
  app.set_version_flag("--version", STARSPEC_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->take_last();
  Options o;

  auto* build = app.add_subcommand("build-fusion", "build a fusion tensor and write a SPECFUS1 cache");
  add_backend(build, o);
  build->add_option("--out", o.out, "output file (default: STARSPEC_CACHE_DIR)");
  build->add_option("--timestamp", o.timestamp, "build timestamp recorded in the header (default SOURCE_DATE_EPOCH or 0)");
  build->add_option("--config", o.config, "JSON file with option values");

  auto* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify, o);
  verify->add_option("--suite", o.suite, "cocycle|assoc|involution|equivariance|gauge|all (comma separated)");
  verify->add_option("--lattice", o.lattice, "torus lattice map, row-major integers, for the equivariance suite");

  auto* exper = app.add_subcommand("experiment", "run an analysis experiment");
  add_common(exper, o);
  exper->add_option("kind", o.kind, "continuity | metric | rieffel | sobolev")->required();
  exper->add_option("--path", o.path, "weight path: eigenphase:c=... or triphase:J=...");
  exper->add_option("--t-grid", o.t_grid, "comma-separated t values in [0, 1]");
  exper->add_option("--family", o.family, "flat metric family, e.g. a=(1,1+t)");
  exper->add_option("--steps", o.steps, "finite-difference steps");
  exper->add_option("--fix", o.fix, "coefficients | function");
  exper->add_option("--J", o.jmat, "Rieffel matrix (scalar for d = 2, or nested JSON)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitUsage;
  }

  try {
    CLI::App* sub = build->parsed() ? build : verify->parsed() ? verify : exper;
    if (!o.config.empty()) apply_config(sub, o.config);
    if (sub == build) return cmd_build_fusion(o);
    if (sub == verify) return cmd_verify(o);
    return cmd_experiment(o);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const PreconditionError& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kExitFail;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
