#include "starspec/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>

#include "json.hpp"
#include "starspec/errors.hpp"

namespace starspec {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string matrix_text(const SkewMatrix& j) {
  std::string s = "[";
  for (int r = 0; r < j.dim; ++r) {
    s += r ? ",[" : "[";
    for (int c = 0; c < j.dim; ++c) {
      if (c) s += ',';
      s += fmt(j(r, c));
    }
    s += ']';
  }
  return s + "]";
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

void require_torus(const Spectrum& s, const SkewMatrix& j, const char* what) {
  if (s.kind() != BasisKind::torus) throw InvalidArgument(std::string(what) + " weight needs a torus spectrum");
  if (s.size() && s.label(0).rank != j.dim) throw InvalidArgument(std::string(what) + " matrix dimension does not match torus");
}

}  // namespace

SkewMatrix::SkewMatrix(int d, std::vector<double> values) : dim(d), entries(std::move(values)) {
  if (d < 1 || entries.size() != static_cast<std::size_t>(d * d)) throw InvalidArgument("skew matrix must be d x d");
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      if (!std::isfinite((*this)(i, k))) throw InvalidArgument("skew matrix entries must be finite");
      if ((*this)(i, k) + (*this)(k, i) != 0.0) throw InvalidArgument("matrix is not skew-symmetric (J + J^T != 0)");
    }
  }
}

SkewMatrix SkewMatrix::planar(double j12) { return SkewMatrix(2, {0.0, j12, -j12, 0.0}); }

SkewMatrix SkewMatrix::scaled(double s) const {
  SkewMatrix out = *this;
  for (auto& v : out.entries) v *= s;
  for (auto& v : out.entries) v = v == 0.0 ? 0.0 : v;  // no negative zeros in descriptions
  return out;
}

double SkewMatrix::form(const Label& x, const Label& y) const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < dim; ++k) s += x[i] * (*this)(i, k) * y[k];
  return s;
}

struct Weight::Node {
  virtual ~Node() = default;
  virtual Complex eval(const Spectrum& s, LabelId a, LabelId b, LabelId c) const = 0;
  virtual WeightFamily family() const = 0;
  virtual bool hermitian() const = 0;
  virtual std::string describe() const = 0;
  virtual void validate(const Spectrum&) const {}
  virtual std::optional<double> rate() const { return 0.0; }
};

namespace {

struct OneNode final : Weight::Node {
  Complex eval(const Spectrum&, LabelId, LabelId, LabelId) const override { return 1.0; }
  WeightFamily family() const override { return WeightFamily::constant_one; }
  bool hermitian() const override { return true; }
  std::string describe() const override { return "one"; }
};

struct EigenPhaseNode final : Weight::Node {
  double c;
  explicit EigenPhaseNode(double c_) : c(c_) {}
  Complex eval(const Spectrum& s, LabelId a, LabelId b, LabelId g) const override {
    return std::polar(1.0, c * (s.eigenvalue(a) + s.eigenvalue(b) - s.eigenvalue(g)));
  }
  WeightFamily family() const override { return WeightFamily::eigenvalue_phase; }
  // conj omega(a,b,c) = omega(b,a,c) fails unless the phase vanishes
  bool hermitian() const override { return c == 0.0; }
  std::string describe() const override { return "eigenphase:c=" + fmt(c); }
  std::optional<double> rate() const override { return c; }
};

struct TriphaseNode final : Weight::Node {
  SkewMatrix j;
  std::string text;
  TriphaseNode(SkewMatrix j_, std::string t) : j(std::move(j_)), text(std::move(t)) {}
  Complex eval(const Spectrum& s, LabelId a, LabelId b, LabelId c) const override {
    const Label &x = s.label(a), &y = s.label(b), &z = s.label(c);
    return std::polar(1.0, kPi * (j.form(x, y) + j.form(y, z) + j.form(z, x)));
  }
  WeightFamily family() const override { return WeightFamily::torus_triphase; }
  bool hermitian() const override { return true; }
  std::string describe() const override { return text; }
  void validate(const Spectrum& s) const override { require_torus(s, j, "triphase"); }
};

struct BicharacterNode final : Weight::Node {
  SkewMatrix j;
  explicit BicharacterNode(SkewMatrix j_) : j(std::move(j_)) {}
  Complex eval(const Spectrum& s, LabelId a, LabelId b, LabelId c) const override {
    const Label &x = s.label(a), &y = s.label(b), &z = s.label(c);
    for (int i = 0; i < j.dim; ++i) {
      if (z[i] != x[i] + y[i]) throw InvalidArgument("bicharacter weight is defined only on c = a + b");
    }
    return std::polar(1.0, -kPi * j.form(x, y));
  }
  WeightFamily family() const override { return WeightFamily::bicharacter; }
  bool hermitian() const override { return true; }
  std::string describe() const override { return "bicharacter:J=" + matrix_text(j); }
  void validate(const Spectrum& s) const override { require_torus(s, j, "bicharacter"); }
};

struct SU2PhaseNode final : Weight::Node {
  Complex eval(const Spectrum& s, LabelId a, LabelId b, LabelId c) const override {
    const Label &x = s.label(a), &y = s.label(b), &z = s.label(c);
    // doubled labels: m_i = x[1]/2, n_i = x[2]/2, so the exponent is -pi i k / 4
    const long k = static_cast<long>(x[1]) * (y[2] - z[2]) + static_cast<long>(y[1]) * (z[2] - x[2]) +
                   static_cast<long>(z[1]) * (x[2] - y[2]);
    const long r = ((k % 8) + 8) % 8;
    return std::polar(1.0, -kPi * static_cast<double>(r) / 4.0);
  }
  WeightFamily family() const override { return WeightFamily::su2_phase; }
  bool hermitian() const override { return true; }
  std::string describe() const override { return "su2phase"; }
  void validate(const Spectrum& s) const override {
    if (s.kind() != BasisKind::su2) throw InvalidArgument("su2phase weight needs an SU(2) spectrum");
  }
};

struct RandomNode final : Weight::Node {
  std::uint64_t seed;
  explicit RandomNode(std::uint64_t s) : seed(s) {}
  Complex eval(const Spectrum& s, LabelId a, LabelId b, LabelId c) const override {
    return std::polar(1.0, kPi * triple_hash(s, a, b, c, seed));
  }
  WeightFamily family() const override { return WeightFamily::random_phase; }
  bool hermitian() const override { return false; }
  std::string describe() const override { return "random:seed=" + std::to_string(seed); }
  std::optional<double> rate() const override { return std::nullopt; }
};

struct PerturbedNode final : Weight::Node {
  Weight base;
  double eps;
  std::uint64_t seed;
  PerturbedNode(Weight b, double e, std::uint64_t s) : base(std::move(b)), eps(e), seed(s) {}
  Complex eval(const Spectrum& s, LabelId a, LabelId b, LabelId c) const override {
    return base.raw(s, a, b, c) * std::polar(1.0, eps * triple_hash(s, a, b, c, seed));
  }
  WeightFamily family() const override { return WeightFamily::perturbed; }
  bool hermitian() const override { return eps == 0.0 && base.claims_hermitian(); }
  std::string describe() const override {
    return "perturbed:eps=" + fmt(eps) + ",seed=" + std::to_string(seed) + ",base=" + base.describe();
  }
  void validate(const Spectrum& s) const override { base.validate_for(s); }
  std::optional<double> rate() const override { return std::nullopt; }
};

struct ProductNode final : Weight::Node {
  Weight x, y;
  ProductNode(Weight a, Weight b) : x(std::move(a)), y(std::move(b)) {}
  Complex eval(const Spectrum& s, LabelId a, LabelId b, LabelId c) const override {
    return x.raw(s, a, b, c) * y.raw(s, a, b, c);
  }
  WeightFamily family() const override { return WeightFamily::product; }
  bool hermitian() const override { return x.claims_hermitian() && y.claims_hermitian(); }
  std::string describe() const override { return "product:" + x.describe() + "*" + y.describe(); }
  void validate(const Spectrum& s) const override {
    x.validate_for(s);
    y.validate_for(s);
  }
  std::optional<double> rate() const override {
    const auto p = x.eigenvalue_rate(), q = y.eigenvalue_rate();
    if (!p || !q) return std::nullopt;
    return *p + *q;
  }
};

struct ConjugateNode final : Weight::Node {
  Weight x;
  explicit ConjugateNode(Weight a) : x(std::move(a)) {}
  Complex eval(const Spectrum& s, LabelId a, LabelId b, LabelId c) const override { return std::conj(x.raw(s, a, b, c)); }
  WeightFamily family() const override { return WeightFamily::conjugate; }
  bool hermitian() const override { return x.claims_hermitian(); }
  std::string describe() const override { return "conj:" + x.describe(); }
  void validate(const Spectrum& s) const override { x.validate_for(s); }
  std::optional<double> rate() const override {
    const auto p = x.eigenvalue_rate();
    if (!p) return std::nullopt;
    return -*p;
  }
};

}  // namespace

Complex Weight::raw(const Spectrum& s, LabelId a, LabelId b, LabelId c) const { return node_->eval(s, a, b, c); }

Complex Weight::operator()(const Spectrum& s, LabelId a, LabelId b, LabelId c) const {
  const Complex w = node_->eval(s, a, b, c);
  if (std::abs(std::abs(w) - 1.0) > 1e-12) {
    throw PreconditionError("weight " + describe() + " is not unimodular at (" + s.describe(a) + "," + s.describe(b) +
                            "," + s.describe(c) + ")");
  }
  return w;
}

WeightFamily Weight::family() const { return node_->family(); }
bool Weight::claims_hermitian() const { return node_->hermitian(); }
std::string Weight::describe() const { return node_->describe(); }
void Weight::validate_for(const Spectrum& s) const { node_->validate(s); }
std::optional<double> Weight::eigenvalue_rate() const { return node_->rate(); }

Weight Weight::one() { return Weight(std::make_shared<OneNode>()); }

Weight Weight::eigenvalue_phase(double c) {
  if (!std::isfinite(c)) throw InvalidArgument("eigenphase parameter must be finite");
  return Weight(std::make_shared<EigenPhaseNode>(c));
}

Weight Weight::torus_triphase(SkewMatrix j) {
  std::string text = "triphase:J=" + matrix_text(j);
  return Weight(std::make_shared<TriphaseNode>(std::move(j), std::move(text)));
}

Weight Weight::nc_torus(SkewMatrix theta) {
  std::string text = "nctorus:Theta=" + matrix_text(theta);
  return Weight(std::make_shared<TriphaseNode>(theta.scaled(-1.0), std::move(text)));
}

Weight Weight::bicharacter(SkewMatrix j) { return Weight(std::make_shared<BicharacterNode>(std::move(j))); }
Weight Weight::su2_phase() { return Weight(std::make_shared<SU2PhaseNode>()); }
Weight Weight::random_phase(std::uint64_t seed) { return Weight(std::make_shared<RandomNode>(seed)); }

Weight Weight::perturbed(Weight base, double eps, std::uint64_t seed) {
  if (!std::isfinite(eps)) throw InvalidArgument("perturbation size must be finite");
  return Weight(std::make_shared<PerturbedNode>(std::move(base), eps, seed));
}

Weight weight_mul(const Weight& w1, const Weight& w2) { return Weight(std::make_shared<ProductNode>(w1, w2)); }
Weight weight_inv(const Weight& w) { return Weight(std::make_shared<ConjugateNode>(w)); }

double triple_hash(const Spectrum& s, LabelId a, LabelId b, LabelId c, std::uint64_t seed) {
  std::uint64_t h = splitmix(seed);
  for (LabelId id : {a, b, c}) {
    const Label& l = s.label(id);
    for (std::size_t i = 0; i < l.rank; ++i) h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(l[i])));
    h = splitmix(h ^ 0xa5a5a5a5ull);
  }
  return 2.0 * unit_interval(h) - 1.0;
}

SkewMatrix parse_skew_matrix(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    throw InvalidArgument("malformed matrix: " + text);
  }
  if (j.is_number()) return SkewMatrix::planar(j.get<double>());
  if (!j.is_array() || j.empty()) throw InvalidArgument("matrix must be a number or a nested array: " + text);
  const int d = static_cast<int>(j.size());
  std::vector<double> v;
  for (const auto& row : j) {
    if (!row.is_array() || static_cast<int>(row.size()) != d) throw InvalidArgument("matrix must be square: " + text);
    for (const auto& x : row) {
      if (!x.is_number()) throw InvalidArgument("matrix entries must be numbers: " + text);
      v.push_back(x.get<double>());
    }
  }
  return SkewMatrix(d, std::move(v));
}

namespace {

double parse_number(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw InvalidArgument("weight parameter " + key + " is not a number: " + text);
  }
  if (pos != text.size()) throw InvalidArgument("weight parameter " + key + " is not a number: " + text);
  return v;
}

std::uint64_t parse_seed(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw InvalidArgument("seed must be a non-negative integer: " + text);
  }
  return std::stoull(text);
}

std::string expect_key(const std::string& body, const std::string& key) {
  const std::string prefix = key + "=";
  if (body.rfind(prefix, 0) != 0) throw InvalidArgument("expected " + prefix + "... in weight spec, got: " + body);
  return body.substr(prefix.size());
}

}  // namespace

Weight parse_weight(const std::string& text) {
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto no_body = [&] {
    if (colon != std::string::npos) throw InvalidArgument("weight " + name + " takes no parameters");
  };
  if (name == "one") return no_body(), Weight::one();
  if (name == "su2phase") return no_body(), Weight::su2_phase();
  if (name == "eigenphase") return Weight::eigenvalue_phase(parse_number("c", expect_key(body, "c")));
  if (name == "triphase") return Weight::torus_triphase(parse_skew_matrix(expect_key(body, "J")));
  if (name == "bicharacter") return Weight::bicharacter(parse_skew_matrix(expect_key(body, "J")));
  if (name == "nctorus") {
    const std::string v = body.rfind("theta=", 0) == 0 ? body.substr(6) : expect_key(body, "Theta");
    return Weight::nc_torus(parse_skew_matrix(v));
  }
  if (name == "random") return Weight::random_phase(parse_seed(expect_key(body, "seed")));
  if (name == "conj") return weight_inv(parse_weight(body));
  if (name == "product") {
    const auto star = body.find('*');
    if (star == std::string::npos) throw InvalidArgument("product weight needs <spec>*<spec>");
    return weight_mul(parse_weight(body.substr(0, star)), parse_weight(body.substr(star + 1)));
  }
  if (name == "perturbed") {
    const auto base_pos = body.find("base=");
    if (base_pos == std::string::npos) throw InvalidArgument("perturbed weight needs base=<spec>");
    std::string head = body.substr(0, base_pos);
    double eps = 0.0;
    std::uint64_t seed = 0;
    bool have_eps = false;
    std::size_t start = 0;
    while (start < head.size()) {
      auto comma = head.find(',', start);
      if (comma == std::string::npos) comma = head.size();
      const std::string item = head.substr(start, comma - start);
      start = comma + 1;
      if (item.empty()) continue;
      if (item.rfind("eps=", 0) == 0) {
        eps = parse_number("eps", item.substr(4));
        have_eps = true;
      } else if (item.rfind("seed=", 0) == 0) {
        seed = parse_seed(item.substr(5));
      } else {
        throw InvalidArgument("unknown perturbed parameter: " + item);
      }
    }
    if (!have_eps) throw InvalidArgument("perturbed weight needs eps=<value>");
    return Weight::perturbed(parse_weight(body.substr(base_pos + 5)), eps, seed);
  }
  throw InvalidArgument("unknown weight family: " + name);
}

WeightDiagnostics check_admissible(const Weight& w, const FusionTensor& t) {
  const Spectrum& s = t.spectrum();
  WeightDiagnostics d;
  const auto n = static_cast<LabelId>(t.labels());
  for (LabelId a = 0; a < n; ++a) {
    for (LabelId b = 0; b < n; ++b) {
      for (const auto& e : t.channels(a, b)) {
        const Complex x = w.raw(s, a, b, e.out);
        d.unimodularity_defect = std::max(d.unimodularity_defect, std::abs(std::abs(x) - 1.0));
        d.hermitian_defect = std::max(d.hermitian_defect, std::abs(std::conj(x) - w.raw(s, b, a, e.out)));
        ++d.triples;
      }
    }
  }
  return d;
}

namespace {

struct PathTerm {
  LabelId eps;
  Complex phase;  // product of the two weights
  Complex coeff;  // product of the two fusion coefficients
};

// Walks every input triple (a, b, c) and both bracketings; fills square and
// summed defects. Triples with a leaky pair anywhere on a path are excluded.
WeightDiagnostics walk_cocycle(const Weight& w, const FusionTensor& t, bool square, bool summed) {
  const Spectrum& s = t.spectrum();
  const auto n = static_cast<std::int64_t>(t.labels());
  double sq = 0.0, sm = 0.0, mass = 0.0;
  std::size_t triples = 0, squares = 0, quads = 0, excluded = 0;

#pragma omp parallel for schedule(dynamic) reduction(max : sq, sm, mass) reduction(+ : triples, squares, quads, excluded)
  for (std::int64_t ai = 0; ai < n; ++ai) {
    const auto a = static_cast<LabelId>(ai);
    std::vector<PathTerm> left, right;
    for (LabelId b = 0; b < n; ++b) {
      if (t.leaks(a, b)) {
        excluded += static_cast<std::size_t>(n);
        continue;
      }
      for (LabelId c = 0; c < n; ++c) {
        if (t.leaks(b, c)) {
          ++excluded;
          continue;
        }
        left.clear();
        right.clear();
        bool leak = false;
        for (const auto& d1 : t.channels(a, b)) {
          if (t.leaks(d1.out, c)) {
            leak = true;
            break;
          }
          const Complex w1 = w.raw(s, a, b, d1.out);
          for (const auto& e : t.channels(d1.out, c)) left.push_back({e.out, w1 * w.raw(s, d1.out, c, e.out), d1.value * e.value});
        }
        for (const auto* p = t.channels(b, c).data(); !leak && p != t.channels(b, c).data() + t.channels(b, c).size(); ++p) {
          if (t.leaks(a, p->out)) {
            leak = true;
            break;
          }
          const Complex w1 = w.raw(s, b, c, p->out);
          for (const auto& e : t.channels(a, p->out)) right.push_back({e.out, w1 * w.raw(s, a, p->out, e.out), p->value * e.value});
        }
        if (leak) {
          ++excluded;
          continue;
        }
        ++triples;
        auto by_eps = [](const PathTerm& x, const PathTerm& y) { return x.eps < y.eps; };
        std::stable_sort(left.begin(), left.end(), by_eps);
        std::stable_sort(right.begin(), right.end(), by_eps);
        std::size_t i = 0, j = 0;
        while (i < left.size() || j < right.size()) {
          LabelId eps;
          if (j >= right.size() || (i < left.size() && left[i].eps <= right[j].eps)) {
            eps = left[i].eps;
          } else {
            eps = right[j].eps;
          }
          std::size_t i1 = i, j1 = j;
          while (i1 < left.size() && left[i1].eps == eps) ++i1;
          while (j1 < right.size() && right[j1].eps == eps) ++j1;
          if (square) {
            for (std::size_t p = i; p < i1; ++p) {
              for (std::size_t q = j; q < j1; ++q) {
                sq = std::max(sq, std::abs(left[p].phase - right[q].phase));
                ++squares;
              }
            }
          }
          if (summed) {
            Complex l{}, r{};
            double m = 0.0;
            for (std::size_t p = i; p < i1; ++p) {
              l += left[p].phase * left[p].coeff;
              m += std::abs(left[p].coeff);
            }
            for (std::size_t q = j; q < j1; ++q) {
              r += right[q].phase * right[q].coeff;
              m += std::abs(right[q].coeff);
            }
            sm = std::max(sm, std::abs(l - r));
            mass = std::max(mass, m);
            ++quads;
          }
          i = i1;
          j = j1;
        }
      }
    }
  }
  WeightDiagnostics d;
  d.square_defect = sq;
  d.summed_defect = sm;
  d.path_mass = mass;
  d.triples = triples;
  d.squares = squares;
  d.quadruples = quads;
  d.excluded = excluded;
  return d;
}

}  // namespace

WeightDiagnostics check_square_cocycle(const Weight& w, const FusionTensor& t) { return walk_cocycle(w, t, true, false); }

WeightDiagnostics check_summed_cocycle(const Weight& w, const FusionTensor& t) { return walk_cocycle(w, t, false, true); }

std::vector<std::array<LabelId, 3>> sample_admissible_triples(const FusionTensor& t, std::size_t count,
                                                             std::uint64_t seed) {
  std::vector<std::array<LabelId, 3>> all;
  const auto n = static_cast<LabelId>(t.labels());
  for (LabelId c = 0; c < n; ++c) {
    for (const auto& e : t.incoming(c)) all.push_back({e.left, e.right, c});
  }
  if (all.empty()) throw InvalidArgument("tensor has no admissible triples");
  std::mt19937_64 rng(seed);
  std::vector<std::array<LabelId, 3>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(all[rng() % all.size()]);
  return out;
}

WeightDiagnostics estimate_log_lipschitz(const Weight& w, const FusionTensor& t, std::size_t sample_count,
                                         std::uint64_t seed) {
  if (sample_count < 2) throw InvalidArgument("log-Lipschitz estimate needs at least 2 samples");
  const Spectrum& s = t.spectrum();
  auto lg = [&](LabelId id) { return std::log1p(s.eigenvalue(id)); };
  const auto xs = sample_admissible_triples(t, sample_count, seed);
  const auto ys = sample_admissible_triples(t, sample_count, seed ^ 0x5bd1e995ull);
  WeightDiagnostics d;
  std::size_t usable = 0;
  for (std::size_t i = 0; i < sample_count; ++i) {
    const auto& x = xs[i];
    const auto& y = ys[i];
    double den = 0.0;
    for (int k = 0; k < 3; ++k) den += std::abs(lg(x[k]) - lg(y[k]));
    if (den == 0.0) continue;
    ++usable;
    const double num = std::abs(w.raw(s, x[0], x[1], x[2]) - w.raw(s, y[0], y[1], y[2]));
    d.log_lipschitz = std::max(d.log_lipschitz, num / den);
  }
  if (usable == 0) throw InvalidArgument("fewer than 2 distinct eigenvalue triples in the sample");
  d.triples = usable;
  return d;
}

GaugeCharacter::GaugeCharacter(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}

GaugeCharacter GaugeCharacter::trivial() {
  return GaugeCharacter("one", [](const Spectrum&, LabelId) { return Complex(1.0, 0.0); });
}

GaugeCharacter GaugeCharacter::torus(std::vector<double> theta) {
  std::string name = "torus:theta=";
  for (std::size_t i = 0; i < theta.size(); ++i) name += (i ? "," : "") + fmt(theta[i]);
  return GaugeCharacter(std::move(name), [theta = std::move(theta)](const Spectrum& s, LabelId id) {
    if (s.kind() != BasisKind::torus) throw InvalidArgument("torus gauge character needs a torus spectrum");
    const Label& n = s.label(id);
    if (n.rank != theta.size()) throw InvalidArgument("gauge vector dimension does not match torus");
    double p = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) p += theta[i] * n[i];
    return std::polar(1.0, p);
  });
}

GaugeCharacter GaugeCharacter::azimuthal(double phi0) {
  return GaugeCharacter("azimuthal:phi=" + fmt(phi0), [phi0](const Spectrum& s, LabelId id) {
    if (s.kind() != BasisKind::sphere) throw InvalidArgument("azimuthal gauge character needs a sphere spectrum");
    return std::polar(1.0, s.label(id)[1] * phi0);
  });
}

GaugeCharacter GaugeCharacter::su2_torus(double a, double b) {
  return GaugeCharacter("su2torus:a=" + fmt(a) + ",b=" + fmt(b), [a, b](const Spectrum& s, LabelId id) {
    if (s.kind() != BasisKind::su2) throw InvalidArgument("su2 gauge character needs an SU(2) spectrum");
    const Label& l = s.label(id);
    return std::polar(1.0, 0.5 * (l[1] * a + l[2] * b));
  });
}

GaugeCharacter GaugeCharacter::exponential(Phase theta, double t, std::string name) {
  return GaugeCharacter(std::move(name), [theta = std::move(theta), t](const Spectrum& s, LabelId id) {
    return std::polar(1.0, t * theta(s, id));
  });
}

Complex GaugeCharacter::operator()(const Spectrum& s, LabelId id) const {
  const Complex v = fn_(s, id);
  if (std::abs(std::abs(v) - 1.0) > 1e-12) throw PreconditionError("gauge character " + name_ + " is not unimodular");
  return v;
}

GaugeCharacter operator*(const GaugeCharacter& x, const GaugeCharacter& y) {
  return GaugeCharacter(x.name_ + "*" + y.name_, [x, y](const Spectrum& s, LabelId id) { return x(s, id) * y(s, id); });
}

double check_gauge_cocycle(const GaugeCharacter& chi, const FusionTensor& t) {
  const Spectrum& s = t.spectrum();
  const auto n = static_cast<LabelId>(t.labels());
  std::vector<Complex> v(n);
  for (LabelId i = 0; i < n; ++i) v[i] = chi(s, i);
  double worst = 0.0;
  for (LabelId a = 0; a < n; ++a)
    for (LabelId b = 0; b < n; ++b)
      for (const auto& e : t.channels(a, b)) worst = std::max(worst, std::abs(v[a] * v[b] - v[e.out]));
  return worst;
}

namespace {

CoeffVec twisted(const Weight& w, const FusionTensor& t, const CoeffVec& f, const CoeffVec& g) {
  const Spectrum& s = t.spectrum();
  CoeffVec out(f.spectrum_ptr());
  for (const auto& [a, fa] : f.entries())
    for (const auto& [b, gb] : g.entries())
      for (const auto& e : t.channels(a, b)) out.add(e.out, w(s, a, b, e.out) * fa * gb * e.value);
  return out;
}

}  // namespace

double check_equivariance(const Weight& w, const Basis& basis, const FusionTensor& t, const IsometryAction& h) {
  basis.validate(h);
  const Spectrum& s = t.spectrum();
  if (!s.same_labels(basis.spectrum())) throw InvalidArgument("tensor and basis have different spectra");
  w.validate_for(s);
  const auto n = static_cast<LabelId>(t.labels());
  double worst = 0.0;
  if (const auto images = basis.monomial_action(h)) {
    for (LabelId a = 0; a < n; ++a)
      for (LabelId b = 0; b < n; ++b)
        for (const auto& e : t.channels(a, b)) {
          const Complex moved = w.raw(s, (*images)[a].target, (*images)[b].target, (*images)[e.out].target);
          worst = std::max(worst, std::abs(moved - w.raw(s, a, b, e.out)));
        }
    return worst;
  }
  const int band = s.max_degree();
  std::vector<CoeffVec> moved;
  moved.reserve(n);
  for (LabelId a = 0; a < n; ++a) moved.push_back(basis.act(h, CoeffVec::unit(t.spectrum_ptr(), a)));
  for (LabelId a = 0; a < n; ++a) {
    for (LabelId b = 0; b < n; ++b) {
      if (s.degree(a) + s.degree(b) > band) continue;
      const CoeffVec lhs = basis.act(h, twisted(w, t, CoeffVec::unit(t.spectrum_ptr(), a), CoeffVec::unit(t.spectrum_ptr(), b)));
      const CoeffVec rhs = twisted(w, t, moved[a], moved[b]);
      worst = std::max(worst, max_abs(lhs - rhs));
    }
  }
  return worst;
}

}  // namespace starspec
