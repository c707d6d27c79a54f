#include "starspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "starspec/errors.hpp"

namespace starspec {

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::torus: return "torus";
    case BasisKind::sphere: return "sphere";
    case BasisKind::su2: return "su2";
  }
  return "unknown";
}

Label::Label(std::initializer_list<int> values) {
  if (values.size() > max_rank) throw InvalidArgument("label rank exceeds " + std::to_string(max_rank));
  rank = static_cast<std::uint8_t>(values.size());
  std::copy(values.begin(), values.end(), v.begin());
}

std::strong_ordering operator<=>(const Label& a, const Label& b) {
  if (auto c = a.rank <=> b.rank; c != 0) return c;
  for (std::size_t i = 0; i < a.rank; ++i) {
    if (auto c = a.v[i] <=> b.v[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::size_t LabelHash::operator()(const Label& l) const noexcept {
  std::size_t h = l.rank;
  for (std::size_t i = 0; i < l.rank; ++i) {
    h ^= static_cast<std::size_t>(l.v[i] + 0x9e3779b9) + (h << 6) + (h >> 2);
  }
  return h;
}

namespace {

void write_half(std::ostream& os, int twice) {
  if (twice % 2 == 0) {
    os << twice / 2;
  } else {
    os << twice << "/2";
  }
}

int parse_half(const std::string& tok) {
  auto slash = tok.find('/');
  if (slash == std::string::npos) {
    // accept "1.5" as well as "3/2"
    double x = std::stod(tok);
    double twice = 2.0 * x;
    if (std::abs(twice - std::round(twice)) > 1e-9) throw InvalidArgument("not a half-integer: " + tok);
    return static_cast<int>(std::lround(twice));
  }
  if (tok.substr(slash + 1) != "2") throw InvalidArgument("bad half-integer: " + tok);
  return std::stoi(tok.substr(0, slash));
}

}  // namespace

std::string format_label(BasisKind kind, const Label& label) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < label.rank; ++i) {
    if (i) os << ',';
    if (kind == BasisKind::su2) {
      write_half(os, label.v[i]);
    } else {
      os << label.v[i];
    }
  }
  os << ')';
  return os.str();
}

Label parse_label(BasisKind kind, const std::string& text) {
  std::string body = text;
  if (!body.empty() && body.front() == '(') body.erase(0, 1);
  if (!body.empty() && body.back() == ')') body.pop_back();
  Label out;
  std::stringstream ss(body);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (out.rank == Label::max_rank) throw InvalidArgument("label too long: " + text);
    try {
      out.v[out.rank++] = kind == BasisKind::su2 ? parse_half(tok) : std::stoi(tok);
    } catch (const std::logic_error&) {
      throw InvalidArgument("malformed label: " + text);
    }
  }
  if (out.rank == 0) throw InvalidArgument("empty label");
  return out;
}

Spectrum::Spectrum(BasisKind kind, int max_degree, std::vector<Entry> entries)
    : kind_(kind), max_degree_(max_degree) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.label < b.label; });
  const std::size_t n = entries.size();
  labels_.reserve(n);
  eigenvalues_.reserve(n);
  degrees_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = entries[i];
    if (!(e.eigenvalue >= 0.0)) throw InvalidArgument("negative eigenvalue");
    if (e.degree > max_degree) throw InvalidArgument("label degree exceeds truncation");
    if (std::abs(std::abs(e.conj_factor) - 1.0) > 1e-14) throw InvalidArgument("conjugation factor not unimodular");
    if (!lookup_.emplace(e.label, static_cast<LabelId>(i)).second) {
      throw InvalidArgument("duplicate label " + format_label(kind, e.label));
    }
    labels_.push_back(e.label);
    eigenvalues_.push_back(e.eigenvalue);
    degrees_.push_back(e.degree);
  }
  conj_partner_.resize(n);
  conj_factor_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto partner = find(entries[i].conj_label);
    if (!partner) throw InvalidArgument("conjugation leaves truncation at " + describe(static_cast<LabelId>(i)));
    conj_partner_[i] = *partner;
    conj_factor_[i] = entries[i].conj_factor;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (conj_partner_[conj_partner_[i]] != i) throw InvalidArgument("conjugation map is not an involution");
    if (eigenvalues_[conj_partner_[i]] != eigenvalues_[i]) throw InvalidArgument("conjugation changes eigenvalue");
  }
}

std::optional<LabelId> Spectrum::find(const Label& label) const {
  auto it = lookup_.find(label);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

LabelId Spectrum::index_of(const Label& label) const {
  auto id = find(label);
  if (!id) throw InvalidArgument("label outside truncation: " + format_label(kind_, label));
  return *id;
}

std::vector<LabelId> Spectrum::ids_up_to_degree(int bound) const {
  std::vector<LabelId> out;
  for (LabelId i = 0; i < size(); ++i) {
    if (degrees_[i] <= bound) out.push_back(i);
  }
  return out;
}

bool Spectrum::same_labels(const Spectrum& other) const {
  return kind_ == other.kind_ && labels_ == other.labels_;
}

CoeffVec::CoeffVec(SpectrumPtr spectrum) : spectrum_(std::move(spectrum)) {
  if (!spectrum_) throw InvalidArgument("coefficient vector needs a spectrum");
}

Complex CoeffVec::operator[](LabelId id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? Complex{} : it->second;
}

Complex CoeffVec::at(const Label& label) const {
  auto id = spectrum_->find(label);
  return id ? (*this)[*id] : Complex{};
}

void CoeffVec::set(LabelId id, Complex value) {
  if (id >= spectrum_->size()) throw InvalidArgument("label id outside truncation");
  if (value == Complex{}) {
    entries_.erase(id);
  } else {
    entries_[id] = value;
  }
}

void CoeffVec::add(LabelId id, Complex value) {
  if (id >= spectrum_->size()) throw InvalidArgument("label id outside truncation");
  entries_[id] += value;
}

int CoeffVec::max_degree() const {
  int d = -1;
  for (const auto& [id, c] : entries_) d = std::max(d, spectrum_->degree(id));
  return d;
}

std::vector<Complex> CoeffVec::dense() const {
  std::vector<Complex> out(spectrum_->size());
  for (const auto& [id, c] : entries_) out[id] = c;
  return out;
}

CoeffVec CoeffVec::from_dense(SpectrumPtr spectrum, std::span<const Complex> values) {
  CoeffVec out(std::move(spectrum));
  if (values.size() != out.spectrum().size()) throw InvalidArgument("dense vector size mismatch");
  for (LabelId i = 0; i < values.size(); ++i) {
    if (values[i] != Complex{}) out.entries_.emplace_hint(out.entries_.end(), i, values[i]);
  }
  return out;
}

CoeffVec CoeffVec::rebind(SpectrumPtr spectrum) const {
  if (!spectrum || !spectrum->same_labels(*spectrum_)) throw InvalidArgument("rebind needs identical label sets");
  CoeffVec out(std::move(spectrum));
  out.entries_ = entries_;
  return out;
}

CoeffVec CoeffVec::pruned(double tol) const {
  CoeffVec out(spectrum_);
  for (const auto& [id, c] : entries_) {
    if (std::abs(c) > tol) out.entries_.emplace_hint(out.entries_.end(), id, c);
  }
  return out;
}

void CoeffVec::require_same_spectrum(const CoeffVec& other) const {
  if (other.spectrum_ != spectrum_ && !other.spectrum_->same_labels(*spectrum_)) {
    throw InvalidArgument("coefficient vectors belong to different spectra");
  }
}

CoeffVec& CoeffVec::operator+=(const CoeffVec& other) {
  require_same_spectrum(other);
  for (const auto& [id, c] : other.entries_) entries_[id] += c;
  return *this;
}

CoeffVec& CoeffVec::operator-=(const CoeffVec& other) {
  require_same_spectrum(other);
  for (const auto& [id, c] : other.entries_) entries_[id] -= c;
  return *this;
}

CoeffVec& CoeffVec::operator*=(Complex scale) {
  for (auto& [id, c] : entries_) c *= scale;
  return *this;
}

CoeffVec CoeffVec::unit(SpectrumPtr spectrum, LabelId id, Complex value) {
  CoeffVec out(std::move(spectrum));
  out.set(id, value);
  return out;
}

double hs_norm(const CoeffVec& f, SobolevParams s) {
  const auto& spec = f.spectrum();
  double sum = 0.0;
  for (const auto& [id, c] : f.entries()) {
    sum += std::pow(1.0 + spec.eigenvalue(id), s.order) * std::norm(c);
  }
  return std::sqrt(sum);
}

double max_abs(const CoeffVec& f) {
  double m = 0.0;
  for (const auto& [id, c] : f.entries()) m = std::max(m, std::abs(c));
  return m;
}

CoeffVec involution(const CoeffVec& f) {
  const auto& spec = f.spectrum();
  CoeffVec out(f.spectrum_ptr());
  for (const auto& [id, c] : f.entries()) {
    out.set(spec.conj_partner(id), spec.conj_factor(id) * std::conj(c));
  }
  return out;
}

int dyadic_block(double eigenvalue) {
  int exponent = 0;
  std::frexp(1.0 + eigenvalue, &exponent);
  return exponent - 1;
}

CoeffVec dyadic_project(const CoeffVec& f, int j) {
  CoeffVec out(f.spectrum_ptr());
  for (const auto& [id, c] : f.entries()) {
    if (dyadic_block(f.spectrum().eigenvalue(id)) == j) out.set(id, c);
  }
  return out;
}

double unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

CoeffVec random_coeff_vec(SpectrumPtr spectrum, std::uint64_t seed, double decay, int max_degree) {
  if (!(decay > 0.0)) throw InvalidArgument("decay must be positive");
  std::mt19937_64 rng(seed);
  CoeffVec out(spectrum);
  for (LabelId id = 0; id < spectrum->size(); ++id) {
    // draw for every label so the stream does not depend on the band limit
    const double re = 2.0 * unit_interval(rng()) - 1.0;
    const double im = 2.0 * unit_interval(rng()) - 1.0;
    if (max_degree >= 0 && spectrum->degree(id) > max_degree) continue;
    const double scale = std::pow(1.0 + spectrum->eigenvalue(id), -decay);
    out.set(id, Complex(re, im) * scale);
  }
  return out;
}

}  // namespace starspec
