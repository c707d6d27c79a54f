#include "starspec/cache.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <sstream>

#include "starspec/errors.hpp"
#include "starspec/report.hpp"

namespace starspec {

namespace {

constexpr const char* kMagic = "SPECFUS1";
constexpr const char* kHeaderEnd = "end_header";

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Parsed {
  FusionCacheInfo info;
  std::size_t body_offset = 0;
};

// strtod keeps subnormals that std::stod would reject
double to_double(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) throw std::invalid_argument(text);
  return v;
}

Parsed parse_header(const std::string& text, const std::string& path) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kMagic) throw IoError(path + ": not a SPECFUS1 cache");
  std::map<std::string, std::string> kv;
  bool closed = false;
  while (std::getline(is, line)) {
    if (line == kHeaderEnd) {
      closed = true;
      break;
    }
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw IoError(path + ": malformed header line '" + line + "'");
    kv[line.substr(0, sp)] = line.substr(sp + 1);
  }
  if (!closed) throw IoError(path + ": truncated header");
  auto field = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw IoError(path + ": header lacks '" + key + "'");
    return it->second;
  };
  Parsed p;
  try {
    p.info.backend = field("backend");
    p.info.truncation = std::stoi(field("truncation"));
    p.info.drop_tol = to_double(field("drop_tol"));
    p.info.build_timestamp = std::stoll(field("build_timestamp"));
    p.info.labels = std::stoull(field("labels"));
    p.info.pairs = std::stoull(field("pairs"));
    p.info.entries = std::stoull(field("entries"));
    p.info.leaky_pairs = std::stoull(field("leaky_pairs"));
  } catch (const std::logic_error&) {
    throw IoError(path + ": malformed header value");
  }
  p.info.checksum = field("checksum");
  const auto pos = is.tellg();
  p.body_offset = pos < 0 ? text.size() : static_cast<std::size_t>(pos);
  return p;
}

Parsed parse_and_verify(const std::string& text, const std::string& path) {
  Parsed p = parse_header(text, path);
  const std::string_view body(text.data() + p.body_offset, text.size() - p.body_offset);
  if (hex64(fnv1a64(body)) != p.info.checksum) throw IoError(path + ": checksum mismatch (corrupt cache)");
  return p;
}

class LockFile {
 public:
  explicit LockFile(std::string path) : path_(std::move(path)) {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      if (errno == EEXIST) throw IoError("cache is locked by another writer: " + path_);
      throw IoError("cannot create lock " + path_ + ": " + std::strerror(errno));
    }
  }
  ~LockFile() {
    ::close(fd_);
    ::unlink(path_.c_str());
  }
  LockFile(const LockFile&) = delete;
  LockFile& operator=(const LockFile&) = delete;

 private:
  std::string path_;
  int fd_ = -1;
};

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fusion_cache_text(const FusionTensor& t, std::int64_t build_timestamp) {
  const Spectrum& s = t.spectrum();
  const std::size_t n = t.labels();
  std::vector<std::string> names(n);
  for (LabelId i = 0; i < n; ++i) names[i] = s.describe(i);

  std::string body;
  body.reserve(n * n * 48);
  for (LabelId a = 0; a < n; ++a) {
    for (LabelId b = 0; b < n; ++b) {
      const auto ch = t.channels(a, b);
      body += "P " + names[a] + ' ' + names[b] + (t.leaks(a, b) ? " 1 " : " 0 ") + std::to_string(ch.size());
      for (const auto& e : ch) {
        body += ' ' + names[e.out] + ' ' + format_number(e.value.real()) + ' ' + format_number(e.value.imag());
      }
      body += '\n';
    }
  }

  const auto& m = t.metadata();
  std::string head = std::string(kMagic) + "\n";
  head += "backend " + m.backend_id + "\n";
  head += "truncation " + std::to_string(m.truncation) + "\n";
  head += "drop_tol " + format_number(m.drop_tol) + "\n";
  head += "build_timestamp " + std::to_string(build_timestamp) + "\n";
  head += "labels " + std::to_string(n) + "\n";
  head += "pairs " + std::to_string(n * n) + "\n";
  head += "entries " + std::to_string(t.nnz()) + "\n";
  head += "leaky_pairs " + std::to_string(t.leaky_pairs()) + "\n";
  head += "checksum " + hex64(fnv1a64(body)) + "\n";
  head += std::string(kHeaderEnd) + "\n";
  return head + body;
}

FusionCacheInfo write_fusion_cache(const std::string& path, const FusionTensor& t, std::int64_t build_timestamp) {
  const std::string text = fusion_cache_text(t, build_timestamp);
  LockFile lock(path + ".lock");
  write_text_file(path, text);
  return parse_header(text, path).info;
}

FusionCacheInfo read_fusion_cache_info(const std::string& path) {
  return parse_and_verify(read_text_file(path), path).info;
}

FusionTensor load_fusion_cache(const std::string& path, const Basis& basis) {
  const std::string text = read_text_file(path);
  const Parsed p = parse_and_verify(text, path);
  const Spectrum& s = basis.spectrum();
  if (p.info.backend != basis.id()) {
    throw InvalidArgument(path + ": cache is for backend " + p.info.backend + ", expected " + basis.id());
  }
  if (p.info.truncation != s.max_degree()) {
    throw InvalidArgument(path + ": cache truncation " + std::to_string(p.info.truncation) + " does not match " +
                          std::to_string(s.max_degree()));
  }
  const std::size_t n = s.size();
  if (p.info.labels != n || p.info.pairs != n * n) throw InvalidArgument(path + ": label count does not match backend");

  std::vector<std::vector<FusionEntry>> rows(n * n);
  std::vector<std::uint8_t> leaks(n * n, 0);
  std::istringstream is(text.substr(p.body_offset));
  std::string tag, la, lb, lc;
  int leak = 0;
  std::size_t k = 0, total = 0;
  auto bad = [&](const std::string& why) { return IoError(path + ": " + why); };
  for (std::size_t r = 0; r < n * n; ++r) {
    if (!(is >> tag >> la >> lb >> leak >> k) || tag != "P") throw bad("malformed pair record");
    const LabelId a = s.index_of(parse_label(s.kind(), la));
    const LabelId b = s.index_of(parse_label(s.kind(), lb));
    const std::size_t pi = static_cast<std::size_t>(a) * n + b;
    if (pi != r) throw bad("pair records out of order");
    leaks[pi] = leak ? 1 : 0;
    rows[pi].reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::string re, im;
      if (!(is >> lc >> re >> im)) throw bad("malformed channel");
      try {
        rows[pi].push_back({s.index_of(parse_label(s.kind(), lc)), Complex(to_double(re), to_double(im))});
      } catch (const std::logic_error&) {
        throw bad("malformed channel value");
      }
    }
    total += k;
  }
  if (total != p.info.entries) throw bad("entry count does not match header");
  FusionMetadata meta{p.info.backend, p.info.truncation, p.info.drop_tol};
  return FusionTensor(basis.spectrum_ptr(), std::move(meta), std::move(rows), std::move(leaks));
}

}  // namespace starspec
