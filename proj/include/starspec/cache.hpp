#pragma once

#include <cstdint>
#include <string>

#include "starspec/bases.hpp"
#include "starspec/fusion_tensor.hpp"

namespace starspec {

/// Header of a "SPECFUS1" fusion cache file.
///
/// The body has one line per input pair, in (a, b) order:
///   P <a> <b> <leaks 0|1> <k> then k triples <c> <re> <im>
/// with labels in their text form and values at 17 significant digits.
/// The checksum is FNV-1a (64 bit) over the body bytes.
struct FusionCacheInfo {
  std::string backend;
  int truncation = 0;
  double drop_tol = 0.0;
  std::int64_t build_timestamp = 0;
  std::size_t labels = 0;
  std::size_t pairs = 0;
  std::size_t entries = 0;
  std::size_t leaky_pairs = 0;
  std::string checksum;  // 16 hex digits
};

std::uint64_t fnv1a64(std::string_view bytes);

/// Whole file contents; deterministic in (tensor, timestamp).
std::string fusion_cache_text(const FusionTensor& t, std::int64_t build_timestamp);

/// Writes under "<path>.lock". Throws IoError when the lock is held or the
/// path is unwritable.
FusionCacheInfo write_fusion_cache(const std::string& path, const FusionTensor& t, std::int64_t build_timestamp);

/// Parses and checks the header and checksum (IoError on corruption).
FusionCacheInfo read_fusion_cache_info(const std::string& path);

/// Rebuilds the tensor for `basis`. A cache for another backend or truncation
/// is rejected with InvalidArgument; corruption raises IoError.
FusionTensor load_fusion_cache(const std::string& path, const Basis& basis);

}  // namespace starspec
