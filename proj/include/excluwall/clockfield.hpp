#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "excluwall/error.hpp"

namespace excluwall {

// SplitMix64 finalizer. Used both for the counter-based clock streams and for
// deriving per-replica seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of replica `index` in logical stream `stream` (e.g. LHS vs RHS of an
// identity) under `base`. Distinct (stream, index) pairs give unrelated seeds.
constexpr std::uint64_t replica_seed(std::uint64_t base, std::uint64_t stream,
                                     std::uint64_t index) noexcept {
  return mix64(mix64(base ^ mix64(stream + 0x5851F42D4C957F2DULL)) + index);
}

/// Per-site rate-1 Poisson event streams on [0, horizon].
///
/// Site z's stream is a pure function of (seed, z): the k-th exponential gap
/// is derived from a counter-based hash of (seed, z, k), so any site can be
/// materialized on demand and in any order. Processes that read the same
/// field are therefore driven by identical clocks (basic coupling).
///
/// Queries grow an internal cache lazily, so they are non-const; one field must
/// not be queried from two threads at once.
class ClockField {
 public:
  ClockField() = default;
  ClockField(std::uint64_t seed, double horizon);

  // Re-key the field and drop cached events, keeping allocated capacity.
  void reset(std::uint64_t seed);
  void reset(std::uint64_t seed, double horizon);

  std::uint64_t seed() const noexcept { return seed_; }
  double horizon() const noexcept { return horizon_; }

  // All events of site z in [0, up_to]. Throws RangeError if up_to is outside
  // [0, horizon].
  std::vector<double> site_events(Site z, double up_to);

  // Smallest event of site z strictly after `after`, or nullopt if the stream
  // has no further event before the horizon.
  std::optional<double> next_event(Site z, double after);

  // Number of sites with a materialized stream.
  std::size_t cached_sites() const noexcept;

 private:
  struct Stream {
    std::vector<double> times;
    std::uint64_t key = 0;
    std::uint64_t drawn = 0;
    std::uint64_t epoch = 0;
    bool exhausted = false;
  };

  Stream& stream(Site z);
  void extend_past(Stream& s, double t);

  std::uint64_t seed_ = 0;
  std::uint64_t epoch_ = 1;
  double horizon_ = 0.0;
  Site lo_ = 0;
  std::vector<Stream> streams_;
};

}  // namespace excluwall
