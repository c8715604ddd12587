#include "excluwall/clockfield.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace excluwall {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t site_key(std::uint64_t seed, Site z) {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(z) * kGolden + 0x2545F4914F6CDD1DULL));
}

// Exp(1) gap from the counter-th draw of a keyed stream. The uniform lies
// strictly inside (0,1) so gaps are strictly positive.
double exp_gap(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t bits = mix64(key + (counter + 1) * kGolden);
  const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  return -std::log(u);
}

void check_time(double t, double horizon, const char* what) {
  if (!(t >= 0.0) || t > horizon) {
    throw RangeError(std::string(what) + ": time " + std::to_string(t) +
                     " outside [0, " + std::to_string(horizon) + "]");
  }
}

}  // namespace

ClockField::ClockField(std::uint64_t seed, double horizon) : seed_(seed), horizon_(horizon) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw DomainError("ClockField: horizon must be finite and nonnegative");
  }
}

void ClockField::reset(std::uint64_t seed) {
  seed_ = seed;
  ++epoch_;
}

void ClockField::reset(std::uint64_t seed, double horizon) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw DomainError("ClockField: horizon must be finite and nonnegative");
  }
  horizon_ = horizon;
  reset(seed);
}

ClockField::Stream& ClockField::stream(Site z) {
  if (streams_.empty()) {
    lo_ = z;
    streams_.resize(1);
  } else if (z < lo_) {
    const auto grow = static_cast<std::size_t>(lo_ - z) + streams_.size();
    streams_.insert(streams_.begin(), grow, Stream{});
    lo_ -= static_cast<Site>(grow);
  } else if (static_cast<std::size_t>(z - lo_) >= streams_.size()) {
    const auto need = static_cast<std::size_t>(z - lo_) + 1;
    streams_.resize(std::max(need, 2 * streams_.size()));
  }
  Stream& s = streams_[static_cast<std::size_t>(z - lo_)];
  if (s.epoch != epoch_) {
    s.epoch = epoch_;
    s.key = site_key(seed_, z);
    s.drawn = 0;
    s.exhausted = false;
    s.times.clear();
  }
  return s;
}

void ClockField::extend_past(Stream& s, double t) {
  while (!s.exhausted && (s.times.empty() || s.times.back() <= t)) {
    const double last = s.times.empty() ? 0.0 : s.times.back();
    const double next = last + exp_gap(s.key, s.drawn++);
    if (next > horizon_) {
      s.exhausted = true;
    } else {
      s.times.push_back(next);
    }
  }
}

std::vector<double> ClockField::site_events(Site z, double up_to) {
  check_time(up_to, horizon_, "site_events");
  Stream& s = stream(z);
  extend_past(s, up_to);
  const auto end = std::upper_bound(s.times.begin(), s.times.end(), up_to);
  return {s.times.begin(), end};
}

std::optional<double> ClockField::next_event(Site z, double after) {
  check_time(after, horizon_, "next_event");
  Stream& s = stream(z);
  extend_past(s, after);
  if (!s.times.empty() && s.times.back() > after) {
    const auto it = std::upper_bound(s.times.begin(), s.times.end(), after);
    return *it;
  }
  return std::nullopt;
}

std::size_t ClockField::cached_sites() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      streams_.begin(), streams_.end(), [this](const Stream& s) { return s.epoch == epoch_; }));
}

}  // namespace excluwall
