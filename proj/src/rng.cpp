#include "chemostat/rng.hpp"

#include <cmath>
#include <numbers>

namespace chemostat {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t id_state = stream_id;
  std::uint64_t state = seed ^ splitmix64(id_state);
  const std::uint64_t a = splitmix64(state);
  const std::uint64_t b = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

std::uint64_t RngStream::next_raw() {
  ++raw_draws_;
  return engine_();
}

double RngStream::uniform() { return static_cast<double>(next_raw() >> 11) * kTwoPow53Inv; }

std::pair<double, double> RngStream::normal_pair() {
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = static_cast<double>((next_raw() >> 11) + 1) * kTwoPow53Inv;
  const double u2 = static_cast<double>(next_raw() >> 11) * kTwoPow53Inv;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace chemostat
