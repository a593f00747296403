#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace chemostat {

// splitmix64 finalizer; used to derive per-stream seeds from (seed, stream_id).
std::uint64_t splitmix64(std::uint64_t& state);

// Reproducible random stream for one replica.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. Its seed sequence is four 32-bit words taken from a splitmix64
// walk started at seed ^ mix(stream_id), so distinct stream ids give
// unrelated engine states. Uniforms use the top 53 bits; normals come from
// Box-Muller pairs. No std:: distribution is used, since those are not
// specified bit-exactly across standard libraries.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  // Uniform on [0, 1).
  double uniform();
  // Two independent standard normals from one Box-Muller transform.
  std::pair<double, double> normal_pair();

  // Number of raw 64-bit engine outputs consumed so far.
  std::uint64_t raw_draws() const noexcept { return raw_draws_; }

private:
  std::uint64_t next_raw();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::uint64_t raw_draws_ = 0;
};

// Identifies a family of replica streams: replica r uses stream first_stream + r.
struct StreamFamily {
  std::uint64_t seed = 0;
  std::uint64_t first_stream = 0;

  RngStream replica(std::uint64_t r) const { return RngStream(seed, first_stream + r); }
  // Disjoint sub-family, e.g. for successive bisection iterates.
  StreamFamily sub(std::uint64_t index) const { return {seed, first_stream + (index + 1) * kSubFamilyStride}; }

  static constexpr std::uint64_t kSubFamilyStride = std::uint64_t{1} << 32;
};

}  // namespace chemostat
