#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace cohortmn::rng {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// splitmix64 (Steele, Lea, Flood). Used only to derive seeds and fill
/// generator state; never as the simulation stream itself.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += kGoldenGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256++ (Blackman, Vigna). 256-bit state, passes BigCrush.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed) {
    SplitMix64 filler(seed);
    for (auto& word : state_) word = filler.next();
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) {
      state_[0] = kGoldenGamma;  // the all-zero state is a fixed point
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_;
};

/// Seed for stream `index` under `master_seed`. Random access by index,
/// so parallel and serial execution consume identical streams. Each
/// index is pushed through a full avalanche before use to keep the
/// splitmix fill points of different streams unrelated.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                        std::uint64_t index) {
  SplitMix64 base(master_seed);
  const std::uint64_t anchor = base.next();
  SplitMix64 mix(anchor + (index + 1) * kGoldenGamma);
  return mix.next();
}

inline Xoshiro256pp stream(std::uint64_t master_seed, std::uint64_t index) {
  return Xoshiro256pp(derive_stream_seed(master_seed, index));
}

/// Uniform double in [0, 1) built from the top 53 bits, identical on
/// every platform for a given bit stream.
template <class Generator>
double uniform01(Generator& g) {
  return static_cast<double>(g.next() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF table for one categorical row with a fixed state order.
struct CategoricalTable {
  std::vector<double> cumulative;
  std::size_t fallback = 0;  // last positive-probability state

  static CategoricalTable from_probabilities(std::span<const double> probs) {
    CategoricalTable table;
    table.cumulative.resize(probs.size());
    double cum = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      cum += probs[k];
      table.cumulative[k] = cum;
      if (probs[k] > 0.0) table.fallback = k;
    }
    return table;
  }

  /// Smallest k with u < cumulative[k]; rounding that leaves u past the
  /// final cumulative value lands on the last positive-mass state.
  std::size_t sample(double u) const {
    for (std::size_t k = 0; k < cumulative.size(); ++k) {
      if (u < cumulative[k]) return k;
    }
    return fallback;
  }
};

/// Standard normal via the Marsaglia polar method (no trig calls).
template <class Generator>
double sample_normal(Generator& g) {
  for (;;) {
    const double u = 2.0 * uniform01(g) - 1.0;
    const double v = 2.0 * uniform01(g) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

/// Gamma(shape, 1) via Marsaglia-Tsang, with the usual shape+1 boost
/// for shape < 1.
template <class Generator>
double sample_gamma(Generator& g, double shape) {
  double boost = 1.0;
  if (shape < 1.0) {
    boost = std::pow(uniform01(g), 1.0 / shape);
    shape += 1.0;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = sample_normal(g);
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = uniform01(g);
    if (u < 1.0 - 0.0331 * (x * x) * (x * x)) return boost * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return boost * d * v;
    }
  }
}

}  // namespace cohortmn::rng
