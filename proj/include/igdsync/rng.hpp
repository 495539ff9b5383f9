#pragma once

#include <cstdint>
#include <initializer_list>

#include <Eigen/Core>

namespace igdsync {

/// SplitMix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t z);

/// Counter-based keyed generator. The key is folded from an arbitrary
/// tuple of 64-bit fields at construction; every output is a pure
/// function of (key, counter), so draws can be evaluated out of order
/// and concurrently without changing results.
class KeyedRng {
 public:
  explicit KeyedRng(std::initializer_list<std::uint64_t> fields);

  std::uint64_t bits(std::uint64_t counter) const;

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform(std::uint64_t counter) const;

  /// Standard normal via Box-Muller; consumes bit counters 2c and 2c+1.
  double gaussian(std::uint64_t counter) const;

  /// n i.i.d. standard normals at gaussian counters base..base+n-1.
  Eigen::VectorXd gaussian_vector(int n, std::uint64_t base = 0) const;

 private:
  std::uint64_t key_;
};

// Tags used to separate key domains (instance generation, initial
// points, error draws). Arbitrary but fixed constants.
namespace keytag {
inline constexpr std::uint64_t kInstance = 0x696e7374616e6365ull;
inline constexpr std::uint64_t kInitPoint = 0x696e69747074ull;
inline constexpr std::uint64_t kError = 0x6572726f72ull;
}  // namespace keytag

}  // namespace igdsync
