#include "igdsync/rng.hpp"

#include <cmath>

namespace igdsync {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

KeyedRng::KeyedRng(std::initializer_list<std::uint64_t> fields) : key_(0x8f1bbcdcbfa53e0bull) {
  for (std::uint64_t f : fields) key_ = mix64(key_ ^ mix64(f + kGolden));
}

std::uint64_t KeyedRng::bits(std::uint64_t counter) const {
  return mix64(key_ + counter * kGolden);
}

double KeyedRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

double KeyedRng::gaussian(std::uint64_t counter) const {
  // u1 shifted away from zero so the log is always finite.
  double u1 = (static_cast<double>(bits(2 * counter) >> 11) + 1.0) * 0x1.0p-53;
  double u2 = static_cast<double>(bits(2 * counter + 1) >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

Eigen::VectorXd KeyedRng::gaussian_vector(int n, std::uint64_t base) const {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = gaussian(base + static_cast<std::uint64_t>(i));
  return v;
}

}  // namespace igdsync
