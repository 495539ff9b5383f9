#include "igdsync/errors.hpp"

#include <cmath>
#include <stdexcept>

#include "igdsync/rng.hpp"

namespace igdsync {

ErrorMode parse_error_mode(const std::string& s) {
  if (s == "none") return ErrorMode::none;
  if (s == "ball") return ErrorMode::ball;
  if (s == "sphere") return ErrorMode::sphere;
  if (s == "shared") return ErrorMode::shared_per_source;
  if (s == "quant") return ErrorMode::quantizer;
  throw std::invalid_argument("unknown error mode '" + s + "' (none|ball|sphere|shared|quant)");
}

std::string to_string(ErrorMode m) {
  switch (m) {
    case ErrorMode::none: return "none";
    case ErrorMode::ball: return "ball";
    case ErrorMode::sphere: return "sphere";
    case ErrorMode::shared_per_source: return "shared";
    case ErrorMode::quantizer: return "quant";
  }
  return "?";
}

Eigen::VectorXd quantize(const Eigen::VectorXd& v, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("quantize: epsilon must be positive");
  if (v.size() < 1) throw std::invalid_argument("quantize: empty vector");
  double delta = 2.0 * epsilon / std::sqrt(static_cast<double>(v.size()));
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out[i] = delta * std::round(v[i] / delta);  // std::round ties away from zero
  return out;
}

Eigen::VectorXd draw_error(const ErrorModel& model, int receiver, int source,
                           long k, long trial, int n, const Eigen::VectorXd* measured) {
  if (model.mode == ErrorMode::none || model.epsilon == 0.0)
    return Eigen::VectorXd::Zero(n);
  if (model.mode == ErrorMode::quantizer) {
    if (measured == nullptr) return Eigen::VectorXd::Zero(n);
    return quantize(*measured, model.epsilon) - *measured;
  }
  bool shared = model.mode == ErrorMode::shared_per_source;
  KeyedRng rng({model.seed, keytag::kError, static_cast<std::uint64_t>(trial),
                static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(source),
                shared ? 0ull : static_cast<std::uint64_t>(receiver) + 1});
  Eigen::VectorXd dir = rng.gaussian_vector(n);
  double norm = dir.norm();
  if (norm < 1e-300) {
    dir.setZero();
    dir[0] = 1.0;
    norm = 1.0;
  }
  double mag = model.epsilon;
  if (model.mode == ErrorMode::ball || shared)
    mag *= rng.uniform(2 * static_cast<std::uint64_t>(n));  // gaussians used bit counters < 2n
  return (mag / norm) * dir;
}

}  // namespace igdsync
