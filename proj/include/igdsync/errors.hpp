#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Core>

namespace igdsync {

enum class ErrorMode { none, ball, sphere, shared_per_source, quantizer };

ErrorMode parse_error_mode(const std::string& s);  // none|ball|sphere|shared|quant
std::string to_string(ErrorMode m);

/// Bounded measurement-error source: every generated vector e satisfies
/// ||e|| <= epsilon. In shared_per_source mode the draw depends only on
/// (source, iteration, trial), mirroring the IGDDS condition; in
/// quantizer mode the error is the deterministic quantization residual
/// of the measured vector.
struct ErrorModel {
  ErrorMode mode = ErrorMode::ball;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

/// Rounds each coordinate of v to the nearest multiple of
/// delta = 2*epsilon/sqrt(n), ties away from zero, so that
/// ||quantize(v) - v|| <= epsilon. epsilon must be positive.
Eigen::VectorXd quantize(const Eigen::VectorXd& v, double epsilon);

/// The error vector added to the gradient sent from `source` to
/// `receiver` at global iteration k of the given trial. `measured` is
/// the vector being transmitted; it is consulted only in quantizer
/// mode. Pure function of the key tuple.
Eigen::VectorXd draw_error(const ErrorModel& model, int receiver, int source,
                           long k, long trial, int n,
                           const Eigen::VectorXd* measured = nullptr);

}  // namespace igdsync
