#pragma once

#include <cstdint>
#include <random>

#include "ippopt/objective.hpp"

namespace ippopt {

using Rng = std::mt19937_64;

/// Anchor x, prox scale t and Gibbs temperature delta of one proximal query.
struct ProxQuery {
  Vector x;
  double t = 1.0;
  double delta = 0.1;
};

struct ProxEstimate {
  Vector point;
  /// (sum w)^2 / sum w^2, in [1, N].
  double effective_sample_size = 0.0;
  /// log sum_i exp(-f(z_i) / delta), computed through the shifted weights.
  double log_normalizer = 0.0;
};

/// Self-normalized Monte Carlo estimate of the Gibbs mean
///   E[z exp(-f(z)/delta)] / E[exp(-f(z)/delta)],  z ~ N(x, delta t I).
///
/// Weights are shifted by the batch minimum of f so the largest weight is 1.
/// Performs exactly `samples` objective evaluations. Throws
/// std::domain_error if f is not finite at a sample (the message carries the
/// sample point).
ProxEstimate prox_mc(const Objective& f, const ProxQuery& q, int samples, Rng& rng);

/// alpha * estimate + (1 - alpha) * previous.
Vector ewma_combine(const Vector& estimate, const Vector& previous, double alpha);

/// ceil(scale * delta^{-1/2} * alpha / (2 - alpha)). Advisory sample size.
std::int64_t sample_size_hint(double delta, double alpha, double scale);

}  // namespace ippopt
