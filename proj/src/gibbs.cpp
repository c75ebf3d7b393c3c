#include "ippopt/gibbs.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ippopt {

ProxEstimate prox_mc(const Objective& f, const ProxQuery& q, int samples, Rng& rng) {
  if (samples < 1) throw std::invalid_argument("prox_mc: sample count must be >= 1");
  if (!(q.t > 0.0) || !(q.delta > 0.0)) {
    throw std::invalid_argument("prox_mc: t and delta must be positive");
  }
  const Eigen::Index d = q.x.size();
  const double sd = std::sqrt(q.delta * q.t);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd z(d, samples);
  std::vector<double> fz(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) z(j, i) = q.x[j] + sd * normal(rng);
  }
  double fmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double v = f(z.col(i));
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "prox_mc: objective '" << f.name() << "' is not finite at sample ["
          << z.col(i).transpose() << "]";
      throw std::domain_error(msg.str());
    }
    fz[static_cast<std::size_t>(i)] = v;
    fmin = std::min(fmin, v);
  }

  Vector num = Vector::Zero(d);
  double den = 0.0;
  double den2 = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double w = std::exp(-(fz[static_cast<std::size_t>(i)] - fmin) / q.delta);
    num += w * z.col(i);
    den += w;
    den2 += w * w;
  }
  ProxEstimate out;
  out.point = num / den;
  out.effective_sample_size = den * den / den2;
  out.log_normalizer = std::log(den) - fmin / q.delta;
  return out;
}

Vector ewma_combine(const Vector& estimate, const Vector& previous, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("ewma_combine: alpha must lie in (0, 1]");
  }
  if (alpha == 1.0) return estimate;
  return alpha * estimate + (1.0 - alpha) * previous;
}

std::int64_t sample_size_hint(double delta, double alpha, double scale) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("sample_size_hint: delta must lie in (0, 1)");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("sample_size_hint: alpha must lie in (0, 1]");
  }
  const double raw = scale * alpha / ((2.0 - alpha) * std::sqrt(delta));
  // Guard against 2.0000000000000004 style round-up.
  return static_cast<std::int64_t>(std::ceil(raw - 1e-12 * raw));
}

}  // namespace ippopt
