#pragma once

#include <cmath>
#include <stdexcept>

namespace edgefuse {

// Quadratic map-fusion latency model: t(k) = alpha*k^2 + beta*k + gamma seconds
// for fusing k maps on a unit-speed server. Scaled by a server's compute factor.
struct FusionLatencyModel {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  // Invariant: predictions are nonnegative for all k >= 1.
  void validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma))
      throw std::invalid_argument("fusion model coefficients must be finite");
    if (alpha < 0.0)
      throw std::invalid_argument("fusion model quadratic coefficient must be >= 0");
    if (predict(1, 1.0) < 0.0)
      throw std::invalid_argument("fusion model must be nonnegative at k = 1");
    if (alpha > 0.0) {
      double vertex = -beta / (2.0 * alpha);
      if (vertex > 1.0) {
        int k = static_cast<int>(vertex);
        for (int c = k; c <= k + 1; ++c)
          if (c >= 1 && predict(c, 1.0) < 0.0)
            throw std::invalid_argument("fusion model must be nonnegative for all k >= 1");
      }
    } else if (beta < 0.0) {
      throw std::invalid_argument("fusion model must be nonnegative for all k >= 1");
    }
  }

  double predict(int map_count, double compute_scale) const {
    if (map_count < 1)
      throw std::invalid_argument("fusion latency needs at least one map");
    if (compute_scale <= 0.0)
      throw std::invalid_argument("compute scale must be > 0");
    double k = static_cast<double>(map_count);
    return (alpha * k * k + beta * k + gamma) * compute_scale;
  }

  FusionLatencyModel scaled(double factor) const {
    return FusionLatencyModel{alpha * factor, beta * factor, gamma * factor};
  }

  bool operator==(const FusionLatencyModel&) const = default;
};

}  // namespace edgefuse
