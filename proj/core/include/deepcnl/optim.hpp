#ifndef DEEPCNL_OPTIM_HPP
#define DEEPCNL_OPTIM_HPP

#include <functional>
#include <vector>

#include "deepcnl/tape.hpp"

namespace deepcnl {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction over a fixed parameter set. Moments are kept
/// positionally, so the parameter list must stay stable across steps.
class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamConfig cfg = {});

  /// One update from the currently accumulated grads; grads are zeroed after.
  void step();

  std::size_t step_count() const { return t_; }
  const AdamConfig& config() const { return cfg_; }
  const std::vector<NdArray>& first_moments() const { return m_; }
  const std::vector<NdArray>& second_moments() const { return v_; }

  /// Restores optimizer state (checkpoint resume).
  void restore(std::vector<NdArray> m, std::vector<NdArray> v, std::size_t t);

 private:
  std::vector<Parameter*> params_;
  AdamConfig cfg_;
  std::vector<NdArray> m_, v_;
  std::size_t t_ = 0;
};

/// Central-difference gradient of f per parameter coordinate,
/// (f(x+eps) - f(x-eps)) / (2 eps). Verification oracle; unreliable at kinks.
std::vector<NdArray> finite_diff_grad(const std::function<double()>& f,
                                      std::vector<Parameter*> params, double eps);

}  // namespace deepcnl

#endif  // DEEPCNL_OPTIM_HPP
