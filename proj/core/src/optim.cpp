#include "deepcnl/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace deepcnl {

Adam::Adam(std::vector<Parameter*> params, AdamConfig cfg)
    : params_(std::move(params)), cfg_(cfg) {
  for (Parameter* p : params_) {
    m_.push_back(NdArray::zeros_like(p->value));
    v_.push_back(NdArray::zeros_like(p->value));
  }
}

void Adam::step() {
  ++t_;
  double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t pi = 0; pi < params_.size(); ++pi) {
    Parameter& p = *params_[pi];
    if (!p.grad.all_finite())
      throw std::runtime_error("Adam::step: non-finite gradient in " + p.name);
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      double g = p.grad[i];
      m_[pi][i] = cfg_.beta1 * m_[pi][i] + (1.0 - cfg_.beta1) * g;
      v_[pi][i] = cfg_.beta2 * v_[pi][i] + (1.0 - cfg_.beta2) * g * g;
      double mhat = m_[pi][i] / bc1;
      double vhat = v_[pi][i] / bc2;
      p.value[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    p.zero_grad();
  }
}

void Adam::restore(std::vector<NdArray> m, std::vector<NdArray> v, std::size_t t) {
  if (m.size() != params_.size() || v.size() != params_.size())
    throw std::invalid_argument("Adam::restore: moment count mismatch");
  m_ = std::move(m);
  v_ = std::move(v);
  t_ = t;
}

std::vector<NdArray> finite_diff_grad(const std::function<double()>& f,
                                      std::vector<Parameter*> params, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("finite_diff_grad: eps must be positive");
  std::vector<NdArray> grads;
  for (Parameter* p : params) {
    NdArray g = NdArray::zeros_like(p->value);
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      double saved = p->value[i];
      p->value[i] = saved + eps;
      double fp = f();
      p->value[i] = saved - eps;
      double fm = f();
      p->value[i] = saved;
      if (!std::isfinite(fp) || !std::isfinite(fm))
        throw std::runtime_error("finite_diff_grad: f returned non-finite value");
      g[i] = (fp - fm) / (2.0 * eps);
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

}  // namespace deepcnl
