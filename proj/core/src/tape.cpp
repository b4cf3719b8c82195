#include "deepcnl/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace deepcnl {

Var Tape::push(NdArray val, std::function<void(Tape&, Node&)> back) {
  if (!val.all_finite())
    throw std::runtime_error("Tape: non-finite value produced at node " +
                             std::to_string(nodes_.size()));
  Node n;
  n.grad = NdArray::zeros_like(val);
  n.val = std::move(val);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::param(Parameter& p) {
  Var v = push(p.value, nullptr);
  nodes_[v.id].bound = &p;
  return v;
}

Var Tape::constant(NdArray v) { return push(std::move(v), nullptr); }

Var Tape::add(Var a, Var b) {
  const NdArray& av = value(a);
  const NdArray& bv = value(b);
  bool scalar_b = bv.size() == 1 && av.size() != 1;
  if (!scalar_b && !av.same_shape(bv)) throw std::invalid_argument("Tape::add: shape mismatch");
  NdArray out = av;
  if (scalar_b) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[0];
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  }
  return push(std::move(out), [a, b, scalar_b](Tape& t, Node& n) {
    Node& na = t.node(a);
    Node& nb = t.node(b);
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      na.grad[i] += n.grad[i];
      nb.grad[scalar_b ? 0 : i] += n.grad[i];
    }
  });
}

Var Tape::sub(Var a, Var b) {
  const NdArray& av = value(a);
  const NdArray& bv = value(b);
  if (!av.same_shape(bv)) throw std::invalid_argument("Tape::sub: shape mismatch");
  NdArray out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  return push(std::move(out), [a, b](Tape& t, Node& n) {
    Node& na = t.node(a);
    Node& nb = t.node(b);
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      na.grad[i] += n.grad[i];
      nb.grad[i] -= n.grad[i];
    }
  });
}

Var Tape::mul(Var a, Var b) {
  const NdArray& av = value(a);
  const NdArray& bv = value(b);
  if (!av.same_shape(bv)) throw std::invalid_argument("Tape::mul: shape mismatch");
  NdArray out = av;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  return push(std::move(out), [a, b](Tape& t, Node& n) {
    Node& na = t.node(a);
    Node& nb = t.node(b);
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      na.grad[i] += n.grad[i] * nb.val[i];
      nb.grad[i] += n.grad[i] * na.val[i];
    }
  });
}

Var Tape::scale(Var a, double s) {
  NdArray out = value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= s;
  return push(std::move(out), [a, s](Tape& t, Node& n) {
    Node& na = t.node(a);
    for (std::size_t i = 0; i < n.grad.size(); ++i) na.grad[i] += s * n.grad[i];
  });
}

Var Tape::sigmoid(Var a) {
  NdArray out = value(a);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double x = out[i];
    out[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
  }
  return push(std::move(out), [a](Tape& t, Node& n) {
    Node& na = t.node(a);
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      na.grad[i] += n.grad[i] * n.val[i] * (1.0 - n.val[i]);
  });
}

Var Tape::tanh(Var a) {
  NdArray out = value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
  return push(std::move(out), [a](Tape& t, Node& n) {
    Node& na = t.node(a);
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      na.grad[i] += n.grad[i] * (1.0 - n.val[i] * n.val[i]);
  });
}

Var Tape::exp(Var a) {
  NdArray out = value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(out[i]);
  return push(std::move(out), [a](Tape& t, Node& n) {
    Node& na = t.node(a);
    for (std::size_t i = 0; i < n.grad.size(); ++i) na.grad[i] += n.grad[i] * n.val[i];
  });
}

Var Tape::log(Var a) {
  NdArray out = value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(out[i]);
  return push(std::move(out), [a](Tape& t, Node& n) {
    Node& na = t.node(a);
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      na.grad[i] += n.grad[i] / na.val[i];
  });
}

Var Tape::sqrt(Var a) {
  NdArray out = value(a);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::sqrt(out[i]);
  return push(std::move(out), [a](Tape& t, Node& n) {
    Node& na = t.node(a);
    for (std::size_t i = 0; i < n.grad.size(); ++i)
      na.grad[i] += n.grad[i] * 0.5 / n.val[i];
  });
}

Var Tape::sum(Var a) {
  double s = 0.0;
  const NdArray& av = value(a);
  for (std::size_t i = 0; i < av.size(); ++i) s += av[i];
  return push(NdArray::scalar(s), [a](Tape& t, Node& n) {
    Node& na = t.node(a);
    for (std::size_t i = 0; i < na.grad.size(); ++i) na.grad[i] += n.grad[0];
  });
}

Var Tape::sum_squares(Var a) {
  const NdArray& av = value(a);
  return push(NdArray::scalar(av.sum_of_squares()), [a](Tape& t, Node& n) {
    Node& na = t.node(a);
    for (std::size_t i = 0; i < na.grad.size(); ++i)
      na.grad[i] += 2.0 * na.val[i] * n.grad[0];
  });
}

Var Tape::matvec(Var w, Var x) {
  const NdArray& wv = value(w);
  const NdArray& xv = value(x);
  if (wv.ndim() != 2 || wv.cols() != xv.size())
    throw std::invalid_argument("Tape::matvec: shape mismatch");
  std::size_t R = wv.rows(), C = wv.cols();
  NdArray out({R});
  for (std::size_t r = 0; r < R; ++r) {
    double s = 0.0;
    const double* row = wv.data() + r * C;
    for (std::size_t c = 0; c < C; ++c) s += row[c] * xv[c];
    out[r] = s;
  }
  return push(std::move(out), [w, x, R, C](Tape& t, Node& n) {
    Node& nw = t.node(w);
    Node& nx = t.node(x);
    for (std::size_t r = 0; r < R; ++r) {
      double gy = n.grad[r];
      if (gy == 0.0) continue;
      double* gw = nw.grad.data() + r * C;
      const double* wrow = nw.val.data() + r * C;
      for (std::size_t c = 0; c < C; ++c) {
        gw[c] += gy * nx.val[c];
        nx.grad[c] += gy * wrow[c];
      }
    }
  });
}

Var Tape::concat(const std::vector<Var>& parts) {
  std::size_t total = 0;
  for (Var p : parts) total += value(p).size();
  NdArray out({total});
  std::size_t off = 0;
  for (Var p : parts) {
    const NdArray& pv = value(p);
    for (std::size_t i = 0; i < pv.size(); ++i) out[off + i] = pv[i];
    off += pv.size();
  }
  std::vector<Var> ps = parts;
  return push(std::move(out), [ps](Tape& t, Node& n) {
    std::size_t off = 0;
    for (Var p : ps) {
      Node& np = t.node(p);
      for (std::size_t i = 0; i < np.grad.size(); ++i) np.grad[i] += n.grad[off + i];
      off += np.grad.size();
    }
  });
}

Var Tape::pick_col(Var a, std::size_t t_len, std::size_t col) {
  const NdArray& av = value(a);
  if (av.size() % t_len != 0 || col >= t_len)
    throw std::invalid_argument("Tape::pick_col: bad column");
  std::size_t K = av.size() / t_len;
  NdArray out({K});
  for (std::size_t k = 0; k < K; ++k) out[k] = av[k * t_len + col];
  return push(std::move(out), [a, t_len, col, K](Tape& t, Node& n) {
    Node& na = t.node(a);
    for (std::size_t k = 0; k < K; ++k) na.grad[k * t_len + col] += n.grad[k];
  });
}

Var Tape::conv_rows(Var kernels, Var bias, const NdArray& obs, std::size_t num_kernels,
                    std::size_t window) {
  const NdArray& kv = value(kernels);
  const NdArray& bv = value(bias);
  if (obs.ndim() != 2) throw std::invalid_argument("Tape::conv_rows: obs must be 2-d");
  std::size_t rows = obs.rows(), N = obs.cols();
  if (N < window) throw std::invalid_argument("Tape::conv_rows: series shorter than window");
  if (kv.size() != num_kernels * window * rows || bv.size() != 1)
    throw std::invalid_argument("Tape::conv_rows: kernel shape mismatch");
  std::size_t T = N - window + 1;
  NdArray out({num_kernels, T});
  for (std::size_t k = 0; k < num_kernels; ++k) {
    const double* ker = kv.data() + k * window * rows;
    for (std::size_t t = 0; t < T; ++t) {
      double s = bv[0];
      for (std::size_t dt = 0; dt < window; ++dt)
        for (std::size_t r = 0; r < rows; ++r) s += ker[dt * rows + r] * obs.at(r, t + dt);
      out.at(k, t) = s;
    }
  }
  NdArray obs_copy = obs;
  return push(std::move(out),
              [kernels, bias, obs_copy, num_kernels, window, rows, T](Tape& t, Node& n) {
                Node& nk = t.node(kernels);
                Node& nb = t.node(bias);
                for (std::size_t k = 0; k < num_kernels; ++k) {
                  double* gker = nk.grad.data() + k * window * rows;
                  for (std::size_t tt = 0; tt < T; ++tt) {
                    double gy = n.grad[k * T + tt];
                    if (gy == 0.0) continue;
                    nb.grad[0] += gy;
                    for (std::size_t dt = 0; dt < window; ++dt)
                      for (std::size_t r = 0; r < rows; ++r)
                        gker[dt * rows + r] += gy * obs_copy.at(r, tt + dt);
                  }
                }
              });
}

void Tape::backward(Var out) {
  if (!out.valid() || value(out).size() != 1)
    throw std::invalid_argument("Tape::backward: output must be a scalar");
  nodes_[out.id].grad[0] = 1.0;
  for (int i = out.id; i >= 0; --i) {
    Node& n = nodes_[i];
    if (n.back) n.back(*this, n);
  }
  for (Node& n : nodes_) {
    if (!n.bound) continue;
    if (!n.grad.all_finite()) throw std::runtime_error("Tape::backward: non-finite gradient");
    for (std::size_t i = 0; i < n.grad.size(); ++i) n.bound->grad[i] += n.grad[i];
  }
}

void Tape::clear() { nodes_.clear(); }

}  // namespace deepcnl
