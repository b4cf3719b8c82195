#ifndef DEEPCNL_TAPE_HPP
#define DEEPCNL_TAPE_HPP

#include <functional>
#include <string>
#include <vector>

#include "deepcnl/ndarray.hpp"

namespace deepcnl {

/// Trainable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  NdArray value;
  NdArray grad;

  Parameter() = default;
  Parameter(std::string n, NdArray v)
      : name(std::move(n)), value(std::move(v)), grad(NdArray::zeros_like(value)) {}

  void zero_grad() { grad.fill(0.0); }
};

/// Handle into a Tape node.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

/// Reverse-mode tape over a fixed primitive set: elementwise add/mul,
/// matrix-vector product, sliding-window convolution, sigmoid, tanh,
/// exp, log, sqrt, sum. Nodes are appended in topological order;
/// backward() walks them in reverse and accumulates into bound Parameters.
class Tape {
 public:
  Var param(Parameter& p);
  Var constant(NdArray v);
  Var constant_scalar(double v) { return constant(NdArray::scalar(v)); }

  Var add(Var a, Var b);        // same shape, or b scalar (broadcast)
  Var sub(Var a, Var b);        // same shape
  Var mul(Var a, Var b);        // elementwise, same shape
  Var scale(Var a, double s);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var sqrt(Var a);
  Var sum(Var a);               // -> scalar
  Var sum_squares(Var a);       // -> scalar

  /// w: R x C matrix, x: length-C vector -> length-R vector
  Var matvec(Var w, Var x);

  /// 1-d concatenation of vectors
  Var concat(const std::vector<Var>& parts);

  /// column c of a K x T row-major matrix -> length-K vector
  Var pick_col(Var a, std::size_t t_len, std::size_t col);

  /// Valid sliding-window convolution of K kernels over a constant
  /// observation matrix. kernels: flattened K x (L*rows) with layout
  /// [k][window offset][row]; obs: rows x N. Result: K x (N-L+1) row-major,
  /// each entry the windowed dot product plus the scalar bias.
  Var conv_rows(Var kernels, Var bias, const NdArray& obs, std::size_t num_kernels,
                std::size_t window);

  const NdArray& value(Var v) const { return nodes_[v.id].val; }
  const NdArray& grad(Var v) const { return nodes_[v.id].grad; }
  std::size_t num_nodes() const { return nodes_.size(); }

  /// Seeds d(out)/d(out)=1 and accumulates gradients into every bound
  /// Parameter. out must be a scalar (size 1). Throws on non-finite
  /// intermediates.
  void backward(Var out);

  void clear();

 private:
  struct Node {
    NdArray val;
    NdArray grad;
    std::function<void(Tape&, Node&)> back;  // null for leaves/constants
    Parameter* bound = nullptr;
  };

  Var push(NdArray val, std::function<void(Tape&, Node&)> back);
  Node& node(Var v) { return nodes_[v.id]; }

  std::vector<Node> nodes_;
};

}  // namespace deepcnl

#endif  // DEEPCNL_TAPE_HPP
