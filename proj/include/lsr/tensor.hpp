#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsr {

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense row-major float64 tensor. `node` links the value to the tape that
/// produced it (-1 means constant / untracked).
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;
  int node = -1;

  Tensor() = default;
  Tensor(std::vector<int> shp, std::vector<double> values);

  static Tensor zeros(std::vector<int> shp);
  static Tensor full(std::vector<int> shp, double value);
  static Tensor scalar(double value);
  static Tensor eye(int n);
  static Tensor from_rows(const std::vector<std::vector<double>>& rows);
  static Tensor uniform(std::vector<int> shp, double lo, double hi,
                        std::mt19937_64& rng);

  int rows() const;
  int cols() const;
  std::size_t numel() const { return data.size(); }
  bool is_scalar() const { return data.size() == 1; }
  bool is_matrix() const { return shape.size() == 2; }
  bool is_vector() const { return shape.size() == 1; }

  double& at(int i, int j);
  double at(int i, int j) const;
  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  std::string shape_str() const;
};

/// Reverse-mode tape. Operations record a backward rule as they execute;
/// nodes are appended in topological order by construction. A tape is
/// single-owner: one forward pass, one backward() call.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Registers a leaf (trainable input) on the tape.
  Tensor leaf(const Tensor& value);

  /// Runs reverse accumulation from a scalar loss. Each node's backward
  /// rule fires exactly once.
  void backward(const Tensor& loss);

  /// Gradient of the last backward() target w.r.t. the given node.
  const std::vector<double>& grad(int node) const;

  std::size_t size() const { return nodes_.size(); }

  // --- elementwise / linear op suite -------------------------------------
  Tensor matmul(const Tensor& a, const Tensor& b);
  Tensor transpose(const Tensor& a);
  Tensor add(const Tensor& a, const Tensor& b);
  Tensor sub(const Tensor& a, const Tensor& b);
  Tensor mul(const Tensor& a, const Tensor& b);
  Tensor scalar_mul(const Tensor& a, double c);
  Tensor add_rowvec(const Tensor& m, const Tensor& v);  // bias over rows
  Tensor mul_rowvec(const Tensor& m, const Tensor& v);  // scales column j by v[j]
  Tensor tanh(const Tensor& a);
  Tensor relu(const Tensor& a);
  Tensor sigmoid(const Tensor& a);
  Tensor exp(const Tensor& a);
  Tensor log(const Tensor& a);
  Tensor clamp(const Tensor& a, double lo, double hi);
  Tensor concat_cols(const Tensor& a, const Tensor& b);
  Tensor stack_rows(const std::vector<Tensor>& parts);
  Tensor slice_rows(const Tensor& a, int begin, int end);
  Tensor slice_cols(const Tensor& a, int begin, int end);
  Tensor row(const Tensor& a, int i);
  Tensor mean_over_rows(const Tensor& a);
  Tensor sum(const Tensor& a);
  Tensor col_sums(const Tensor& a);
  Tensor diag_embed(const Tensor& v);
  Tensor diagonal_of(const Tensor& m);
  Tensor col(const Tensor& a, int j);  // returns {n} vector

  // --- LU-backed ops ------------------------------------------------------
  /// Matrix inverse; backward rule is -A^{-T} G A^{-T}.
  Tensor inverse(const Tensor& a);
  /// log|det A| as a scalar; backward rule is g * A^{-T}.
  Tensor logdet(const Tensor& a);

 private:
  struct Node {
    std::size_t numel = 0;
    std::function<void(Tape&, const std::vector<double>&)> back;
  };

  int record(Tensor& out, std::function<void(Tape&, const std::vector<double>&)> back);
  void accum(int node, std::size_t i, double g);
  void accum_all(int node, const std::vector<double>& g);
  static bool tracked(const Tensor& t) { return t.node >= 0; }

  std::vector<Node> nodes_;
  std::vector<std::vector<double>> grads_;
  bool ran_backward_ = false;
};

namespace detail {
void check_finite(const char* op, const std::vector<double>& data);
void check_matrix(const char* op, const Tensor& t);
[[noreturn]] void shape_fail(const char* op, const Tensor& a, const Tensor& b);
}  // namespace detail

}  // namespace lsr
