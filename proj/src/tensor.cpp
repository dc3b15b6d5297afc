#include "lsr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lsr/linalg.hpp"

namespace lsr {

namespace {

std::size_t shape_numel(const std::vector<int>& shp) {
  std::size_t n = 1;
  for (int d : shp) {
    if (d < 0) throw ShapeError("negative dimension in tensor shape");
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<int> shp, std::vector<double> values)
    : shape(std::move(shp)), data(std::move(values)) {
  if (shape_numel(shape) != data.size()) {
    throw ShapeError("tensor data length " + std::to_string(data.size()) +
                     " does not match shape " + shape_str());
  }
}

Tensor Tensor::zeros(std::vector<int> shp) {
  std::size_t n = shape_numel(shp);
  return Tensor(std::move(shp), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(std::vector<int> shp, double value) {
  std::size_t n = shape_numel(shp);
  return Tensor(std::move(shp), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::eye(int n) {
  Tensor t = zeros({n, n});
  for (int i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

Tensor Tensor::from_rows(const std::vector<std::vector<double>>& rows) {
  int r = static_cast<int>(rows.size());
  int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
  Tensor t = zeros({r, c});
  for (int i = 0; i < r; ++i) {
    if (static_cast<int>(rows[i].size()) != c) {
      throw ShapeError("ragged row list in from_rows");
    }
    for (int j = 0; j < c; ++j) t.at(i, j) = rows[i][j];
  }
  return t;
}

Tensor Tensor::uniform(std::vector<int> shp, double lo, double hi,
                       std::mt19937_64& rng) {
  Tensor t = zeros(std::move(shp));
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& v : t.data) v = dist(rng);
  return t;
}

int Tensor::rows() const {
  if (shape.size() == 2) return shape[0];
  if (shape.size() == 1) return 1;
  throw ShapeError("rows() on tensor of shape " + shape_str());
}

int Tensor::cols() const {
  if (shape.size() == 2) return shape[1];
  if (shape.size() == 1) return shape[0];
  throw ShapeError("cols() on tensor of shape " + shape_str());
}

double& Tensor::at(int i, int j) { return data[static_cast<std::size_t>(i) * cols() + j]; }
double Tensor::at(int i, int j) const { return data[static_cast<std::size_t>(i) * cols() + j]; }

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ",";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

namespace detail {

void check_finite(const char* op, const std::vector<double>& data) {
  for (double v : data) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite value produced by op '") + op + "'");
    }
  }
}

void check_matrix(const char* op, const Tensor& t) {
  if (t.shape.size() != 2) {
    throw ShapeError(std::string(op) + ": expected a matrix, got shape " + t.shape_str());
  }
}

void shape_fail(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_str() +
                   " and " + b.shape_str());
}

}  // namespace detail

int Tape::record(Tensor& out,
                 std::function<void(Tape&, const std::vector<double>&)> back) {
  Node n;
  n.numel = out.numel();
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  out.node = static_cast<int>(nodes_.size()) - 1;
  return out.node;
}

void Tape::accum(int node, std::size_t i, double g) {
  auto& buf = grads_[node];
  if (buf.empty()) buf.assign(nodes_[node].numel, 0.0);
  buf[i] += g;
}

void Tape::accum_all(int node, const std::vector<double>& g) {
  auto& buf = grads_[node];
  if (buf.empty()) buf.assign(nodes_[node].numel, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) buf[i] += g[i];
}

Tensor Tape::leaf(const Tensor& value) {
  Tensor out = value;
  detail::check_finite("leaf", out.data);
  record(out, [](Tape&, const std::vector<double>&) {});
  return out;
}

void Tape::backward(const Tensor& loss) {
  if (!loss.is_scalar()) {
    throw ShapeError("backward: loss must be scalar, got shape " + loss.shape_str());
  }
  if (loss.node < 0) {
    throw NumericError("backward: loss is not on this tape");
  }
  grads_.assign(nodes_.size(), {});
  grads_[loss.node] = {1.0};
  for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) {
    if (grads_[i].empty()) continue;
    nodes_[i].back(*this, grads_[i]);
  }
  ran_backward_ = true;
}

const std::vector<double>& Tape::grad(int node) const {
  static const std::vector<double> kEmpty;
  if (!ran_backward_) throw NumericError("grad() before backward()");
  if (node < 0 || node >= static_cast<int>(grads_.size())) {
    throw NumericError("grad() for a node not on this tape");
  }
  return grads_[node].empty() ? kEmpty : grads_[node];
}

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  detail::check_matrix("matmul", a);
  detail::check_matrix("matmul", b);
  if (a.shape[1] != b.shape[0]) detail::shape_fail("matmul", a, b);
  const int m = a.shape[0], k = a.shape[1], n = b.shape[1];
  Tensor out = Tensor::zeros({m, n});
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < k; ++p) {
      const double av = a.at(i, p);
      if (av == 0.0) continue;
      for (int j = 0; j < n; ++j) out.at(i, j) += av * b.at(p, j);
    }
  }
  detail::check_finite("matmul", out.data);
  if (!tracked(a) && !tracked(b)) return out;
  record(out, [an = a.node, bn = b.node, av = a.data, bv = b.data, m, k,
               n](Tape& t, const std::vector<double>& g) {
    if (an >= 0) {
      // gA = G B^T
      for (int i = 0; i < m; ++i)
        for (int p = 0; p < k; ++p) {
          double s = 0.0;
          for (int j = 0; j < n; ++j)
            s += g[static_cast<std::size_t>(i) * n + j] * bv[static_cast<std::size_t>(p) * n + j];
          t.accum(an, static_cast<std::size_t>(i) * k + p, s);
        }
    }
    if (bn >= 0) {
      // gB = A^T G
      for (int p = 0; p < k; ++p)
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int i = 0; i < m; ++i)
            s += av[static_cast<std::size_t>(i) * k + p] * g[static_cast<std::size_t>(i) * n + j];
          t.accum(bn, static_cast<std::size_t>(p) * n + j, s);
        }
    }
  });
  return out;
}

Tensor Tape::transpose(const Tensor& a) {
  detail::check_matrix("transpose", a);
  const int r = a.shape[0], c = a.shape[1];
  Tensor out = Tensor::zeros({c, r});
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out.at(j, i) = a.at(i, j);
  if (!tracked(a)) return out;
  record(out, [an = a.node, r, c](Tape& t, const std::vector<double>& g) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        t.accum(an, static_cast<std::size_t>(i) * c + j, g[static_cast<std::size_t>(j) * r + i]);
  });
  return out;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  if (a.shape != b.shape) detail::shape_fail("add", a, b);
  Tensor out = a;
  out.node = -1;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  detail::check_finite("add", out.data);
  if (!tracked(a) && !tracked(b)) return out;
  record(out, [an = a.node, bn = b.node](Tape& t, const std::vector<double>& g) {
    if (an >= 0) t.accum_all(an, g);
    if (bn >= 0) t.accum_all(bn, g);
  });
  return out;
}

Tensor Tape::sub(const Tensor& a, const Tensor& b) {
  if (a.shape != b.shape) detail::shape_fail("sub", a, b);
  Tensor out = a;
  out.node = -1;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
  detail::check_finite("sub", out.data);
  if (!tracked(a) && !tracked(b)) return out;
  record(out, [an = a.node, bn = b.node](Tape& t, const std::vector<double>& g) {
    if (an >= 0) t.accum_all(an, g);
    if (bn >= 0)
      for (std::size_t i = 0; i < g.size(); ++i) t.accum(bn, i, -g[i]);
  });
  return out;
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
  if (a.shape != b.shape) detail::shape_fail("mul", a, b);
  Tensor out = a;
  out.node = -1;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
  detail::check_finite("mul", out.data);
  if (!tracked(a) && !tracked(b)) return out;
  record(out, [an = a.node, bn = b.node, av = a.data,
               bv = b.data](Tape& t, const std::vector<double>& g) {
    if (an >= 0)
      for (std::size_t i = 0; i < g.size(); ++i) t.accum(an, i, g[i] * bv[i]);
    if (bn >= 0)
      for (std::size_t i = 0; i < g.size(); ++i) t.accum(bn, i, g[i] * av[i]);
  });
  return out;
}

Tensor Tape::scalar_mul(const Tensor& a, double c) {
  Tensor out = a;
  out.node = -1;
  for (double& v : out.data) v *= c;
  detail::check_finite("scalar_mul", out.data);
  if (!tracked(a)) return out;
  record(out, [an = a.node, c](Tape& t, const std::vector<double>& g) {
    for (std::size_t i = 0; i < g.size(); ++i) t.accum(an, i, g[i] * c);
  });
  return out;
}

Tensor Tape::add_rowvec(const Tensor& m, const Tensor& v) {
  detail::check_matrix("add_rowvec", m);
  if (!v.is_vector() || v.shape[0] != m.shape[1]) detail::shape_fail("add_rowvec", m, v);
  const int r = m.shape[0], c = m.shape[1];
  Tensor out = m;
  out.node = -1;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out.at(i, j) += v[j];
  detail::check_finite("add_rowvec", out.data);
  if (!tracked(m) && !tracked(v)) return out;
  record(out, [mn = m.node, vn = v.node, r, c](Tape& t, const std::vector<double>& g) {
    if (mn >= 0) t.accum_all(mn, g);
    if (vn >= 0)
      for (int j = 0; j < c; ++j) {
        double s = 0.0;
        for (int i = 0; i < r; ++i) s += g[static_cast<std::size_t>(i) * c + j];
        t.accum(vn, j, s);
      }
  });
  return out;
}

Tensor Tape::mul_rowvec(const Tensor& m, const Tensor& v) {
  detail::check_matrix("mul_rowvec", m);
  if (!v.is_vector() || v.shape[0] != m.shape[1]) detail::shape_fail("mul_rowvec", m, v);
  const int r = m.shape[0], c = m.shape[1];
  Tensor out = m;
  out.node = -1;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out.at(i, j) *= v[j];
  detail::check_finite("mul_rowvec", out.data);
  if (!tracked(m) && !tracked(v)) return out;
  record(out, [mn = m.node, vn = v.node, mv = m.data, vv = v.data, r,
               c](Tape& t, const std::vector<double>& g) {
    if (mn >= 0)
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j)
          t.accum(mn, static_cast<std::size_t>(i) * c + j,
                  g[static_cast<std::size_t>(i) * c + j] * vv[j]);
    if (vn >= 0)
      for (int j = 0; j < c; ++j) {
        double s = 0.0;
        for (int i = 0; i < r; ++i)
          s += g[static_cast<std::size_t>(i) * c + j] * mv[static_cast<std::size_t>(i) * c + j];
        t.accum(vn, j, s);
      }
  });
  return out;
}

Tensor Tape::tanh(const Tensor& a) {
  Tensor out = a;
  out.node = -1;
  for (double& v : out.data) v = std::tanh(v);
  detail::check_finite("tanh", out.data);
  if (!tracked(a)) return out;
  record(out, [an = a.node, ov = out.data](Tape& t, const std::vector<double>& g) {
    for (std::size_t i = 0; i < g.size(); ++i) t.accum(an, i, g[i] * (1.0 - ov[i] * ov[i]));
  });
  return out;
}

Tensor Tape::relu(const Tensor& a) {
  Tensor out = a;
  out.node = -1;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  if (!tracked(a)) return out;
  record(out, [an = a.node, av = a.data](Tape& t, const std::vector<double>& g) {
    for (std::size_t i = 0; i < g.size(); ++i)
      if (av[i] > 0.0) t.accum(an, i, g[i]);
  });
  return out;
}

Tensor Tape::sigmoid(const Tensor& a) {
  Tensor out = a;
  out.node = -1;
  for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
  detail::check_finite("sigmoid", out.data);
  if (!tracked(a)) return out;
  record(out, [an = a.node, ov = out.data](Tape& t, const std::vector<double>& g) {
    for (std::size_t i = 0; i < g.size(); ++i) t.accum(an, i, g[i] * ov[i] * (1.0 - ov[i]));
  });
  return out;
}

Tensor Tape::exp(const Tensor& a) {
  Tensor out = a;
  out.node = -1;
  for (double& v : out.data) v = std::exp(v);
  detail::check_finite("exp", out.data);
  if (!tracked(a)) return out;
  record(out, [an = a.node, ov = out.data](Tape& t, const std::vector<double>& g) {
    for (std::size_t i = 0; i < g.size(); ++i) t.accum(an, i, g[i] * ov[i]);
  });
  return out;
}

Tensor Tape::log(const Tensor& a) {
  Tensor out = a;
  out.node = -1;
  for (double& v : out.data) v = std::log(v);
  detail::check_finite("log", out.data);
  if (!tracked(a)) return out;
  record(out, [an = a.node, av = a.data](Tape& t, const std::vector<double>& g) {
    for (std::size_t i = 0; i < g.size(); ++i) t.accum(an, i, g[i] / av[i]);
  });
  return out;
}

Tensor Tape::clamp(const Tensor& a, double lo, double hi) {
  Tensor out = a;
  out.node = -1;
  for (double& v : out.data) v = std::min(hi, std::max(lo, v));
  if (!tracked(a)) return out;
  record(out, [an = a.node, av = a.data, lo, hi](Tape& t, const std::vector<double>& g) {
    for (std::size_t i = 0; i < g.size(); ++i)
      if (av[i] > lo && av[i] < hi) t.accum(an, i, g[i]);
  });
  return out;
}

Tensor Tape::concat_cols(const Tensor& a, const Tensor& b) {
  detail::check_matrix("concat_cols", a);
  detail::check_matrix("concat_cols", b);
  if (a.shape[0] != b.shape[0]) detail::shape_fail("concat_cols", a, b);
  const int r = a.shape[0], ca = a.shape[1], cb = b.shape[1];
  Tensor out = Tensor::zeros({r, ca + cb});
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < ca; ++j) out.at(i, j) = a.at(i, j);
    for (int j = 0; j < cb; ++j) out.at(i, ca + j) = b.at(i, j);
  }
  if (!tracked(a) && !tracked(b)) return out;
  record(out, [an = a.node, bn = b.node, r, ca, cb](Tape& t, const std::vector<double>& g) {
    const int c = ca + cb;
    if (an >= 0)
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < ca; ++j)
          t.accum(an, static_cast<std::size_t>(i) * ca + j, g[static_cast<std::size_t>(i) * c + j]);
    if (bn >= 0)
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < cb; ++j)
          t.accum(bn, static_cast<std::size_t>(i) * cb + j,
                  g[static_cast<std::size_t>(i) * c + ca + j]);
  });
  return out;
}

Tensor Tape::stack_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("stack_rows: empty part list");
  int c = -1;
  int total = 0;
  for (const Tensor& p : parts) {
    int pc = p.is_vector() ? p.shape[0] : (detail::check_matrix("stack_rows", p), p.shape[1]);
    if (c < 0) c = pc;
    if (pc != c) throw ShapeError("stack_rows: column mismatch");
    total += p.is_vector() ? 1 : p.shape[0];
  }
  Tensor out = Tensor::zeros({total, c});
  bool any = false;
  struct Part {
    int node;
    int row0;
    int rows;
  };
  std::vector<Part> meta;
  int at = 0;
  for (const Tensor& p : parts) {
    int pr = p.is_vector() ? 1 : p.shape[0];
    for (int i = 0; i < pr; ++i)
      for (int j = 0; j < c; ++j)
        out.at(at + i, j) = p.data[static_cast<std::size_t>(i) * c + j];
    meta.push_back({p.node, at, pr});
    any = any || tracked(p);
    at += pr;
  }
  if (!any) return out;
  record(out, [meta, c](Tape& t, const std::vector<double>& g) {
    for (const auto& m : meta) {
      if (m.node < 0) continue;
      for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < c; ++j)
          t.accum(m.node, static_cast<std::size_t>(i) * c + j,
                  g[static_cast<std::size_t>(m.row0 + i) * c + j]);
    }
  });
  return out;
}

Tensor Tape::slice_rows(const Tensor& a, int begin, int end) {
  detail::check_matrix("slice_rows", a);
  if (begin < 0 || end > a.shape[0] || begin >= end) {
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") out of bounds for " + a.shape_str());
  }
  const int c = a.shape[1];
  Tensor out = Tensor::zeros({end - begin, c});
  for (int i = begin; i < end; ++i)
    for (int j = 0; j < c; ++j) out.at(i - begin, j) = a.at(i, j);
  if (!tracked(a)) return out;
  record(out, [an = a.node, begin, end, c](Tape& t, const std::vector<double>& g) {
    for (int i = begin; i < end; ++i)
      for (int j = 0; j < c; ++j)
        t.accum(an, static_cast<std::size_t>(i) * c + j,
                g[static_cast<std::size_t>(i - begin) * c + j]);
  });
  return out;
}

Tensor Tape::slice_cols(const Tensor& a, int begin, int end) {
  detail::check_matrix("slice_cols", a);
  if (begin < 0 || end > a.shape[1] || begin >= end) {
    throw ShapeError("slice_cols: range [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") out of bounds for " + a.shape_str());
  }
  const int r = a.shape[0], c = a.shape[1], w = end - begin;
  Tensor out = Tensor::zeros({r, w});
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < w; ++j) out.at(i, j) = a.at(i, begin + j);
  if (!tracked(a)) return out;
  record(out, [an = a.node, begin, r, c, w](Tape& t, const std::vector<double>& g) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < w; ++j)
        t.accum(an, static_cast<std::size_t>(i) * c + begin + j,
                g[static_cast<std::size_t>(i) * w + j]);
  });
  return out;
}

Tensor Tape::row(const Tensor& a, int i) { return slice_rows(a, i, i + 1); }

Tensor Tape::mean_over_rows(const Tensor& a) {
  detail::check_matrix("mean_over_rows", a);
  const int r = a.shape[0], c = a.shape[1];
  if (r == 0) throw ShapeError("mean_over_rows: empty matrix");
  Tensor out = Tensor::zeros({1, c});
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out.at(0, j) += a.at(i, j) / r;
  detail::check_finite("mean_over_rows", out.data);
  if (!tracked(a)) return out;
  record(out, [an = a.node, r, c](Tape& t, const std::vector<double>& g) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j)
        t.accum(an, static_cast<std::size_t>(i) * c + j, g[j] / r);
  });
  return out;
}

Tensor Tape::sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data) s += v;
  Tensor out = Tensor::scalar(s);
  detail::check_finite("sum", out.data);
  if (!tracked(a)) return out;
  record(out, [an = a.node, n = a.numel()](Tape& t, const std::vector<double>& g) {
    for (std::size_t i = 0; i < n; ++i) t.accum(an, i, g[0]);
  });
  return out;
}

Tensor Tape::col_sums(const Tensor& a) {
  detail::check_matrix("col_sums", a);
  const int r = a.shape[0], c = a.shape[1];
  Tensor out = Tensor::zeros({c});
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) out[j] += a.at(i, j);
  detail::check_finite("col_sums", out.data);
  if (!tracked(a)) return out;
  record(out, [an = a.node, r, c](Tape& t, const std::vector<double>& g) {
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) t.accum(an, static_cast<std::size_t>(i) * c + j, g[j]);
  });
  return out;
}

Tensor Tape::diag_embed(const Tensor& v) {
  if (!v.is_vector()) throw ShapeError("diag_embed: expected a vector, got " + v.shape_str());
  const int n = v.shape[0];
  Tensor out = Tensor::zeros({n, n});
  for (int i = 0; i < n; ++i) out.at(i, i) = v[i];
  if (!tracked(v)) return out;
  record(out, [vn = v.node, n](Tape& t, const std::vector<double>& g) {
    for (int i = 0; i < n; ++i) t.accum(vn, i, g[static_cast<std::size_t>(i) * n + i]);
  });
  return out;
}

Tensor Tape::diagonal_of(const Tensor& m) {
  detail::check_matrix("diagonal_of", m);
  if (m.shape[0] != m.shape[1]) throw ShapeError("diagonal_of: matrix not square");
  const int n = m.shape[0];
  Tensor out = Tensor::zeros({n});
  for (int i = 0; i < n; ++i) out[i] = m.at(i, i);
  if (!tracked(m)) return out;
  record(out, [mn = m.node, n](Tape& t, const std::vector<double>& g) {
    for (int i = 0; i < n; ++i) t.accum(mn, static_cast<std::size_t>(i) * n + i, g[i]);
  });
  return out;
}

Tensor Tape::col(const Tensor& a, int j) {
  detail::check_matrix("col", a);
  if (j < 0 || j >= a.shape[1]) throw ShapeError("col: index out of range");
  const int r = a.shape[0], c = a.shape[1];
  Tensor out = Tensor::zeros({r});
  for (int i = 0; i < r; ++i) out[i] = a.at(i, j);
  if (!tracked(a)) return out;
  record(out, [an = a.node, j, r, c](Tape& t, const std::vector<double>& g) {
    for (int i = 0; i < r; ++i) t.accum(an, static_cast<std::size_t>(i) * c + j, g[i]);
  });
  return out;
}

Tensor Tape::inverse(const Tensor& a) {
  InverseLogdet r = inverse_and_logdet(a);
  Tensor out = r.inverse;
  if (!tracked(a)) return out;
  record(out, [an = a.node, inv = out.data, n = a.shape[0]](Tape& t,
                                                            const std::vector<double>& g) {
    // gA = -Inv^T G Inv^T
    std::vector<double> tmp(static_cast<std::size_t>(n) * n, 0.0);
    // tmp = Inv^T G
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
          s += inv[static_cast<std::size_t>(p) * n + i] * g[static_cast<std::size_t>(p) * n + j];
        tmp[static_cast<std::size_t>(i) * n + j] = s;
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int p = 0; p < n; ++p)
          s += tmp[static_cast<std::size_t>(i) * n + p] * inv[static_cast<std::size_t>(j) * n + p];
        t.accum(an, static_cast<std::size_t>(i) * n + j, -s);
      }
  });
  return out;
}

Tensor Tape::logdet(const Tensor& a) {
  InverseLogdet r = inverse_and_logdet(a);
  Tensor out = Tensor::scalar(r.logdet);
  if (!tracked(a)) return out;
  record(out, [an = a.node, inv = r.inverse.data, n = a.shape[0]](
                  Tape& t, const std::vector<double>& g) {
    // d logdet / dA = A^{-T}
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        t.accum(an, static_cast<std::size_t>(i) * n + j,
                g[0] * inv[static_cast<std::size_t>(j) * n + i]);
  });
  return out;
}

}  // namespace lsr
