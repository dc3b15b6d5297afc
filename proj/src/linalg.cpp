#include "lsr/linalg.hpp"

#include <cmath>
#include <string>

namespace lsr {

LuResult lu_decompose(const Tensor& a) {
  detail::check_matrix("lu_decompose", a);
  if (a.shape[0] != a.shape[1]) {
    throw ShapeError("lu_decompose: matrix not square, shape " + a.shape_str());
  }
  const int n = a.shape[0];
  LuResult f;
  f.lu = a;
  f.lu.node = -1;
  f.perm.resize(n);
  for (int i = 0; i < n; ++i) f.perm[i] = i;

  double amax = 0.0;
  for (double v : a.data) amax = std::max(amax, std::abs(v));
  const double tiny = 1e-12 * (amax > 0.0 ? amax : 1.0);

  Tensor& lu = f.lu;
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(lu.at(k, k));
    for (int i = k + 1; i < n; ++i) {
      double m = std::abs(lu.at(i, k));
      if (m > best) {
        best = m;
        piv = i;
      }
    }
    if (best < tiny) {
      throw SingularMatrix("lu_decompose: pivot " + std::to_string(best) +
                           " below threshold at column " + std::to_string(k));
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(lu.at(k, j), lu.at(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.parity = -f.parity;
    }
    const double d = lu.at(k, k);
    for (int i = k + 1; i < n; ++i) {
      const double m = lu.at(i, k) / d;
      lu.at(i, k) = m;
      for (int j = k + 1; j < n; ++j) lu.at(i, j) -= m * lu.at(k, j);
    }
  }
  return f;
}

std::vector<double> lu_solve(const LuResult& f, const std::vector<double>& b) {
  const int n = static_cast<int>(f.perm.size());
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[f.perm[i]];
  // forward substitution with unit lower triangle
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= f.lu.at(i, j) * x[j];
  // back substitution
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= f.lu.at(i, j) * x[j];
    x[i] /= f.lu.at(i, i);
  }
  return x;
}

InverseLogdet inverse_and_logdet(const Tensor& a) {
  LuResult f = lu_decompose(a);
  const int n = a.shape[0];
  InverseLogdet r;
  r.inverse = Tensor::zeros({n, n});
  r.sign = f.parity;
  for (int i = 0; i < n; ++i) {
    const double d = f.lu.at(i, i);
    r.logdet += std::log(std::abs(d));
    if (d < 0.0) r.sign = -r.sign;
  }
  std::vector<double> e(n, 0.0);
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    std::vector<double> x = lu_solve(f, e);
    for (int i = 0; i < n; ++i) r.inverse.at(i, j) = x[i];
    e[j] = 0.0;
  }
  detail::check_finite("inverse_and_logdet", r.inverse.data);
  return r;
}

}  // namespace lsr
