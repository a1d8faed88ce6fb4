#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace sigpole {

/// Row-major square matrix over an exact ring, for fraction-free elimination.
template <class T>
struct ExactMatrix {
  int n = 0;
  std::vector<T> data;

  explicit ExactMatrix(int size) : n(size), data(static_cast<std::size_t>(size * size), T(0)) {}
  T& operator()(int r, int c) { return data[static_cast<std::size_t>(r * n + c)]; }
  const T& operator()(int r, int c) const { return data[static_cast<std::size_t>(r * n + c)]; }
};

/// Bareiss elimination. Every division is exact over an integral domain.
template <class T>
T bareiss_determinant(ExactMatrix<T> m) {
  const int n = m.n;
  if (n == 0) return T(1);
  T sign(1);
  T prev(1);
  for (int k = 0; k < n - 1; ++k) {
    if (m(k, k) == 0) {
      int swap_row = -1;
      for (int r = k + 1; r < n; ++r)
        if (m(r, k) != 0) {
          swap_row = r;
          break;
        }
      if (swap_row < 0) return T(0);
      for (int c = 0; c < n; ++c) std::swap(m(k, c), m(swap_row, c));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

/// Solves a x = b by Gaussian elimination with partial pivoting; a is
/// row-major n x n. Works for any field-like scalar.
template <class T>
std::vector<T> solve_linear(std::vector<T> a, std::vector<T> b) {
  using std::abs;
  const int n = static_cast<int>(b.size());
  auto at = [&](int r, int c) -> T& { return a[static_cast<std::size_t>(r * n + c)]; };
  for (int k = 0; k < n; ++k) {
    int pivot = k;
    for (int r = k + 1; r < n; ++r)
      if (abs(at(r, k)) > abs(at(pivot, k))) pivot = r;
    if (pivot != k) {
      for (int c = 0; c < n; ++c) std::swap(at(k, c), at(pivot, c));
      std::swap(b[static_cast<std::size_t>(k)], b[static_cast<std::size_t>(pivot)]);
    }
    for (int r = k + 1; r < n; ++r) {
      const T factor = at(r, k) / at(k, k);
      for (int c = k; c < n; ++c) at(r, c) -= factor * at(k, c);
      b[static_cast<std::size_t>(r)] -= factor * b[static_cast<std::size_t>(k)];
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    T sum = b[static_cast<std::size_t>(k)];
    for (int c = k + 1; c < n; ++c) sum -= at(k, c) * b[static_cast<std::size_t>(c)];
    b[static_cast<std::size_t>(k)] = sum / at(k, k);
  }
  return b;
}

inline double lu_determinant(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 1.0;
  return m.partialPivLu().determinant();
}

}  // namespace sigpole
