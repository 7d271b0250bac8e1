#pragma once

// Correspondence analysis through the Burt matrix with a cyclic Jacobi
// eigensolver, test-values from mean fact coordinates, and a pairwise
// homogeneity evaluation. Independent of the engine's route (indicator
// matrix SVD via Eigen) and of its neighbor enumeration.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace xdw::test {

using Matrix = std::vector<std::vector<double>>;

struct Eigenpairs {
  std::vector<double> values;  // descending
  Matrix vectors;              // vectors[k] is the k-th eigenvector
};

inline Eigenpairs jacobi_eigen(Matrix a) {
  const std::size_t n = a.size();
  Matrix v(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  Eigenpairs out;
  for (std::size_t k : order) {
    out.values.push_back(a[k][k]);
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v[i][k];
    out.vectors.push_back(std::move(col));
  }
  return out;
}

struct OracleMca {
  std::vector<double> eigenvalues;  // non-trivial, > 1e-12, at most J - Q
  Matrix member_coordinates;        // per occupied-or-not column; zeros for empty columns
};

/// `z` is the dense n x J indicator table, `q` the number of variables.
inline OracleMca oracle_mca(const std::vector<std::vector<int>> &z, std::size_t q) {
  const std::size_t n = z.size(), j_all = z.empty() ? 0 : z[0].size();
  std::vector<std::size_t> cols;
  for (std::size_t j = 0; j < j_all; ++j) {
    std::size_t f = 0;
    for (const auto &row : z) f += static_cast<std::size_t>(row[j]);
    if (f) cols.push_back(j);
  }
  const std::size_t jj = cols.size();
  const double nq = static_cast<double>(n * q);
  std::vector<double> c(jj);
  Matrix burt(jj, std::vector<double>(jj, 0));
  for (std::size_t a = 0; a < jj; ++a)
    for (std::size_t b = 0; b < jj; ++b)
      for (const auto &row : z) burt[a][b] += row[cols[a]] * row[cols[b]];
  for (std::size_t a = 0; a < jj; ++a) c[a] = burt[a][a] / nq;
  Matrix m(jj, std::vector<double>(jj));
  for (std::size_t a = 0; a < jj; ++a)
    for (std::size_t b = 0; b < jj; ++b)
      m[a][b] = burt[a][b] / (static_cast<double>(n) * static_cast<double>(q * q)) / std::sqrt(c[a] * c[b]) -
                std::sqrt(c[a] * c[b]); // deflate the trivial solution
  const Eigenpairs e = jacobi_eigen(m);
  OracleMca out;
  out.member_coordinates.assign(j_all, {});
  for (std::size_t k = 0; k < e.values.size() && out.eigenvalues.size() + q < jj; ++k) {
    if (e.values[k] <= 1e-12) continue;
    std::vector<double> g(jj);
    for (std::size_t a = 0; a < jj; ++a) g[a] = e.vectors[k][a] / std::sqrt(c[a]) * std::sqrt(e.values[k]);
    double sign = 1;
    for (double x : g)
      if (std::abs(x) > 1e-12) {
        sign = x > 0 ? 1 : -1;
        break;
      }
    out.eigenvalues.push_back(e.values[k]);
    for (std::size_t j = 0; j < j_all; ++j) out.member_coordinates[j].push_back(0.0);
    for (std::size_t a = 0; a < jj; ++a) out.member_coordinates[cols[a]].back() = sign * g[a];
  }
  return out;
}

/// t = mean fact coordinate over the facts carrying j / sqrt(lambda), scaled
/// by sqrt(n_j (n - 1) / (n - n_j)). Empty optional-like result (empty
/// vector) for untestable members.
inline Matrix oracle_test_values(const std::vector<std::vector<int>> &z, const Matrix &fact_coords,
                                 const std::vector<double> &eigenvalues) {
  const std::size_t n = z.size();
  Matrix out;
  for (std::size_t j = 0; j < (n ? z[0].size() : 0); ++j) {
    std::vector<std::size_t> carriers;
    for (std::size_t i = 0; i < n; ++i)
      if (z[i][j]) carriers.push_back(i);
    const double nj = static_cast<double>(carriers.size()), nd = static_cast<double>(n);
    std::vector<double> t;
    if (!carriers.empty() && carriers.size() < n)
      for (std::size_t a = 0; a < eigenvalues.size(); ++a) {
        double mean = 0;
        for (auto i : carriers) mean += fact_coords[i][a];
        mean /= nj;
        t.push_back(mean / std::sqrt(eigenvalues[a]) * std::sqrt(nj * (nd - 1) / (nd - nj)));
      }
    out.push_back(std::move(t));
  }
  return out;
}

/// Homogeneity by comparing every pair of grid positions. `grid` maps a
/// position (one rank per axis) to a value; absent positions are empty.
inline double oracle_homogeneity(const std::vector<std::size_t> &extent,
                                 const std::map<std::vector<std::size_t>, double> &grid) {
  if (grid.empty()) return 0;
  double lo = grid.begin()->second, hi = lo;
  for (const auto &kv : grid) {
    lo = std::min(lo, kv.second);
    hi = std::max(hi, kv.second);
  }
  std::vector<std::vector<std::size_t>> all{{}};
  for (std::size_t e : extent) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto &p : all)
      for (std::size_t r = 0; r < e; ++r) {
        auto q = p;
        q.push_back(r);
        next.push_back(q);
      }
    all = std::move(next);
  }
  double num = 0, den = 0;
  for (const auto &[p, v] : grid)
    for (const auto &other : all) {
      std::size_t diff = 0, dist = 0;
      for (std::size_t a = 0; a < p.size(); ++a)
        if (p[a] != other[a]) {
          ++diff;
          dist = p[a] > other[a] ? p[a] - other[a] : other[a] - p[a];
        }
      if (diff != 1 || dist != 1) continue;
      den += 1;
      auto it = grid.find(other);
      if (it != grid.end()) num += hi > lo ? 1 - std::abs(v - it->second) / (hi - lo) : 1;
    }
  return den > 0 ? num / den : 0;
}

} // namespace xdw::test
