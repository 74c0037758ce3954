#include <cstdlib>
#include <numeric>
#include <set>

#include "condmc/model.hpp"

namespace condmc {

namespace {

int64_t checked_fma(int64_t a, int64_t b, int64_t c, int64_t d) {
  // a*b - c*d with overflow detection.
  __int128 v = static_cast<__int128>(a) * b - static_cast<__int128>(c) * d;
  if (v > INT64_MAX || v < INT64_MIN) {
    throw std::overflow_error("integer overflow in nullspace elimination");
  }
  return static_cast<int64_t>(v);
}

int64_t row_gcd(const std::vector<int64_t>& row) {
  int64_t g = 0;
  for (int64_t v : row) g = std::gcd(g, std::llabs(v));
  return g;
}

void normalize_sign_and_content(std::vector<int64_t>& v) {
  int64_t g = row_gcd(v);
  if (g > 1) {
    for (auto& e : v) e /= g;
  }
  for (int64_t e : v) {
    if (e != 0) {
      if (e < 0) {
        for (auto& w : v) w = -w;
      }
      break;
    }
  }
}

}  // namespace

std::vector<std::vector<int64_t>> integer_nullspace_basis(
    const StoichiometryMatrix& S,
    const std::optional<std::vector<int32_t>>& marginal_rows) {
  std::vector<int32_t> rows;
  if (marginal_rows) {
    rows = *marginal_rows;
    for (int32_t r : rows) {
      if (r < 0 || static_cast<size_t>(r) >= S.rows) {
        throw std::invalid_argument("marginal row index out of range");
      }
    }
  } else {
    rows.resize(S.rows);
    std::iota(rows.begin(), rows.end(), 0);
  }

  const size_t R = S.cols;
  std::vector<std::vector<int64_t>> M(rows.size(), std::vector<int64_t>(R));
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t c = 0; c < R; ++c) M[i][c] = S.entry(rows[i], c);
  }

  // Fraction-free elimination to a reduced echelon form. Entries stay small
  // because each row is divided by its content after every update.
  std::vector<size_t> pivot_cols;
  size_t rank = 0;
  for (size_t col = 0; col < R && rank < M.size(); ++col) {
    size_t pr = rank;
    while (pr < M.size() && M[pr][col] == 0) ++pr;
    if (pr == M.size()) continue;
    std::swap(M[rank], M[pr]);
    const int64_t piv = M[rank][col];
    for (size_t r2 = 0; r2 < M.size(); ++r2) {
      if (r2 == rank || M[r2][col] == 0) continue;
      const int64_t f = M[r2][col];
      for (size_t c = 0; c < R; ++c) M[r2][c] = checked_fma(M[r2][c], piv, M[rank][c], f);
      int64_t g = row_gcd(M[r2]);
      if (g > 1) {
        for (auto& e : M[r2]) e /= g;
      }
    }
    pivot_cols.push_back(col);
    ++rank;
  }

  std::vector<bool> is_pivot(R, false);
  for (size_t c : pivot_cols) is_pivot[c] = true;

  std::vector<std::vector<int64_t>> basis;
  for (size_t f = 0; f < R; ++f) {
    if (is_pivot[f]) continue;
    // One basis vector per free column: k[f] = lcm of the pivots it touches,
    // pivot entries solved from the eliminated rows, all divisions exact.
    int64_t scale = 1;
    for (size_t i = 0; i < rank; ++i) {
      if (M[i][f] != 0) scale = std::lcm(scale, std::llabs(M[i][pivot_cols[i]]));
    }
    std::vector<int64_t> k(R, 0);
    k[f] = scale;
    for (size_t i = 0; i < rank; ++i) {
      if (M[i][f] != 0) k[pivot_cols[i]] = -M[i][f] * scale / M[i][pivot_cols[i]];
    }
    normalize_sign_and_content(k);
    // Internal consistency: the vector must lie in the restricted kernel.
    for (size_t i = 0; i < rows.size(); ++i) {
      int64_t dot = 0;
      for (size_t c = 0; c < R; ++c) dot += S.entry(rows[i], c) * k[c];
      if (dot != 0) throw std::logic_error("nullspace vector fails S*k = 0");
    }
    basis.push_back(std::move(k));
  }
  return basis;
}

std::vector<std::vector<int64_t>> nullspace_lattice(
    const std::vector<std::vector<int64_t>>& basis, int64_t coeff_bound, size_t cap) {
  if (coeff_bound < 0) throw std::invalid_argument("coefficient bound must be >= 0");
  if (basis.empty()) {
    throw std::invalid_argument("nullspace_lattice needs the vector length; use the dim overload");
  }
  return nullspace_lattice_dim(basis, coeff_bound, basis.front().size(), cap);
}

std::vector<std::vector<int64_t>> nullspace_lattice_dim(
    const std::vector<std::vector<int64_t>>& basis, int64_t coeff_bound, size_t dim,
    size_t cap) {
  if (coeff_bound < 0) throw std::invalid_argument("coefficient bound must be >= 0");
  for (const auto& b : basis) {
    if (b.size() != dim) throw std::invalid_argument("basis vector has wrong length");
  }
  double total = 1;
  for (size_t j = 0; j < basis.size(); ++j) total *= static_cast<double>(2 * coeff_bound + 1);
  if (total > static_cast<double>(cap)) {
    throw std::runtime_error("nullspace lattice would have " + std::to_string(total) +
                             " combinations, above the cap of " + std::to_string(cap));
  }

  std::set<std::vector<int64_t>> seen;
  std::vector<int64_t> coeffs(basis.size(), -coeff_bound);
  for (;;) {
    std::vector<int64_t> k(dim, 0);
    for (size_t j = 0; j < basis.size(); ++j) {
      for (size_t c = 0; c < dim; ++c) k[c] += coeffs[j] * basis[j][c];
    }
    seen.insert(std::move(k));
    size_t j = 0;
    while (j < coeffs.size() && coeffs[j] == coeff_bound) {
      coeffs[j] = -coeff_bound;
      ++j;
    }
    if (j == coeffs.size()) break;
    ++coeffs[j];
  }
  return {seen.begin(), seen.end()};
}

}  // namespace condmc
