#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <optional>
#include <vector>

#include "rgc/cech.hpp"
#include "rgc/error.hpp"
#include "rgc/manifold.hpp"

namespace rgc {

/// Betti numbers over GF(2).
struct BettiVector {
  std::vector<std::int64_t> betti;  // trusted: beta_0 .. beta_{dim_cap-1}
  std::int64_t euler = 0;           // sum (-1)^k f_k over stored dimensions
  std::optional<std::int64_t> top;  // beta_{dim_cap}, untrusted

  std::int64_t at(int k) const { return k < static_cast<int>(betti.size()) ? betti[k] : 0; }
};

/// Sparse GF(2) boundary matrix: column j lists the row indices of the faces of k-simplex j.
struct BoundaryMatrix {
  int k = 0;
  std::size_t rows = 0;
  std::vector<std::vector<std::uint32_t>> columns;
};

inline BoundaryMatrix boundary_matrix(const CechComplex& cx, int k) {
  BoundaryMatrix b;
  b.k = k;
  b.rows = k >= 1 ? cx.count(k - 1) : 0;
  if (k < 1 || k > cx.dim_cap()) return b;
  b.columns.resize(cx.count(k));
  std::vector<Index> face(k);
  for (std::size_t i = 0; i < cx.count(k); ++i) {
    const auto s = cx.simplex(k, i);
    auto& col = b.columns[i];
    col.reserve(k + 1);
    for (int drop = 0; drop <= k; ++drop) {
      int t = 0;
      for (int j = 0; j <= k; ++j)
        if (j != drop) face[t++] = s[j];
      const auto row = cx.find(face);
      if (row < 0) throw InvalidComplex("complex is not closed under faces");
      col.push_back(static_cast<std::uint32_t>(row));
    }
    std::sort(col.begin(), col.end());
  }
  return b;
}

namespace detail {

inline void xor_into(std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                     std::vector<std::uint32_t>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(scratch));
  a.swap(scratch);
}

/**
 * Left-to-right column reduction; lowest row of a column is its pivot.
 * Columns flagged in `skip` are known to reduce to zero and are not touched.
 * Returns the rank and fills `pivot_rows` with the pivots of the reduced columns.
 */
inline std::size_t reduce_rank(BoundaryMatrix& b, const std::vector<char>& skip,
                               std::vector<char>* pivot_rows) {
  std::vector<std::int64_t> owner(b.rows, -1);
  std::vector<std::uint32_t> scratch;
  std::size_t rank = 0;
  if (pivot_rows) pivot_rows->assign(b.rows, 0);
  for (std::size_t j = 0; j < b.columns.size(); ++j) {
    if (!skip.empty() && skip[j]) continue;
    auto& col = b.columns[j];
    while (!col.empty()) {
      const auto low = col.back();
      if (owner[low] < 0) {
        owner[low] = static_cast<std::int64_t>(j);
        ++rank;
        if (pivot_rows) (*pivot_rows)[low] = 1;
        break;
      }
      xor_into(col, b.columns[owner[low]], scratch);
    }
  }
  return rank;
}

}  // namespace detail

/**
 * Betti numbers of an explicit complex by sparse boundary reduction with
 * clearing: dimensions are reduced from the top down and columns that are
 * already pivots of the next boundary are skipped.
 */
inline BettiVector betti_numbers(const CechComplex& cx) {
  const int cap = cx.dim_cap();
  std::vector<std::size_t> rank(cap + 2, 0);
  std::vector<char> cleared;
  for (int k = cap; k >= 1; --k) {
    auto b = boundary_matrix(cx, k);
    std::vector<char> pivots;
    rank[k] = detail::reduce_rank(b, cleared, &pivots);
    cleared = std::move(pivots);
  }
  BettiVector out;
  for (int k = 0; k <= cap; ++k) {
    const auto f = static_cast<std::int64_t>(cx.count(k));
    out.euler += (k % 2 ? -f : f);
    const auto beta = f - static_cast<std::int64_t>(rank[k]) - static_cast<std::int64_t>(rank[k + 1]);
    if (k < cap)
      out.betti.push_back(beta);
    else
      out.top = beta;
  }
  return out;
}

/// Ranks of every boundary map, for diagnostics (index k holds rank d_k; index 0 is 0).
inline std::vector<std::size_t> boundary_ranks(const CechComplex& cx) {
  std::vector<std::size_t> r(cx.dim_cap() + 1, 0);
  for (int k = 1; k <= cx.dim_cap(); ++k) {
    auto b = boundary_matrix(cx, k);
    r[k] = detail::reduce_rank(b, {}, nullptr);
  }
  return r;
}

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

/// Betti numbers beta_0..beta_d of the manifold itself.
inline BettiVector manifold_betti(const ManifoldModel& m) {
  BettiVector out;
  const int d = m.dim();
  for (int k = 0; k <= d; ++k) {
    const std::int64_t b = m.is_torus() ? binomial(d, k) : (k == 0 || k == d ? 1 : 0);
    out.betti.push_back(b);
    out.euler += (k % 2 ? -b : b);
  }
  return out;
}

inline bool homology_match(const BettiVector& cx_betti, int dim_cap, const ManifoldModel& m,
                           int k) {
  if (k < 0) throw InvalidInput("negative homology degree");
  if (k >= dim_cap) throw InsufficientDimension("degree " + std::to_string(k) + " needs dim_cap > " +
                                               std::to_string(k));
  return cx_betti.at(k) == manifold_betti(m).at(k);
}

inline bool homology_match(const CechComplex& cx, const ManifoldModel& m, int k) {
  if (k >= cx.dim_cap())
    throw InsufficientDimension("degree " + std::to_string(k) + " needs dim_cap > " +
                                std::to_string(k));
  return homology_match(betti_numbers(cx), cx.dim_cap(), m, k);
}

}  // namespace rgc
