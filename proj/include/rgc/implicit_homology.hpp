#pragma once

// Betti numbers of a Cech complex without materializing its top dimension.
//
// Simplices are totally ordered by (squared chart diameter, dimension,
// vertex tuple). Coboundary matrices are reduced in that order with the
// usual twist (clearing) and apparent-pair shortcuts; only columns that need
// genuine reduction are stored. Cofacets of a simplex are generated on the
// fly from the neighbor graph and filtered by the miniball test, so the
// complex seen here is exactly the one build_complex would produce.

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "rgc/cech.hpp"
#include "rgc/homology.hpp"

namespace rgc {

struct ImplicitHomology {
  BettiVector betti;                   // beta_0..beta_{dim_cap-1}; euler over those dimensions
  std::vector<std::size_t> f_vector;   // f_0..f_{dim_cap-1}
  std::vector<std::size_t> ranks;      // ranks[k] = rank of the k-th boundary, k = 0..dim_cap
  std::size_t apparent_pairs = 0;
  std::size_t reduced_columns = 0;

  /// sum_{k<cap} (-1)^k f_k == sum_{k<cap} (-1)^k beta_k + (-1)^{cap-1} rank d_cap
  bool euler_consistent() const {
    const int cap = static_cast<int>(f_vector.size());
    std::int64_t lhs = 0, rhs = 0;
    for (int k = 0; k < cap; ++k) {
      const std::int64_t s = k % 2 ? -1 : 1;
      lhs += s * static_cast<std::int64_t>(f_vector[k]);
      rhs += s * betti.betti[k];
    }
    if (cap > 0) rhs += ((cap - 1) % 2 ? -1 : 1) * static_cast<std::int64_t>(ranks[cap]);
    return lhs == rhs;
  }
};

namespace detail {

template <int N>
struct Cell {
  double key;
  std::array<Index, N> v;
};

template <int N>
bool older(const Cell<N>& a, const Cell<N>& b) {
  if (a.key != b.key) return a.key < b.key;
  return a.v < b.v;
}

template <int N>
bool same(const Cell<N>& a, const Cell<N>& b) {
  return a.v == b.v;
}

template <int N>
struct CellHash {
  std::size_t operator()(const std::array<Index, N>& v) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (Index x : v) h = mix64(h ^ x);
    return static_cast<std::size_t>(h);
  }
};

template <int N>
struct YoungerFirst {
  bool operator()(const Cell<N>& a, const Cell<N>& b) const { return older(b, a); }
};

class ImplicitCech {
 public:
  ImplicitCech(const PointCloud& cloud, const NeighborGraph& g, double r)
      : cloud_(cloud), g_(g), m_(cloud.manifold) {
    const int cd = m_.ambient_dim();
    if (m_.is_torus()) {
      edge2_ = 4.0 * r * r;
      ball2_ = r * r;
    } else {
      const double R = m_.scale();
      const double chord = 2.0 * R * std::sin(r / R);
      edge2_ = chord * chord;
      ball2_ = R * std::sin(r / R) * R * std::sin(r / R);
    }
    // Jung: a set of chart diameter D has miniball radius at most D sqrt(m / (2 (m + 1))).
    jung2_ = ball2_ * 2.0 * (cd + 1) / cd * (1.0 - 1e-9);
    // Wrapped pair distances only agree with one common lift while the diameter stays below L/4.
    if (m_.is_torus()) {
      lift2_ = m_.scale() * m_.scale() / 16.0 * (1.0 - 1e-9);
      jung2_ = std::min(jung2_, lift2_);
    }
    // In the plane, or on S^2 with all caps inside one hemisphere, a family of balls meets
    // iff every three of them do, so triangle radii decide membership.
    helly3_ = m_.dim() == 2 && (m_.is_torus() || r < std::numbers::pi * m_.scale() / 6.0);
  }

  /// Squared miniball radius of a Euclidean triangle with squared side lengths a, b, c.
  static double triangle_ball2(double a, double b, double c) {
    if (a < b) std::swap(a, b);
    if (a < c) std::swap(a, c);
    if (a >= b + c) return a / 4.0;
    const double area16 = 2.0 * (a * b + b * c + c * a) - a * a - b * b - c * c;
    if (area16 <= 0.0) return a / 4.0;
    return a * b * c / area16;
  }

  double pair_d2(Index a, Index b) const {
    return chart_dist2(m_, cloud_.data(a), cloud_.data(b));
  }

  /// Miniball test for a sorted vertex tuple whose squared chart diameter is key.
  bool member(const Index* v, int count, double key) const {
    if (count <= 2 || key <= jung2_) return true;
    if (helly3_ && key <= lift2_) {
      std::array<std::array<double, kMaxSimplexSize>, kMaxSimplexSize> d{};
      for (int i = 0; i < count; ++i)
        for (int j = i + 1; j < count; ++j) d[i][j] = pair_d2(v[i], v[j]);
      for (int i = 0; i < count; ++i)
        for (int j = i + 1; j < count; ++j)
          for (int k = j + 1; k < count; ++k)
            if (triangle_ball2(d[i][j], d[i][k], d[j][k]) > ball2_) return false;
      return true;
    }
    MiniballBuilder<kMaxSimplexSize> b(m_.ambient_dim());
    for (int i = 0; i < count; ++i) b.push(to_chart(m_, cloud_.data(v[0]), cloud_.data(v[i])));
    return b.ball().radius2 <= ball2_;
  }

  template <std::size_t N>
  double diameter_key(const std::array<Index, N>& v) const {
    double k = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = i + 1; j < N; ++j) k = std::max(k, pair_d2(v[i], v[j]));
    return k;
  }

  /// Common neighbors of all vertices of s, with the key the cofacet would get.
  template <int N>
  void candidates(const Cell<N>& s, std::vector<std::pair<double, Index>>& out) const {
    out.clear();
    const auto n0 = g_.neighbors(s.v[0]);
    const auto d0 = g_.dist2(s.v[0]);
    for (std::size_t i = 0; i < n0.size(); ++i) out.emplace_back(std::max(s.key, d0[i]), n0[i]);
    for (int t = 1; t < N && !out.empty(); ++t) {
      const auto nt = g_.neighbors(s.v[t]);
      const auto dt = g_.dist2(s.v[t]);
      std::size_t w = 0, j = 0;
      for (std::size_t i = 0; i < out.size(); ++i) {
        const Index v = out[i].second;
        while (j < nt.size() && nt[j] < v) ++j;
        if (j == nt.size()) break;
        if (nt[j] == v) out[w++] = {std::max(out[i].first, dt[j]), v};
      }
      out.resize(w);
    }
  }

  template <int N>
  static Cell<N + 1> insert_vertex(const Cell<N>& s, double key, Index v) {
    Cell<N + 1> t;
    t.key = key;
    int i = 0, o = 0;
    while (i < N && s.v[i] < v) t.v[o++] = s.v[i++];
    t.v[o++] = v;
    while (i < N) t.v[o++] = s.v[i++];
    return t;
  }

  /**
   * Oldest cofacet of s. Cofacets passing the Jung bound are accepted on the
   * spot; the others are kept and checked with the full miniball test only if
   * they would precede the best accepted one.
   */
  template <int N>
  std::optional<Cell<N + 1>> oldest_cofacet(const Cell<N>& s,
                                            std::vector<std::pair<double, Index>>& pending) const {
    pending.clear();
    const auto n0 = g_.neighbors(s.v[0]);
    const auto d0 = g_.dist2(s.v[0]);
    double best_key = std::numeric_limits<double>::infinity();
    Index best_v = 0;
    bool found = false;
    std::array<const double*, N> pv{};
    for (int i = 0; i < N; ++i) pv[i] = cloud_.data(s.v[i]);
    for (std::size_t t = 0; t < n0.size(); ++t) {
      const Index v = n0[t];
      double k = std::max(s.key, d0[t]);
      if (k >= best_key) continue;
      bool ok = true;
      const double* q = cloud_.data(v);
      for (int i = 1; i < N; ++i) {
        if (s.v[i] == v) {
          ok = false;
          break;
        }
        const double d = chart_dist2(m_, pv[i], q);
        if (d > edge2_) {
          ok = false;
          break;
        }
        k = std::max(k, d);
        if (k >= best_key) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      if (k <= jung2_) {
        best_key = k;
        best_v = v;
        found = true;
      } else {
        pending.emplace_back(k, v);
      }
    }
    std::size_t w = 0;
    for (const auto& p : pending)
      if (!found || p < std::pair<double, Index>(best_key, best_v)) pending[w++] = p;
    pending.resize(w);
    std::sort(pending.begin(), pending.end());
    for (const auto& [k, v] : pending) {
      const auto t = insert_vertex(s, k, v);
      if (member(t.v.data(), N + 1, k)) return t;
    }
    if (!found) return std::nullopt;
    return insert_vertex(s, best_key, best_v);
  }

  template <int N, class Sink>
  void coboundary(const Cell<N>& s, std::vector<std::pair<double, Index>>& cand, Sink&& sink) const {
    candidates(s, cand);
    for (const auto& [key, v] : cand) {
      const auto t = insert_vertex(s, key, v);
      if (member(t.v.data(), N + 1, key)) sink(t);
    }
  }

  /// Facet with the largest order position: maximal key, ties to the lexicographically largest.
  template <int N>
  Cell<N - 1> youngest_facet(const Cell<N>& t) const {
    std::array<std::array<double, N>, N> d{};
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) d[i][j] = d[j][i] = pair_d2(t.v[i], t.v[j]);
    int best = -1;
    double best_key = -1.0;
    for (int u = 0; u < N; ++u) {
      double k = 0.0;
      for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j)
          if (i != u && j != u) k = std::max(k, d[i][j]);
      if (k > best_key) {
        best_key = k;
        best = u;
      }
    }
    Cell<N - 1> f;
    f.key = best_key;
    int o = 0;
    for (int i = 0; i < N; ++i)
      if (i != best) f.v[o++] = t.v[i];
    return f;
  }

  /// Calls emit(k, verts, key) for every simplex of dimension 1..top in lexicographic order per dimension.
  template <class Emit>
  void enumerate(int top, Emit&& emit) const {
    std::array<Index, kMaxSimplexSize> verts{};
    std::vector<std::vector<Index>> cand(top + 1);
    auto rec = [&](auto&& self, int k, double key) -> void {
      const auto& c = cand[k];
      for (std::size_t t = 0; t < c.size(); ++t) {
        const Index v = c[t];
        double nk = key;
        for (int i = 0; i <= k; ++i) nk = std::max(nk, pair_d2(verts[i], v));
        verts[k + 1] = v;
        if (!member(verts.data(), k + 2, nk)) continue;
        emit(k + 1, verts.data(), nk);
        if (k + 1 < top) {
          auto& nc = cand[k + 1];
          nc.clear();
          const auto nv = g_.neighbors(v);
          auto it = std::upper_bound(nv.begin(), nv.end(), v);
          std::set_intersection(c.begin() + t + 1, c.end(), it, nv.end(), std::back_inserter(nc));
          if (!nc.empty()) self(self, k + 1, nk);
        }
      }
    };
    for (std::size_t i = 0; i < cloud_.size(); ++i) {
      verts[0] = static_cast<Index>(i);
      const auto nv = g_.neighbors(i);
      cand[0].assign(std::upper_bound(nv.begin(), nv.end(), static_cast<Index>(i)), nv.end());
      rec(rec, 0, 0.0);
    }
  }

 private:
  const PointCloud& cloud_;
  const NeighborGraph& g_;
  ManifoldModel m_;
  double edge2_ = 0.0;
  double ball2_ = 0.0;
  double jung2_ = 0.0;
  double lift2_ = std::numeric_limits<double>::infinity();
  bool helly3_ = false;
};

template <int N>
std::ptrdiff_t locate(const std::vector<Cell<N>>& sorted, const Cell<N>& c) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), c, YoungerFirst<N>{});
  if (it != sorted.end() && same(*it, c)) return it - sorted.begin();
  return -1;
}

/// Lists of simplices of dimension 1..cap-1 sorted youngest first.
struct CellLists {
  std::vector<Cell<2>> c2;
  std::vector<Cell<3>> c3;
  std::vector<Cell<4>> c4;
  std::vector<Cell<5>> c5;

  template <int N>
  std::vector<Cell<N>>& get() {
    if constexpr (N == 2) return c2;
    if constexpr (N == 3) return c3;
    if constexpr (N == 4) return c4;
    if constexpr (N == 5) return c5;
  }
};

/**
 * Reduces the coboundary whose columns are the N-vertex simplices in `cols`
 * (youngest first). Columns flagged in `cleared` are skipped. Pivots of the
 * reduced columns are flagged in next_cleared when the next list exists.
 */
template <int N>
std::size_t reduce_coboundary(const ImplicitCech& ic, const std::vector<Cell<N>>& cols,
                              const std::vector<char>& cleared,
                              const std::vector<Cell<N + 1>>* next, std::vector<char>* next_cleared,
                              ImplicitHomology& stats) {
  using Co = Cell<N + 1>;
  using Heap = std::priority_queue<Co, std::vector<Co>, YoungerFirst<N + 1>>;
  std::unordered_map<std::array<Index, N + 1>, std::vector<Co>, CellHash<N + 1>> stored;
  std::vector<std::pair<double, Index>> cand, cand2;
  std::size_t rank = 0;

  auto mark = [&](const Co& pivot) {
    if (!next) return;
    const auto at = locate(*next, pivot);
    if (at >= 0) (*next_cleared)[at] = 1;
  };
  auto pop_pivot = [](Heap& h) -> std::optional<Co> {
    while (!h.empty()) {
      Co top = h.top();
      h.pop();
      bool odd = true;
      while (!h.empty() && same(h.top(), top)) {
        h.pop();
        odd = !odd;
      }
      if (odd) {
        h.push(top);
        return top;
      }
    }
    return std::nullopt;
  };

  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cleared[j]) continue;
    const auto& s = cols[j];
    const auto first = ic.oldest_cofacet(s, cand);
    if (!first) continue;
    if (same(ic.youngest_facet(*first), s)) {
      ++rank;
      ++stats.apparent_pairs;
      mark(*first);
      continue;
    }
    ++stats.reduced_columns;
    Heap h;
    ic.coboundary(s, cand, [&](const Co& t) { h.push(t); });
    while (true) {
      const auto piv = pop_pivot(h);
      if (!piv) break;
      if (auto it = stored.find(piv->v); it != stored.end()) {
        for (const auto& t : it->second) h.push(t);
        continue;
      }
      const auto f = ic.youngest_facet(*piv);
      const auto at = locate(cols, f);
      if (at >= 0 && !cleared[at] && static_cast<std::size_t>(at) < j) {
        const auto o = ic.oldest_cofacet(cols[at], cand2);
        if (o && same(*o, *piv)) {
          ic.coboundary(cols[at], cand2, [&](const Co& t) { h.push(t); });
          continue;
        }
      }
      std::vector<Co> col;
      while (const auto e = pop_pivot(h)) {
        col.push_back(*e);
        h.pop();
      }
      stored.emplace(piv->v, std::move(col));
      ++rank;
      mark(*piv);
      break;
    }
  }
  return rank;
}

template <int N>
void run_dims(const ImplicitCech& ic, CellLists& lists, std::vector<char>& cleared, int cap,
              ImplicitHomology& out) {
  // N-vertex columns hold dimension N-1; their pivots live in dimension N.
  if constexpr (N <= kMaxSimplexSize - 1) {
    if (N - 1 > cap - 1) return;
    auto& cols = lists.get<N>();
    std::vector<char> next_cleared;
    const std::vector<Cell<N + 1>>* next = nullptr;
    if constexpr (N + 1 <= 5) {
      if (N < cap) {
        next = &lists.get<N + 1>();
        next_cleared.assign(next->size(), 0);
      }
    }
    out.ranks[N] = reduce_coboundary<N>(ic, cols, cleared, next, next ? &next_cleared : nullptr, out);
    cleared = std::move(next_cleared);
    run_dims<N + 1>(ic, lists, cleared, cap, out);
  }
}

}  // namespace detail

/**
 * Betti numbers beta_0..beta_{dim_cap-1} of the Cech complex of cloud at
 * radius r, computed without storing simplices of dimension dim_cap.
 */
inline ImplicitHomology betti_numbers_implicit(const PointCloud& cloud, double r, int dim_cap) {
  const auto& m = cloud.manifold;
  check_radius(m, r);
  if (dim_cap < 1 || dim_cap > kMaxDimCap)
    throw InvalidInput("dim_cap must lie in [1, " + std::to_string(kMaxDimCap) + "]");
  ImplicitHomology out;
  out.ranks.assign(dim_cap + 1, 0);
  out.f_vector.assign(dim_cap, 0);
  const std::size_t n = cloud.size();
  out.f_vector[0] = n;

  const auto g = build_neighbor_graph(cloud, 2.0 * r);
  const detail::ImplicitCech ic(cloud, g, r);
  detail::CellLists lists;
  if (dim_cap >= 2) {
    ic.enumerate(dim_cap - 1, [&](int k, const Index* v, double key) {
      auto put = [&](auto& vec) {
        using C = typename std::decay_t<decltype(vec)>::value_type;
        C c;
        std::copy(v, v + k + 1, c.v.begin());
        c.key = key;
        vec.push_back(c);
      };
      switch (k) {
        case 1: put(lists.c2); break;
        case 2: put(lists.c3); break;
        case 3: put(lists.c4); break;
        case 4: put(lists.c5); break;
        default: break;
      }
    });
  }
  auto sort_desc = [](auto& vec) {
    using C = typename std::decay_t<decltype(vec)>::value_type;
    std::sort(vec.begin(), vec.end(), [](const C& a, const C& b) { return older(b, a); });
  };
  sort_desc(lists.c2);
  sort_desc(lists.c3);
  sort_desc(lists.c4);
  sort_desc(lists.c5);
  if (dim_cap >= 2) out.f_vector[1] = lists.c2.size();
  if (dim_cap >= 3) out.f_vector[2] = lists.c3.size();
  if (dim_cap >= 4) out.f_vector[3] = lists.c4.size();
  if (dim_cap >= 5) out.f_vector[4] = lists.c5.size();

  // Dimension 0: union-find over edges, oldest first; merging edges are the pivots.
  std::vector<char> cleared;
  {
    std::vector<Index> parent(n);
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::vector<detail::Cell<2>> edges;
    const std::vector<detail::Cell<2>>* sorted = &lists.c2;
    if (dim_cap < 2) {
      for (std::size_t i = 0; i < n; ++i) {
        const auto nb = g.neighbors(i);
        const auto d2 = g.dist2(i);
        for (std::size_t t = 0; t < nb.size(); ++t)
          if (nb[t] > i) edges.push_back({d2[t], {static_cast<Index>(i), nb[t]}});
      }
      sort_desc(edges);
      sorted = &edges;
    }
    cleared.assign(sorted->size(), 0);
    std::size_t merges = 0;
    for (std::size_t t = sorted->size(); t-- > 0;) {
      const auto& e = (*sorted)[t];
      const Index a = find(e.v[0]), b = find(e.v[1]);
      if (a == b) continue;
      parent[std::max(a, b)] = std::min(a, b);
      cleared[t] = 1;
      ++merges;
    }
    out.ranks[1] = merges;
  }
  if (dim_cap >= 2) detail::run_dims<2>(ic, lists, cleared, dim_cap, out);

  for (int k = 0; k < dim_cap; ++k) {
    const auto f = static_cast<std::int64_t>(out.f_vector[k]);
    out.betti.euler += (k % 2 ? -f : f);
    out.betti.betti.push_back(f - static_cast<std::int64_t>(out.ranks[k]) -
                              static_cast<std::int64_t>(out.ranks[k + 1]));
  }
  return out;
}

}  // namespace rgc
