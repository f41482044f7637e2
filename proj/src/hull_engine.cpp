#include "hull_engine.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <numeric>

#include "onionlab/error.hpp"

namespace onionlab::detail {

namespace {

// Simplicial boundary of a full-dimensional hull; facet f occupies
// verts[f*m .. f*m+m) and nbrs[f*m+t] is the facet across from verts[f*m+t].
struct Skeleton {
  int m = 0;
  std::vector<Row> verts;
  std::vector<std::int32_t> nbrs;
  bool degenerate = false;

  std::size_t count() const { return m == 0 ? 0 : verts.size() / static_cast<std::size_t>(m); }
  std::span<const Row> facet(std::size_t f) const { return {verts.data() + f * m, static_cast<std::size_t>(m)}; }
  Row opposite_in(std::size_t h, std::size_t f) const {
    for (int s = 0; s < m; ++s) {
      if (nbrs[h * m + s] == static_cast<std::int32_t>(f)) return verts[h * m + s];
    }
    throw Error("hull skeleton: inconsistent adjacency");
  }
};

int side_of(Orientation& orient, std::span<const Row> facet, Row q, std::vector<Row>& tmp) {
  std::copy(facet.begin(), facet.end(), tmp.begin());
  tmp[facet.size()] = q;
  return orient(tmp);
}

int exact_side_of(Orientation& orient, std::span<const Row> facet, Row q, std::vector<Row>& tmp) {
  std::copy(facet.begin(), facet.end(), tmp.begin());
  tmp[facet.size()] = q;
  return orient.exact_sign(tmp);
}

// ---------------------------------------------------------------------------
// Beneath-beyond with outside sets (furthest point first).

class BeneathBeyond {
 public:
  BeneathBeyond(const PointView& view, Orientation& orient, std::span<const Row> active,
                std::span<const Row> basis)
      : view_(view), orient_(orient), active_(active), basis_(basis), m_(view.dim()), tmp_(m_ + 1) {}

  Skeleton run() {
    init_simplex();
    std::vector<int> pending;
    for (std::size_t f = 0; f < alive_.size(); ++f) {
      if (!outside_[f].empty()) pending.push_back(static_cast<int>(f));
    }
    std::vector<int> visible, fresh;
    std::vector<std::pair<int, int>> horizon;
    std::vector<std::uint32_t> row_mark(view_.size(), 0);
    std::uint32_t row_stamp = 0;

    while (!pending.empty()) {
      const int f0 = pending.back();
      pending.pop_back();
      if (!alive_[f0] || outside_[f0].empty()) continue;
      const Row q = best_row_[f0];

      // Visible region by breadth-first search from f0.
      ++stamp_counter_;
      visible.assign(1, f0);
      stamp_[f0] = stamp_counter_;
      visible_flag_[f0] = 1;
      horizon.clear();
      for (std::size_t idx = 0; idx < visible.size(); ++idx) {
        const int g = visible[idx];
        for (int t = 0; t < m_; ++t) {
          const int h = nbrs_[g * m_ + t];
          if (stamp_[h] != stamp_counter_) {
            stamp_[h] = stamp_counter_;
            visible_flag_[h] = side_of(orient_, facet(h), q, tmp_) > 0 ? 1 : 0;
            if (visible_flag_[h]) visible.push_back(h);
          }
          if (!visible_flag_[h]) horizon.emplace_back(g, t);
        }
      }

      // Cone from q over the horizon ridges.
      fresh.clear();
      for (auto [g, t] : horizon) {
        const int nf = new_facet();
        for (int u = 0; u < m_; ++u) verts_[nf * m_ + u] = verts_[g * m_ + u];
        verts_[nf * m_ + t] = q;
        const int h = nbrs_[g * m_ + t];
        nbrs_[nf * m_ + t] = h;
        for (int s = 0; s < m_; ++s) {
          if (nbrs_[h * m_ + s] == g) {
            nbrs_[h * m_ + s] = nf;
            break;
          }
        }
        fresh.push_back(nf);
      }
      link_new_facets(fresh, q);

      // Vertices swallowed by this step may sit exactly on a new facet.
      ++row_stamp;
      for (int nf : fresh) {
        for (int u = 0; u < m_; ++u) row_mark[verts_[nf * m_ + u]] = row_stamp;
      }
      for (int g : visible) {
        for (int u = 0; u < m_; ++u) {
          const Row v = verts_[g * m_ + u];
          if (row_mark[v] == row_stamp) continue;
          row_mark[v] = row_stamp;
          for (int nf : fresh) {
            if (exact_side_of(orient_, facet(nf), v, tmp_) == 0) degenerate_ = true;
          }
        }
      }

      // Redistribute outside points of the removed facets.
      for (int g : visible) {
        for (Row p : outside_[g]) {
          if (p == q) continue;
          bool placed = false;
          for (int nf : fresh) {
            if (side_of(orient_, facet(nf), p, tmp_) > 0) {
              assign(nf, p);
              placed = true;
              break;
            }
          }
          (void)placed;
        }
        std::vector<Row>().swap(outside_[g]);
        alive_[g] = 0;
      }
      for (int nf : fresh) {
        if (!outside_[nf].empty()) pending.push_back(nf);
      }
    }
    return compact();
  }

 private:
  std::span<const Row> facet(int f) const { return {verts_.data() + f * m_, static_cast<std::size_t>(m_)}; }

  int new_facet() {
    const int idx = static_cast<int>(alive_.size());
    verts_.resize(verts_.size() + m_);
    nbrs_.resize(nbrs_.size() + m_, -1);
    alive_.push_back(1);
    outside_.emplace_back();
    best_val_.push_back(-std::numeric_limits<double>::infinity());
    best_row_.push_back(0);
    stamp_.push_back(0);
    visible_flag_.push_back(0);
    return idx;
  }

  void assign(int f, Row p) {
    outside_[f].push_back(p);
    const double v = orient_.last_value();
    if (v > best_val_[f] || outside_[f].size() == 1) {
      best_val_[f] = v;
      best_row_[f] = p;
    }
  }

  void init_simplex() {
    const int k = m_ + 1;
    for (int i = 0; i < k; ++i) {
      const int f = new_facet();
      int u = 0;
      for (int j = 0; j < k; ++j) {
        if (j != i) verts_[f * m_ + u++] = basis_[j];
      }
      if (side_of(orient_, facet(f), basis_[i], tmp_) > 0) std::swap(verts_[f * m_], verts_[f * m_ + 1]);
    }
    for (int f = 0; f < k; ++f) {
      for (int t = 0; t < m_; ++t) {
        const Row opp = verts_[f * m_ + t];
        const auto it = std::find(basis_.begin(), basis_.end(), opp);
        nbrs_[f * m_ + t] = static_cast<int>(it - basis_.begin());
      }
    }
    std::vector<char> in_basis(view_.size(), 0);
    for (Row b : basis_) in_basis[b] = 1;
    for (Row p : active_) {
      if (in_basis[p]) continue;
      for (int f = 0; f < k; ++f) {
        if (side_of(orient_, facet(f), p, tmp_) > 0) {
          assign(f, p);
          break;
        }
      }
    }
  }

  void link_new_facets(const std::vector<int>& fresh, Row q) {
    struct Entry {
      std::array<Row, 8> key;
      int f;
      int s;
    };
    std::vector<Entry> entries;
    entries.reserve(fresh.size() * (m_ - 1));
    for (int nf : fresh) {
      for (int s = 0; s < m_; ++s) {
        if (verts_[nf * m_ + s] == q) continue;
        Entry e{};
        e.key.fill(std::numeric_limits<Row>::max());
        int u = 0;
        for (int w = 0; w < m_; ++w) {
          if (w == s) continue;
          const Row r = verts_[nf * m_ + w];
          if (r != q) e.key[u++] = r;
        }
        std::sort(e.key.begin(), e.key.begin() + u);
        e.f = nf;
        e.s = s;
        entries.push_back(e);
      }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.key < b.key; });
    for (std::size_t i = 0; i + 1 < entries.size(); i += 2) {
      if (entries[i].key != entries[i + 1].key) throw Error("beneath-beyond: unmatched ridge");
      nbrs_[entries[i].f * m_ + entries[i].s] = entries[i + 1].f;
      nbrs_[entries[i + 1].f * m_ + entries[i + 1].s] = entries[i].f;
    }
    if (entries.size() % 2 != 0) throw Error("beneath-beyond: odd ridge count");
  }

  Skeleton compact() {
    Skeleton sk;
    sk.m = m_;
    std::vector<std::int32_t> remap(alive_.size(), -1);
    std::int32_t next = 0;
    for (std::size_t f = 0; f < alive_.size(); ++f) {
      if (alive_[f]) remap[f] = next++;
    }
    sk.verts.reserve(static_cast<std::size_t>(next) * m_);
    sk.nbrs.reserve(static_cast<std::size_t>(next) * m_);
    for (std::size_t f = 0; f < alive_.size(); ++f) {
      if (!alive_[f]) continue;
      for (int t = 0; t < m_; ++t) {
        sk.verts.push_back(verts_[f * m_ + t]);
        sk.nbrs.push_back(remap[nbrs_[f * m_ + t]]);
      }
    }
    sk.degenerate = degenerate_ || orient_.saw_zero();
    return sk;
  }

  const PointView& view_;
  Orientation& orient_;
  std::span<const Row> active_;
  std::span<const Row> basis_;
  int m_;
  std::vector<Row> tmp_;
  std::vector<Row> verts_;
  std::vector<std::int32_t> nbrs_;
  std::vector<char> alive_;
  std::vector<std::vector<Row>> outside_;
  std::vector<double> best_val_;
  std::vector<Row> best_row_;
  std::vector<std::uint32_t> stamp_;
  std::vector<char> visible_flag_;
  std::uint32_t stamp_counter_ = 0;
  bool degenerate_ = false;
};

// ---------------------------------------------------------------------------
// Andrew's monotone chain; only strict turns are kept as vertices.

Skeleton monotone_chain(Orientation& orient, std::span<const Row> sorted) {
  Skeleton sk;
  sk.m = 2;
  std::vector<Row> tmp(3);
  auto turn = [&](Row a, Row b, Row c) {
    tmp[0] = a;
    tmp[1] = b;
    tmp[2] = c;
    const int s = orient.exact_sign(tmp);
    if (s == 0) sk.degenerate = true;
    return s;
  };
  std::vector<Row> lower, upper;
  for (Row p : sorted) {
    while (lower.size() >= 2 && turn(lower[lower.size() - 2], lower.back(), p) <= 0) lower.pop_back();
    lower.push_back(p);
  }
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
    while (upper.size() >= 2 && turn(upper[upper.size() - 2], upper.back(), *it) <= 0) upper.pop_back();
    upper.push_back(*it);
  }
  std::vector<Row> cycle(lower.begin(), lower.end() - 1);
  cycle.insert(cycle.end(), upper.begin(), upper.end() - 1);
  const std::size_t h = cycle.size();
  sk.verts.resize(2 * h);
  sk.nbrs.resize(2 * h);
  for (std::size_t i = 0; i < h; ++i) {
    sk.verts[2 * i] = cycle[(i + 1) % h];
    sk.verts[2 * i + 1] = cycle[i];
    sk.nbrs[2 * i] = static_cast<std::int32_t>((i + h - 1) % h);
    sk.nbrs[2 * i + 1] = static_cast<std::int32_t>((i + 1) % h);
  }
  return sk;
}

// ---------------------------------------------------------------------------
// True facets: maximal groups of exactly coplanar adjacent simplices.

struct Resolved {
  std::vector<int> group_of;
  std::vector<std::vector<int>> group_simplices;
  std::vector<std::vector<Row>> group_points;  // every active row on the facet, sorted
  std::vector<Row> boundary;                   // every active row on the boundary, sorted
};

mpq_class rational_det(std::vector<mpq_class>& a, int n) {
  mpq_class det = 1;
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r) {
      if (sgn(a[r * n + c]) != 0) {
        piv = r;
        break;
      }
    }
    if (piv < 0) return 0;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(a[piv * n + j], a[c * n + j]);
      det = -det;
    }
    det *= a[c * n + c];
    for (int r = c + 1; r < n; ++r) {
      if (sgn(a[r * n + c]) == 0) continue;
      const mpq_class f = a[r * n + c] / a[c * n + c];
      for (int j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
    }
  }
  return det;
}

// Exact oriented hyperplane of a boundary simplex, scaled so that its first
// nonzero coefficient is +-1. Empty for simplices that are affinely degenerate
// (possible under symbolic perturbation when input points are collinear).
std::vector<mpq_class> plane_key(const PointView& view, std::span<const Row> simplex) {
  const int m = view.dim();
  std::vector<mpq_class> rows(static_cast<std::size_t>(m) * (m + 1));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) view.exact(simplex[i], j, rows[i * (m + 1) + j]);
    rows[i * (m + 1) + m] = 1;
  }
  std::vector<mpq_class> key(m + 1), minor(static_cast<std::size_t>(m) * m);
  bool nonzero = false;
  for (int c = 0; c <= m; ++c) {
    for (int i = 0; i < m; ++i) {
      int cc = 0;
      for (int j = 0; j <= m; ++j) {
        if (j != c) minor[i * m + cc++] = rows[i * (m + 1) + j];
      }
    }
    key[c] = rational_det(minor, m);
    if ((m + c) % 2 == 1) key[c] = -key[c];
    if (c < m && sgn(key[c]) != 0) nonzero = true;
  }
  if (!nonzero) return {};
  mpq_class scale;
  for (const auto& x : key) {
    if (sgn(x) != 0) {
      scale = abs(x);
      break;
    }
  }
  for (auto& x : key) x /= scale;
  return key;
}

Resolved resolve(const Skeleton& sk, const PointView& view, Orientation& orient, std::span<const Row> active) {
  Resolved rs;
  const std::size_t nf = sk.count();
  const int m = sk.m;
  std::vector<Row> tmp(m + 1);
  rs.group_of.assign(nf, -1);
  if (sk.degenerate) {
    // A supporting hyperplane meets the polytope in a single face, so equal
    // oriented planes identify the simplices of one true facet.
    std::vector<std::vector<mpq_class>> keys(nf);
    std::vector<std::size_t> order;
    for (std::size_t f = 0; f < nf; ++f) {
      keys[f] = plane_key(view, sk.facet(f));
      if (!keys[f].empty()) order.push_back(f);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (keys[a] != keys[b]) return std::lexicographical_compare(keys[a].begin(), keys[a].end(), keys[b].begin(), keys[b].end());
      return a < b;
    });
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i == 0 || keys[order[i]] != keys[order[i - 1]]) rs.group_simplices.emplace_back();
      rs.group_of[order[i]] = static_cast<int>(rs.group_simplices.size()) - 1;
      rs.group_simplices.back().push_back(static_cast<int>(order[i]));
    }
  } else {
    for (std::size_t f = 0; f < nf; ++f) {
      rs.group_of[f] = static_cast<int>(f);
      rs.group_simplices.push_back({static_cast<int>(f)});
    }
  }
  const std::size_t ng = rs.group_simplices.size();
  rs.group_points.resize(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    auto& pts = rs.group_points[g];
    for (int f : rs.group_simplices[g]) {
      for (Row r : sk.facet(f)) pts.push_back(r);
    }
  }
  for (auto& pts : rs.group_points) std::sort(pts.begin(), pts.end());
  if (sk.degenerate) {
    std::vector<std::vector<Row>> extra(ng);
    for (Row r : active) {
      for (std::size_t g = 0; g < ng; ++g) {
        const auto& pts = rs.group_points[g];
        if (std::binary_search(pts.begin(), pts.end(), r)) continue;
        if (exact_side_of(orient, sk.facet(rs.group_simplices[g][0]), r, tmp) == 0) extra[g].push_back(r);
      }
    }
    for (std::size_t g = 0; g < ng; ++g) {
      rs.group_points[g].insert(rs.group_points[g].end(), extra[g].begin(), extra[g].end());
    }
  }
  for (auto& pts : rs.group_points) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    rs.boundary.insert(rs.boundary.end(), pts.begin(), pts.end());
  }
  std::sort(rs.boundary.begin(), rs.boundary.end());
  rs.boundary.erase(std::unique(rs.boundary.begin(), rs.boundary.end()), rs.boundary.end());
  return rs;
}

void sort_unique(std::vector<std::vector<Row>>& sets) {
  for (auto& s : sets) std::sort(s.begin(), s.end());
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
}

void add_subsets(std::span<const Row> set, int size, std::vector<std::vector<Row>>& out) {
  const int n = static_cast<int>(set.size());
  std::vector<int> idx(size);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    std::vector<Row> s(size);
    for (int i = 0; i < size; ++i) s[i] = set[idx[i]];
    out.push_back(std::move(s));
    int i = size - 1;
    while (i >= 0 && idx[i] == n - size + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Faces of the selected true facets. Lower-dimensional faces of a face F are
// the maximal sets among F ∩ G over all true facets G not containing F.
RowLattice lattice_from(const Skeleton& sk, const Resolved& rs, const std::vector<char>& selected) {
  RowLattice lat;
  const int m = sk.m;
  lat.dim_ambient = m;
  lat.dim_hull = m;
  lat.faces.assign(m, {});
  const std::size_t ng = rs.group_simplices.size();

  if (!sk.degenerate) {
    for (std::size_t g = 0; g < ng; ++g) {
      if (!selected[g]) continue;
      const auto f = sk.facet(rs.group_simplices[g][0]);
      std::vector<Row> sorted(f.begin(), f.end());
      std::sort(sorted.begin(), sorted.end());
      for (int k = 0; k < m; ++k) add_subsets(sorted, k + 1, lat.faces[k]);
    }
    for (auto& level : lat.faces) sort_unique(level);
  } else {
    std::vector<std::vector<Row>> level;
    for (std::size_t g = 0; g < ng; ++g) {
      if (selected[g]) level.push_back(rs.group_points[g]);
    }
    sort_unique(level);
    lat.faces[m - 1] = level;
    std::vector<Row> cut;
    for (int k = m - 1; k >= 1; --k) {
      std::vector<std::vector<Row>> next;
      for (const auto& face : lat.faces[k]) {
        std::vector<std::vector<Row>> cands;
        for (std::size_t g = 0; g < ng; ++g) {
          const auto& pts = rs.group_points[g];
          cut.clear();
          std::set_intersection(face.begin(), face.end(), pts.begin(), pts.end(), std::back_inserter(cut));
          if (cut.empty() || cut.size() == face.size()) continue;
          cands.push_back(cut);
        }
        sort_unique(cands);
        for (std::size_t i = 0; i < cands.size(); ++i) {
          bool maximal = true;
          for (std::size_t j = 0; j < cands.size() && maximal; ++j) {
            if (i != j && cands[j].size() > cands[i].size() &&
                std::includes(cands[j].begin(), cands[j].end(), cands[i].begin(), cands[i].end())) {
              maximal = false;
            }
          }
          if (maximal) next.push_back(cands[i]);
        }
      }
      sort_unique(next);
      lat.faces[k - 1] = std::move(next);
    }
    std::vector<Row> vertices;
    for (const auto& v : lat.faces[0]) {
      if (v.size() != 1) throw Error("face lattice: vertex face with more than one point");
      vertices.push_back(v[0]);
    }
    std::sort(vertices.begin(), vertices.end());
    for (int k = 1; k < m; ++k) {
      for (auto& face : lat.faces[k]) {
        std::vector<Row> kept;
        std::set_intersection(face.begin(), face.end(), vertices.begin(), vertices.end(), std::back_inserter(kept));
        face = std::move(kept);
      }
      sort_unique(lat.faces[k]);
    }
  }

  for (std::size_t g = 0; g < ng; ++g) {
    if (!selected[g]) continue;
    RowFacet facet;
    const auto rep = sk.facet(rs.group_simplices[g][0]);
    facet.simplex.assign(rep.begin(), rep.end());
    if (!sk.degenerate) {
      facet.rows = facet.simplex;
      std::sort(facet.rows.begin(), facet.rows.end());
    } else {
      const auto& verts0 = lat.faces[0];
      for (Row r : rs.group_points[g]) {
        if (std::binary_search(verts0.begin(), verts0.end(), std::vector<Row>{r})) facet.rows.push_back(r);
      }
    }
    lat.facets.push_back(std::move(facet));
    for (int f : rs.group_simplices[g]) {
      const auto s = sk.facet(f);
      lat.simplices.emplace_back(s.begin(), s.end());
    }
  }
  return lat;
}

HullComputation one_dimensional(const PointView& view, Orientation& orient, std::span<const Row> active,
                                HullMode mode) {
  std::vector<Row> tmp(2);
  Row lo = active[0], hi = active[0];
  for (Row r : active) {
    tmp[0] = r;
    tmp[1] = lo;
    if (orient.exact_sign(tmp) < 0) lo = r;
    tmp[1] = hi;
    if (orient.exact_sign(tmp) > 0) hi = r;
  }
  HullComputation hc;
  hc.lattice.dim_ambient = 1;
  hc.lattice.dim_hull = 1;
  hc.lattice.faces.assign(1, {});
  hc.lattice.faces[0].push_back({lo});
  if (mode == HullMode::Full) {
    hc.lattice.faces[0].push_back({hi});
    sort_unique(hc.lattice.faces[0]);
    hc.consumed = {std::min(lo, hi), std::max(lo, hi)};
  } else {
    hc.consumed = {lo};
  }
  (void)view;
  return hc;
}

std::vector<Row> vertex_rows(const RowLattice& lat) {
  std::vector<Row> v;
  if (lat.faces.empty()) return v;
  for (const auto& f : lat.faces[0]) v.push_back(f[0]);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::vector<Row> sort_rows_lexicographic(const PointView& view, std::vector<Row> rows) {
  const int m = view.dim();
  const bool inexact = view.has_inexact_column();
  std::sort(rows.begin(), rows.end(), [&](Row a, Row b) {
    const double* pa = view.p(a);
    const double* pb = view.p(b);
    for (int j = 0; j < m; ++j) {
      if (pa[j] != pb[j] && !(inexact && j == m - 1)) return pa[j] < pb[j];
      if (inexact && j == m - 1) {
        if (pa[j] < pb[j] - 1e-9 * (std::abs(pa[j]) + std::abs(pb[j]))) return true;
        if (pb[j] < pa[j] - 1e-9 * (std::abs(pa[j]) + std::abs(pb[j]))) return false;
        mpq_class x, y;
        view.exact(a, j, x);
        view.exact(b, j, y);
        if (x != y) return x < y;
      }
    }
    return false;
  });
  return rows;
}

HullComputation compute_hull(const PointView& view, Orientation& orient, std::span<const Row> active,
                             HullMode mode, bool active_sorted_2d) {
  HullComputation hc;
  const int m = view.dim();
  hc.lattice.dim_ambient = m;
  if (active.empty()) return hc;

  const std::vector<Row> basis = affine_basis(view, active);
  const int mdim = static_cast<int>(basis.size()) - 1;

  if (mdim == m) {
    if (m == 1) return one_dimensional(view, orient, active, mode);
    orient.clear_zero_flag();
    Skeleton sk;
    if (m == 2) {
      if (active_sorted_2d) {
        sk = monotone_chain(orient, active);
      } else {
        const auto sorted = sort_rows_lexicographic(view, std::vector<Row>(active.begin(), active.end()));
        sk = monotone_chain(orient, sorted);
      }
    } else {
      sk = BeneathBeyond(view, orient, active, basis).run();
    }
    // Lower mode: classify simplices by the sign of the vertical normal component.
    std::vector<int> zsign;
    if (mode == HullMode::Lower) {
      std::vector<int> vcols(m - 1);
      std::iota(vcols.begin(), vcols.end(), 0);
      const PointView vview = view.select_cols(vcols);
      Orientation vorient(vview);
      zsign.resize(sk.count());
      for (std::size_t f = 0; f < sk.count(); ++f) {
        zsign[f] = vorient.exact_sign(sk.facet(f));
        if (zsign[f] == 0) sk.degenerate = true;
      }
    }
    const Resolved rs = resolve(sk, view, orient, active);
    const std::size_t ng = rs.group_simplices.size();
    std::vector<char> selected(ng, 1);
    if (mode == HullMode::Lower) {
      std::vector<Row> consumed;
      for (std::size_t g = 0; g < ng; ++g) {
        const int z = zsign[rs.group_simplices[g][0]];
        selected[g] = z > 0 ? 1 : 0;
        if (z >= 0) consumed.insert(consumed.end(), rs.group_points[g].begin(), rs.group_points[g].end());
      }
      std::sort(consumed.begin(), consumed.end());
      consumed.erase(std::unique(consumed.begin(), consumed.end()), consumed.end());
      hc.consumed = std::move(consumed);
    } else {
      hc.consumed = rs.boundary;
    }
    hc.lattice = lattice_from(sk, rs, selected);
    hc.degenerate = sk.degenerate;
  } else {
    hc.consumed.assign(active.begin(), active.end());
    std::sort(hc.consumed.begin(), hc.consumed.end());
    hc.lattice.dim_hull = mdim;
    if (mdim == 0) {
      hc.lattice.faces.assign(1, {{active[0]}});
    } else {
      const bool vertical = mode == HullMode::Lower && direction_in_span(view, basis, m - 1);
      const std::vector<int> cols = injective_columns(view, basis, vertical);
      std::vector<Row> sub_rows(active.begin(), active.end());
      const PointView sub = view.select_rows(sub_rows).select_cols(cols);
      Orientation sub_orient(sub);
      std::vector<Row> sub_active(sub.size());
      std::iota(sub_active.begin(), sub_active.end(), Row{0});
      HullComputation inner =
          compute_hull(sub, sub_orient, sub_active, vertical ? HullMode::Lower : HullMode::Full);
      hc.degenerate = true;
      auto& faces = hc.lattice.faces;
      faces = std::move(inner.lattice.faces);
      for (auto& level : faces) {
        for (auto& face : level) {
          for (Row& r : face) r = sub_rows[r];
        }
        sort_unique(level);
      }
      if (!vertical) {
        // Lower-dimensional body: the hull itself is its top face.
        std::vector<Row> top;
        for (const auto& v : faces[0]) top.push_back(v[0]);
        std::sort(top.begin(), top.end());
        faces.resize(mdim + 1);
        faces[mdim] = {top};
      }
    }
  }

  const std::vector<Row> verts = vertex_rows(hc.lattice);
  std::set_difference(hc.consumed.begin(), hc.consumed.end(), verts.begin(), verts.end(),
                      std::back_inserter(hc.lattice.boundary_nonvertices));
  return hc;
}

}  // namespace onionlab::detail
