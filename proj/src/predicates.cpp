#include "onionlab/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "onionlab/error.hpp"

namespace onionlab::detail {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon() * 0.5;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Laplace expansion along the first row; returns det and the permanent of `mag`.
void laplace(const double* a, const double* mag, int n, double& det, double& perm) {
  if (n == 1) {
    det = a[0];
    perm = mag[0];
    return;
  }
  if (n == 2) {
    det = a[0] * a[3] - a[1] * a[2];
    perm = mag[0] * mag[3] + mag[1] * mag[2];
    return;
  }
  if (n == 3) {
    const double m0 = a[4] * a[8] - a[5] * a[7];
    const double m1 = a[3] * a[8] - a[5] * a[6];
    const double m2 = a[3] * a[7] - a[4] * a[6];
    det = a[0] * m0 - a[1] * m1 + a[2] * m2;
    const double p0 = mag[4] * mag[8] + mag[5] * mag[7];
    const double p1 = mag[3] * mag[8] + mag[5] * mag[6];
    const double p2 = mag[3] * mag[7] + mag[4] * mag[6];
    perm = mag[0] * p0 + mag[1] * p1 + mag[2] * p2;
    return;
  }
  std::vector<double> sub((n - 1) * (n - 1));
  std::vector<double> subm((n - 1) * (n - 1));
  det = 0.0;
  perm = 0.0;
  double sign = 1.0;
  for (int c = 0; c < n; ++c) {
    for (int i = 1; i < n; ++i) {
      int cc = 0;
      for (int j = 0; j < n; ++j) {
        if (j == c) continue;
        sub[(i - 1) * (n - 1) + cc] = a[i * n + j];
        subm[(i - 1) * (n - 1) + cc] = mag[i * n + j];
        ++cc;
      }
    }
    double d = 0.0, p = 0.0;
    laplace(sub.data(), subm.data(), n - 1, d, p);
    det += sign * a[c] * d;
    perm += mag[c] * p;
    sign = -sign;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ExactSource / PointView

ExactSource ExactSource::plain(int dim, std::span<const double> coords) {
  ExactSource s;
  s.dim_ = dim;
  s.approx_.assign(coords.begin(), coords.end());
  return s;
}

ExactSource ExactSource::lifted(int dim, std::span<const double> base) {
  ExactSource s;
  s.dim_ = dim;
  s.lifted_ = true;
  s.base_.assign(base.begin(), base.end());
  s.approx_.assign(base.begin(), base.end());
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (int j = 0; j + 1 < dim; ++j) sq += base[i * dim + j] * base[i * dim + j];
    s.approx_[i * dim + dim - 1] = base[i * dim + dim - 1] + 0.5 * sq;
  }
  return s;
}

void ExactSource::exact(std::size_t i, int j, mpq_class& out) const {
  if (!lifted_ || j != dim_ - 1) {
    out = approx_[i * dim_ + j];
    return;
  }
  mpq_class sq = 0;
  mpq_class t;
  for (int c = 0; c + 1 < dim_; ++c) {
    t = base_[i * dim_ + c];
    sq += t * t;
  }
  out = base_[i * dim_ + dim_ - 1];
  out += sq / 2;
}

PointView::PointView(const ExactSource& src, std::vector<Row> rows, std::vector<int> cols)
    : src_(&src), rows_(std::move(rows)), cols_(std::move(cols)) {
  approx_.resize(rows_.size() * cols_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      approx_[i * cols_.size() + j] = src.approx(rows_[i], cols_[j]);
    }
  }
  inexact_ = src.is_lifted() &&
             std::find(cols_.begin(), cols_.end(), src.dim() - 1) != cols_.end();
}

PointView::PointView(const ExactSource& src)
    : PointView(src,
                [&] {
                  std::vector<Row> r(src.size());
                  std::iota(r.begin(), r.end(), Row{0});
                  return r;
                }(),
                [&] {
                  std::vector<int> c(src.dim());
                  std::iota(c.begin(), c.end(), 0);
                  return c;
                }()) {}

PointView PointView::select_rows(std::vector<Row> view_rows) const {
  std::vector<Row> r;
  r.reserve(view_rows.size());
  for (Row v : view_rows) r.push_back(rows_[v]);
  return PointView(*src_, std::move(r), cols_);
}

PointView PointView::select_cols(std::vector<int> view_cols) const {
  std::vector<int> c;
  c.reserve(view_cols.size());
  for (int v : view_cols) c.push_back(cols_[v]);
  return PointView(*src_, rows_, std::move(c));
}

// ---------------------------------------------------------------------------
// Orientation

Orientation::Orientation(const PointView& view) : view_(&view), m_(view.dim()) {
  double c = 16.0 * (factorial(m_) + m_ + 1.0);
  if (view.has_inexact_column()) c *= 4.0 * (view.source().dim() + 1);
  err_coeff_ = c * kEps;
  work_.resize(static_cast<std::size_t>(m_) * m_);
  magn_.resize(static_cast<std::size_t>(m_) * m_);
}

int Orientation::filtered(std::span<const Row> rows, bool& certain) {
  const int m = m_;
  const double* p0 = view_->p(rows[0]);
  for (int i = 1; i <= m; ++i) {
    const double* pi = view_->p(rows[i]);
    for (int j = 0; j < m; ++j) {
      work_[(i - 1) * m + j] = pi[j] - p0[j];
      magn_[(i - 1) * m + j] = std::fabs(pi[j]) + std::fabs(p0[j]);
    }
  }
  double det = 0.0, perm = 0.0;
  if (m <= 6) {
    laplace(work_.data(), magn_.data(), m, det, perm);
  } else {
    certain = false;
    return 0;
  }
  // det[p 1] = (-1)^m det(differences)
  if (m % 2 == 1) det = -det;
  last_value_ = det;
  const double bound = err_coeff_ * perm;
  if (det > bound) {
    certain = true;
    return 1;
  }
  if (-det > bound) {
    certain = true;
    return -1;
  }
  certain = false;
  return 0;
}

int rational_det_sign(std::vector<mpq_class>& a, int n) {
  int sign = 1;
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
      sign = -sign;
    }
    if (sgn(a[c * n + c]) < 0) sign = -sign;
    for (int r = c + 1; r < n; ++r) {
      if (sgn(a[r * n + c]) == 0) continue;
      mpq_class f = a[r * n + c] / a[c * n + c];
      for (int j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
    }
  }
  return sign;
}

double det_double(std::vector<double> a, int n) {
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r) {
      if (std::fabs(a[r * n + c]) > std::fabs(a[piv * n + c])) piv = r;
    }
    if (a[piv * n + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(a[piv * n + j], a[c * n + j]);
      det = -det;
    }
    det *= a[c * n + c];
    for (int r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (int j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
    }
  }
  return det;
}

int Orientation::exact_full(std::span<const Row> rows) {
  ++exact_count_;
  const int m = m_;
  qwork_.resize(static_cast<std::size_t>(m) * m);
  mpq_class base, x;
  for (int j = 0; j < m; ++j) {
    view_->exact(rows[0], j, base);
    for (int i = 1; i <= m; ++i) {
      view_->exact(rows[i], j, x);
      qwork_[(i - 1) * m + j] = x - base;
    }
  }
  int s = rational_det_sign(qwork_, m);
  if (m % 2 == 1) s = -s;
  return s;
}

int Orientation::exact_sign(std::span<const Row> rows) {
  bool certain = false;
  const int s = filtered(rows, certain);
  if (certain) return s;
  return exact_full(rows);
}

// Simulation of Simplicity: coordinate j of the point with view row r is
// perturbed by eps^(2^pos), pos increasing with (rank of r, j). Terms of the
// expanded determinant are visited in order of increasing exponent.
int Orientation::perturbed(std::span<const Row> rows) {
  const int m = m_;
  const int k = m + 1;
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return rows[a] < rows[b]; });
  std::vector<int> rank(k);
  for (int r = 0; r < k; ++r) rank[order[r]] = r;

  std::vector<mpq_class> full(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < m; ++j) view_->exact(rows[i], j, full[i * k + j]);
    full[i * k + m] = 1;
  }
  const int bits = k * m;
  const std::uint64_t limit = bits >= 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits);
  std::vector<int> row_col(k);
  std::vector<mpq_class> a;
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    std::fill(row_col.begin(), row_col.end(), -1);
    std::uint32_t used_cols = 0;
    bool ok = true;
    for (int b = 0; b < bits && ok; ++b) {
      if (!(mask >> b & 1U)) continue;
      const int r = b / m;
      const int c = b % m;
      const int i = order[r];
      if (row_col[i] >= 0 || (used_cols >> c & 1U)) ok = false;
      row_col[i] = c;
      used_cols |= 1U << c;
    }
    if (!ok) continue;
    a = full;
    for (int i = 0; i < k; ++i) {
      if (row_col[i] < 0) continue;
      for (int j = 0; j < k; ++j) a[i * k + j] = (j == row_col[i]) ? 1 : 0;
    }
    const int s = rational_det_sign(a, k);
    if (s != 0) return s;
  }
  throw Error("Orientation: symbolic perturbation failed to resolve a tie");
}

int Orientation::operator()(std::span<const Row> rows) {
  bool certain = false;
  const int s = filtered(rows, certain);
  if (certain) return s;
  const int e = exact_full(rows);
  if (e != 0) return e;
  saw_zero_ = true;
  return perturbed(rows);
}

// ---------------------------------------------------------------------------
// Affine structure

namespace {

struct Echelon {
  int dim;
  std::vector<std::vector<mpq_class>> vecs;
  std::vector<int> pivots;

  // Reduces v against the stored vectors; returns the first nonzero column or -1.
  int reduce(std::vector<mpq_class>& v) const {
    for (std::size_t e = 0; e < vecs.size(); ++e) {
      const int c = pivots[e];
      if (sgn(v[c]) == 0) continue;
      mpq_class f = v[c] / vecs[e][c];
      for (int j = 0; j < dim; ++j) v[j] -= f * vecs[e][j];
    }
    for (int j = 0; j < dim; ++j) {
      if (sgn(v[j]) != 0) return j;
    }
    return -1;
  }
};

std::vector<mpq_class> difference(const PointView& view, Row a, Row b) {
  const int m = view.dim();
  std::vector<mpq_class> d(m);
  mpq_class x, y;
  for (int j = 0; j < m; ++j) {
    view.exact(a, j, x);
    view.exact(b, j, y);
    d[j] = x - y;
  }
  return d;
}

}  // namespace

std::vector<Row> affine_basis(const PointView& view, std::span<const Row> active) {
  std::vector<Row> basis;
  if (active.empty()) return basis;
  basis.push_back(active[0]);
  const int m = view.dim();
  Echelon ech{m, {}, {}};
  for (std::size_t t = 1; t < active.size() && static_cast<int>(basis.size()) <= m; ++t) {
    const Row i = active[t];
    auto d = difference(view, i, active[0]);
    const int piv = ech.reduce(d);
    if (piv >= 0) {
      ech.vecs.push_back(std::move(d));
      ech.pivots.push_back(piv);
      basis.push_back(i);
    }
  }
  return basis;
}

std::vector<int> injective_columns(const PointView& view, std::span<const Row> basis, bool prefer_last) {
  const int m = view.dim();
  std::vector<std::vector<mpq_class>> vecs;
  for (std::size_t i = 1; i < basis.size(); ++i) vecs.push_back(difference(view, basis[i], basis[0]));
  std::vector<int> col_order;
  if (prefer_last) col_order.push_back(m - 1);
  for (int j = 0; j < m; ++j) {
    if (!(prefer_last && j == m - 1)) col_order.push_back(j);
  }
  std::vector<int> chosen;
  std::vector<char> used(vecs.size(), 0);
  for (int c : col_order) {
    int piv = -1;
    for (std::size_t r = 0; r < vecs.size(); ++r) {
      if (!used[r] && sgn(vecs[r][c]) != 0) {
        piv = static_cast<int>(r);
        break;
      }
    }
    if (piv < 0) continue;
    used[piv] = 1;
    chosen.push_back(c);
    for (std::size_t r = 0; r < vecs.size(); ++r) {
      if (static_cast<int>(r) == piv || sgn(vecs[r][c]) == 0) continue;
      mpq_class f = vecs[r][c] / vecs[piv][c];
      for (int j = 0; j < m; ++j) vecs[r][j] -= f * vecs[piv][j];
    }
    if (chosen.size() == vecs.size()) break;
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

bool direction_in_span(const PointView& view, std::span<const Row> basis, int col) {
  const int m = view.dim();
  Echelon ech{m, {}, {}};
  for (std::size_t i = 1; i < basis.size(); ++i) {
    auto d = difference(view, basis[i], basis[0]);
    const int piv = ech.reduce(d);
    if (piv >= 0) {
      ech.vecs.push_back(std::move(d));
      ech.pivots.push_back(piv);
    }
  }
  std::vector<mpq_class> e(m, 0);
  e[col] = 1;
  return ech.reduce(e) < 0;
}

}  // namespace onionlab::detail
