#pragma once

// Exact geometric predicates shared by the hull engine. Points are read
// through an ExactSource so that lifted coordinates (v, h + |v|^2/2) can be
// evaluated exactly from their base representation.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace onionlab::detail {

using Row = std::uint32_t;

class ExactSource {
 public:
  /// Plain coordinates; every value is exactly its double.
  static ExactSource plain(int dim, std::span<const double> coords);
  /// Rows (v_1..v_{dim-1}, h) lifted to (v, h + |v|^2/2); the last
  /// coordinate is evaluated exactly in rational arithmetic.
  static ExactSource lifted(int dim, std::span<const double> base);

  int dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : approx_.size() / static_cast<std::size_t>(dim_); }
  bool is_lifted() const { return lifted_; }
  double approx(std::size_t i, int j) const { return approx_[i * dim_ + j]; }
  void exact(std::size_t i, int j, mpq_class& out) const;

 private:
  int dim_ = 0;
  bool lifted_ = false;
  std::vector<double> approx_;
  std::vector<double> base_;
};

/// Dense view on a subset of rows and columns of an ExactSource.
class PointView {
 public:
  PointView(const ExactSource& src, std::vector<Row> rows, std::vector<int> cols);
  /// All rows, all columns.
  explicit PointView(const ExactSource& src);

  int dim() const { return static_cast<int>(cols_.size()); }
  std::size_t size() const { return rows_.size(); }
  const double* p(std::size_t i) const { return approx_.data() + i * cols_.size(); }
  Row source_row(std::size_t i) const { return rows_[i]; }
  int source_col(int j) const { return cols_[j]; }
  const std::vector<Row>& rows() const { return rows_; }
  const std::vector<int>& cols() const { return cols_; }
  const ExactSource& source() const { return *src_; }
  void exact(std::size_t i, int j, mpq_class& out) const { src_->exact(rows_[i], cols_[j], out); }
  /// True when some view column carries an inexact (lifted) coordinate.
  bool has_inexact_column() const { return inexact_; }

  PointView select_rows(std::vector<Row> view_rows) const;
  PointView select_cols(std::vector<int> view_cols) const;

 private:
  const ExactSource* src_;
  std::vector<Row> rows_;
  std::vector<int> cols_;
  std::vector<double> approx_;
  bool inexact_ = false;
};

/// Orientation predicate over a view of dimension m: the sign of
/// det [p_{r_0} 1; ...; p_{r_m} 1]. Floating-point filter first, exact GMP
/// evaluation when the filter cannot certify the sign. operator() breaks
/// exact zeros by Simulation of Simplicity keyed on the view row index and
/// records that a genuine zero was seen.
class Orientation {
 public:
  explicit Orientation(const PointView& view);

  int operator()(std::span<const Row> rows);
  /// Unperturbed sign, possibly 0.
  int exact_sign(std::span<const Row> rows);
  /// Magnitude proxy of the last filtered determinant (distance * facet volume).
  double last_value() const { return last_value_; }

  bool saw_zero() const { return saw_zero_; }
  void clear_zero_flag() { saw_zero_ = false; }
  std::size_t exact_evaluations() const { return exact_count_; }

 private:
  int filtered(std::span<const Row> rows, bool& certain);
  int exact_full(std::span<const Row> rows);
  int perturbed(std::span<const Row> rows);

  const PointView* view_;
  int m_;
  double err_coeff_;
  double last_value_ = 0.0;
  bool saw_zero_ = false;
  std::size_t exact_count_ = 0;
  std::vector<double> work_;
  std::vector<double> magn_;
  std::vector<mpq_class> qwork_;
};

/// Exact sign of the determinant of a square rational matrix (row-major); destroys the input.
int rational_det_sign(std::vector<mpq_class>& a, int n);

/// Determinant of a small dense double matrix (row-major) by partial-pivot elimination.
double det_double(std::vector<double> a, int n);

/// Rows among `active` forming an affine basis of their affine hull, found
/// with exact arithmetic. The result has affine-dimension + 1 entries.
std::vector<Row> affine_basis(const PointView& view, std::span<const Row> active);

/// Columns of the view onto which the affine hull spanned by `basis`
/// projects injectively. `prefer_last` puts the last view column first in
/// the pivot order when possible.
std::vector<int> injective_columns(const PointView& view, std::span<const Row> basis, bool prefer_last);

/// Whether the direction e_{col} lies in the linear span of the basis differences.
bool direction_in_span(const PointView& view, std::span<const Row> basis, int col);

}  // namespace onionlab::detail
