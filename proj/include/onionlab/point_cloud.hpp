#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace onionlab {

using PointId = std::int64_t;

/// Finite labeled point set in R^dim. Ids are unique and no two points share
/// coordinates; both are checked on construction.
class PointCloud {
 public:
  explicit PointCloud(int dim = 2);
  PointCloud(int dim, std::vector<PointId> ids, std::vector<double> coords);

  int dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

  PointId id(std::size_t i) const { return ids_[i]; }
  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  double coord(std::size_t i, int j) const { return coords_[i * static_cast<std::size_t>(dim_) + j]; }

  const std::vector<PointId>& ids() const { return ids_; }
  const std::vector<double>& coords() const { return coords_; }

  std::optional<std::size_t> index_of(PointId id) const;
  std::size_t index_or_throw(PointId id) const;
  PointId max_id() const;

  /// Points at the given positions, in the given order.
  PointCloud subset(std::span<const std::size_t> indices) const;
  /// Copy of this cloud with one extra point appended.
  PointCloud with_point(PointId id, std::span<const double> x) const;

 private:
  void validate();

  int dim_;
  std::vector<PointId> ids_;
  std::vector<double> coords_;
  std::unordered_map<PointId, std::size_t> index_;
};

}  // namespace onionlab
