#include "onionlab/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "onionlab/error.hpp"

namespace onionlab {

PointCloud::PointCloud(int dim) : dim_(dim) {
  if (dim < 1) throw InvalidInput("PointCloud: dimension must be >= 1");
}

PointCloud::PointCloud(int dim, std::vector<PointId> ids, std::vector<double> coords)
    : dim_(dim), ids_(std::move(ids)), coords_(std::move(coords)) {
  if (dim < 1) throw InvalidInput("PointCloud: dimension must be >= 1");
  if (coords_.size() != ids_.size() * static_cast<std::size_t>(dim_)) {
    throw InvalidInput("PointCloud: coordinate count does not match ids * dim");
  }
  validate();
}

void PointCloud::validate() {
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw InvalidInput("PointCloud: duplicate id " + std::to_string(ids_[i]));
    }
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw InvalidInput("PointCloud: non-finite coordinate");
  }
  std::vector<std::size_t> order(ids_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    auto pa = point(a), pb = point(b);
    return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    auto pa = point(order[i - 1]), pb = point(order[i]);
    if (std::equal(pa.begin(), pa.end(), pb.begin())) {
      throw InvalidInput("PointCloud: points " + std::to_string(ids_[order[i - 1]]) + " and " +
                         std::to_string(ids_[order[i]]) + " share coordinates");
    }
  }
}

std::optional<std::size_t> PointCloud::index_of(PointId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t PointCloud::index_or_throw(PointId id) const {
  auto idx = index_of(id);
  if (!idx) throw UnknownId("unknown point id " + std::to_string(id));
  return *idx;
}

PointId PointCloud::max_id() const {
  if (ids_.empty()) return -1;
  return *std::max_element(ids_.begin(), ids_.end());
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
  std::vector<PointId> ids;
  std::vector<double> coords;
  ids.reserve(indices.size());
  coords.reserve(indices.size() * static_cast<std::size_t>(dim_));
  for (std::size_t i : indices) {
    ids.push_back(ids_[i]);
    auto p = point(i);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return PointCloud(dim_, std::move(ids), std::move(coords));
}

PointCloud PointCloud::with_point(PointId id, std::span<const double> x) const {
  if (x.size() != static_cast<std::size_t>(dim_)) {
    throw InvalidInput("PointCloud::with_point: dimension mismatch");
  }
  std::vector<PointId> ids = ids_;
  std::vector<double> coords = coords_;
  ids.push_back(id);
  coords.insert(coords.end(), x.begin(), x.end());
  return PointCloud(dim_, std::move(ids), std::move(coords));
}

}  // namespace onionlab
