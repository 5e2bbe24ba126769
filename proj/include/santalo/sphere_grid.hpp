#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace santalo {

using Vector = Eigen::VectorXd;

/// Default node count for the sphere grid in dimension n.
int default_grid_size(int dim);

/// Interpolation stencil: radial(u) ~= sum weight_k * radial[index_k].
struct Stencil {
  std::size_t index[2] = {0, 0};
  double weight[2] = {1.0, 0.0};
  int count = 1;
};

/// Equal-weight, antipodally symmetric quadrature nodes on S^{n-1}.
///
/// n = 1 uses {+1, -1}; n = 2 a uniform angular grid; n >= 3 a deterministic
/// low-discrepancy set on one hemisphere plus its antipodes. Node i and
/// node antipode(i) are exact negatives of each other.
class SphereGrid {
 public:
  /// Cached construction; grids are immutable and shared between bodies.
  static std::shared_ptr<const SphereGrid> make(int dim, int size = 0);

  int dim() const { return dim_; }
  std::size_t size() const { return static_cast<std::size_t>(nodes_.cols()); }
  const Eigen::MatrixXd& nodes() const { return nodes_; }
  auto node(std::size_t i) const { return nodes_.col(static_cast<Eigen::Index>(i)); }
  double weight() const { return 1.0 / static_cast<double>(size()); }
  std::size_t antipode(std::size_t i) const;

  /// Stencil for a unit direction: linear in angle (n = 2), nearest node otherwise.
  Stencil locate(const Vector& unit) const;

  /// Indices of the k nodes closest to a unit direction, closest first.
  std::vector<std::size_t> nearest(const Vector& unit, std::size_t k) const;

 private:
  SphereGrid(int dim, int size);
  void build_tree();
  void search(int node, const Vector& q, std::size_t k,
              std::vector<std::pair<double, std::size_t>>& best) const;

  struct KdNode {
    std::size_t point;
    int axis;
    int left = -1;
    int right = -1;
  };
  int build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi, int depth);

  int dim_;
  Eigen::MatrixXd nodes_;
  std::vector<KdNode> tree_;
  int root_ = -1;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

}  // namespace santalo
