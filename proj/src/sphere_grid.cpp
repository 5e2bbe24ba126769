#include "santalo/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "santalo/error.hpp"

namespace santalo {

int default_grid_size(int dim) {
  switch (dim) {
    case 1: return 2;
    case 2: return 4096;
    case 3: return 8192;
    case 4: return 32768;
    default: return 65536;
  }
}

std::shared_ptr<const SphereGrid> SphereGrid::make(int dim, int size) {
  require(dim >= 1, ErrorCode::InvalidInput, "sphere grid dimension must be >= 1");
  if (size <= 0 || dim == 1) size = dim == 1 ? 2 : default_grid_size(dim);
  require(size % 2 == 0 && (size >= 4 || dim == 1), ErrorCode::InvalidInput,
          "sphere grid size must be even and >= 4");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const SphereGrid>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{dim, size}];
  if (!slot) slot = std::shared_ptr<const SphereGrid>(new SphereGrid(dim, size));
  return slot;
}

namespace {

// Kronecker (R_d) sequence generator: phi_d is the unique positive root of x^{d+1} = x + 1.
std::vector<double> kronecker_alphas(int d) {
  double g = 2.0;
  for (int i = 0; i < 64; ++i) g = std::pow(1.0 + g, 1.0 / (d + 1));
  std::vector<double> a(d);
  for (int j = 0; j < d; ++j) a[j] = std::fmod(std::pow(1.0 / g, j + 1), 1.0);
  return a;
}

}  // namespace

SphereGrid::SphereGrid(int dim, int size) : dim_(dim), nodes_(dim, size) {
  if (dim == 1) {
    nodes_(0, 0) = 1.0;
    nodes_(0, 1) = -1.0;
    return;
  }
  const int half = size / 2;
  if (dim == 2) {
    for (int k = 0; k < size; ++k) {
      const double t = 2.0 * std::numbers::pi * k / size;
      nodes_(0, k) = std::cos(t);
      nodes_(1, k) = std::sin(t);
    }
    // Exact antipodes for k and k + half.
    for (int k = 0; k < half; ++k) nodes_.col(k + half) = -nodes_.col(k);
    return;
  }
  if (dim == 3) {
    // Fibonacci lattice on the upper hemisphere (area-uniform in z).
    const double golden = std::numbers::phi;
    for (int i = 0; i < half; ++i) {
      const double z = 1.0 - (i + 0.5) / half;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = 2.0 * std::numbers::pi * std::fmod(i / golden, 1.0);
      nodes_(0, i) = rho * std::cos(a);
      nodes_(1, i) = rho * std::sin(a);
      nodes_(2, i) = z;
    }
  } else {
    const auto alpha = kronecker_alphas(dim);
    for (int i = 0; i < half; ++i) {
      Vector g(dim);
      for (int j = 0; j < dim; ++j) {
        const double u = std::fmod(0.5 + alpha[j] * (i + 1), 1.0);
        g(j) = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
      }
      g.normalize();
      if (g(dim - 1) < 0) g = -g;
      nodes_.col(i) = g;
    }
  }
  for (int i = 0; i < half; ++i) nodes_.col(i + half) = -nodes_.col(i);
  build_tree();
}

std::size_t SphereGrid::antipode(std::size_t i) const {
  const std::size_t n = size();
  return (i + n / 2) % n;
}

Stencil SphereGrid::locate(const Vector& unit) const {
  Stencil s;
  if (dim_ == 1) {
    s.index[0] = unit(0) >= 0 ? 0 : 1;
    return s;
  }
  if (dim_ == 2) {
    const double n = static_cast<double>(size());
    double t = std::atan2(unit(1), unit(0)) / (2.0 * std::numbers::pi) * n;
    if (t < 0) t += n;
    const double fl = std::floor(t);
    const double frac = t - fl;
    const auto k = static_cast<std::size_t>(fl) % size();
    s.count = 2;
    s.index[0] = k;
    s.index[1] = (k + 1) % size();
    s.weight[0] = 1.0 - frac;
    s.weight[1] = frac;
    return s;
  }
  s.index[0] = nearest(unit, 1).front();
  return s;
}

int SphereGrid::build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi, int depth) {
  if (lo >= hi) return -1;
  const int axis = depth % dim_;
  const std::size_t mid = (lo + hi) / 2;
  std::nth_element(idx.begin() + lo, idx.begin() + mid, idx.begin() + hi,
                   [&](std::size_t a, std::size_t b) {
                     return nodes_(axis, static_cast<Eigen::Index>(a)) <
                            nodes_(axis, static_cast<Eigen::Index>(b));
                   });
  const int id = static_cast<int>(tree_.size());
  tree_.push_back({idx[mid], axis});
  const int l = build(idx, lo, mid, depth + 1);
  const int r = build(idx, mid + 1, hi, depth + 1);
  tree_[id].left = l;
  tree_[id].right = r;
  return id;
}

void SphereGrid::build_tree() {
  std::vector<std::size_t> idx(size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  tree_.reserve(size());
  root_ = build(idx, 0, idx.size(), 0);
}

void SphereGrid::search(int id, const Vector& q, std::size_t k,
                        std::vector<std::pair<double, std::size_t>>& best) const {
  if (id < 0) return;
  const KdNode& nd = tree_[id];
  const auto p = static_cast<Eigen::Index>(nd.point);
  const double d2 = (nodes_.col(p) - q).squaredNorm();
  if (best.size() < k || d2 < best.back().first) {
    best.emplace_back(d2, nd.point);
    std::sort(best.begin(), best.end());
    if (best.size() > k) best.pop_back();
  }
  const double diff = q(nd.axis) - nodes_(nd.axis, p);
  const int near = diff < 0 ? nd.left : nd.right;
  const int far = diff < 0 ? nd.right : nd.left;
  search(near, q, k, best);
  if (best.size() < k || diff * diff < best.back().first) search(far, q, k, best);
}

std::vector<std::size_t> SphereGrid::nearest(const Vector& unit, std::size_t k) const {
  k = std::min(k, size());
  std::vector<std::pair<double, std::size_t>> best;
  best.reserve(k + 1);
  if (dim_ <= 2) {
    for (std::size_t i = 0; i < size(); ++i) {
      best.emplace_back((nodes_.col(static_cast<Eigen::Index>(i)) - unit).squaredNorm(), i);
    }
    std::partial_sort(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(k), best.end());
    best.resize(k);
  } else {
    search(root_, unit, k, best);
  }
  std::vector<std::size_t> out;
  out.reserve(k);
  for (const auto& [d, i] : best) out.push_back(i);
  return out;
}

}  // namespace santalo
