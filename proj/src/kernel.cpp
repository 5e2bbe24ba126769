#include "santalo/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "santalo/body.hpp"
#include "santalo/error.hpp"
#include "santalo/quadrature.hpp"
#include "santalo/rng.hpp"

namespace santalo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

RhoKernel RhoKernel::exp() {
  RhoKernel k;
  k.family_ = Family::Exp;
  k.name_ = "exp";
  k.strictly_convex_ = true;
  k.support_hint_ = 16.0 * std::log(10.0);
  return k;
}

RhoKernel RhoKernel::power(double m) {
  require(m > 0.0, ErrorCode::InvalidInput, "power kernel exponent must be positive");
  RhoKernel k;
  k.family_ = Family::Power;
  k.name_ = "power";
  k.m_ = m;
  k.support_hint_ = 1.0;
  k.zero_from_ = 1.0;
  return k;
}

RhoKernel RhoKernel::indicator() {
  RhoKernel k;
  k.family_ = Family::Indicator;
  k.name_ = "indicator";
  k.support_hint_ = 1.0;
  k.zero_from_ = 1.0;
  return k;
}

RhoKernel RhoKernel::piecewise(std::vector<double> knots, std::vector<double> log_values,
                               bool cutoff) {
  require(knots.size() >= 2 && knots.size() == log_values.size(), ErrorCode::InvalidInput,
          "piecewise kernel needs at least two knots with matching values");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    require(std::isfinite(knots[i]) && std::isfinite(log_values[i]), ErrorCode::InvalidInput,
            "piecewise kernel knots and log-values must be finite");
    if (i > 0) require(knots[i] > knots[i - 1], ErrorCode::InvalidInput, "knots must increase");
  }
  RhoKernel k;
  k.family_ = Family::Piecewise;
  k.name_ = "piecewise";
  k.knots_ = std::move(knots);
  k.logs_ = std::move(log_values);
  k.cutoff_ = cutoff;
  const std::size_t last = k.knots_.size() - 1;
  std::vector<double> slope(last);
  for (std::size_t i = 0; i < last; ++i) {
    slope[i] = (k.logs_[i + 1] - k.logs_[i]) / (k.knots_[i + 1] - k.knots_[i]);
  }
  k.log_concave_ = true;
  k.non_increasing_ = true;
  for (std::size_t i = 0; i < last; ++i) {
    if (i > 0 && slope[i] > slope[i - 1] + 1e-12) k.log_concave_ = false;
    if (slope[i] > 1e-15) k.non_increasing_ = false;
  }
  // rho(sqrt(st))^2 >= rho(s) rho(t) follows from log-concavity plus monotonicity
  k.gm_dominant_ = k.log_concave_ && k.non_increasing_;
  if (cutoff) {
    k.zero_from_ = k.knots_.back();
    k.support_hint_ = k.knots_.back();
  } else if (slope.back() < 0.0) {
    k.support_hint_ = k.knots_.back() + (k.logs_.back() + 16.0 * std::log(10.0)) / -slope.back();
  }
  k.strictly_convex_ = false;
  return k;
}

double RhoKernel::log(double t) const {
  switch (family_) {
    case Family::Exp:
      return -t;
    case Family::Power:
      return t < 1.0 ? m_ * std::log1p(-t) : -kInf;
    case Family::Indicator:
      return t <= 1.0 ? 0.0 : -kInf;
    case Family::Piecewise: {
      if (cutoff_ && t > knots_.back()) return -kInf;
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
      std::size_t i = static_cast<std::size_t>(it - knots_.begin());
      i = std::clamp<std::size_t>(i, 1, knots_.size() - 1) - 1;
      const double s = (logs_[i + 1] - logs_[i]) / (knots_[i + 1] - knots_[i]);
      return logs_[i] + s * (t - knots_[i]);
    }
  }
  return -kInf;
}

double RhoKernel::operator()(double t) const {
  if (family_ == Family::Power) return t < 1.0 ? std::pow(1.0 - t, m_) : 0.0;
  return std::exp(log(t));
}

double RhoKernel::derivative(double t) const {
  switch (family_) {
    case Family::Exp:
      return -std::exp(-t);
    case Family::Power:
      return t < 1.0 ? -m_ * std::pow(1.0 - t, m_ - 1.0) : 0.0;
    case Family::Indicator:
      return 0.0;
    case Family::Piecewise: {
      if (cutoff_ && t >= knots_.back()) return 0.0;
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
      std::size_t i = static_cast<std::size_t>(it - knots_.begin());
      i = std::clamp<std::size_t>(i, 1, knots_.size() - 1) - 1;
      const double s = (logs_[i + 1] - logs_[i]) / (knots_[i + 1] - knots_[i]);
      return s * (*this)(t);
    }
  }
  return 0.0;
}

std::vector<double> RhoKernel::breaks() const {
  switch (family_) {
    case Family::Power:
    case Family::Indicator:
      return {1.0};
    case Family::Piecewise:
      return knots_;
    case Family::Exp:
      break;
  }
  return {};
}

RhoKernel::FlagCheck RhoKernel::verify(std::uint64_t seed, std::size_t pairs) const {
  FlagCheck out;
  auto fail = [&](const char* what) {
    if (out.ok) {
      out.ok = false;
      out.failed = what;
    }
  };
  const double hi = std::isfinite(support_hint_) ? 1.5 * support_hint_ + 1.0 : 50.0;
  const double lo = -std::min(hi, 5.0);
  RngCursor rng(CounterRng(seed, 0x7268));
  for (std::size_t i = 0; i < pairs; ++i) {
    const double s = rng.uniform(lo, hi), t = rng.uniform(lo, hi);
    const double rs = (*this)(s), rt = (*this)(t);
    if (!(rs >= 0.0) || !(rt >= 0.0)) fail("non-negativity");
    const double rm = (*this)(0.5 * (s + t));
    if (log_concave_ && rm * rm < rs * rt * (1.0 - 1e-9)) fail("log_concave");
    const double a = std::min(s, t), b = std::max(s, t);
    if (non_increasing_ && (*this)(b) > (*this)(a) * (1.0 + 1e-9)) fail("non_increasing");
    if (gm_dominant_ && s >= 0.0 && t >= 0.0) {
      const double g = (*this)(std::sqrt(s * t));
      if (std::sqrt(rs * rt) > g * (1.0 + 1e-9)) fail("geometric_mean_dominant");
    }
    if (strictly_convex_ && rm > 0.5 * (rs + rt) + 1e-9 * (rs + rt)) fail("strictly_convex");
  }
  return out;
}

KernelConstant c_n_rho(const RhoKernel& rho, int n) {
  require(n >= 1, ErrorCode::InvalidInput, "dimension must be positive");
  auto integrand = [&](double r) { return std::pow(r, n - 1) * rho(r * r); };
  std::vector<double> pts{0.0};
  for (double b : rho.breaks()) {
    if (b > 0.0) pts.push_back(std::sqrt(b));
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  QuadOptions q;
  q.rel_tol = 1e-12;

  double total = 0.0;
  if (std::isfinite(rho.zero_from())) {
    if (pts.back() < std::sqrt(rho.zero_from())) pts.push_back(std::sqrt(rho.zero_from()));
    total = integrate_pieces(integrand, pts, q);
  } else {
    // doubling: the tail must shrink geometrically for a convergent kernel
    double r = std::max(pts.back(), std::isfinite(rho.support_hint()) ? std::sqrt(rho.support_hint()) : 1.0);
    pts.push_back(r);
    total = integrate_pieces(integrand, pts, q);
    for (int k = 0;; ++k) {
      const double piece = integrate(integrand, r, 2.0 * r, q);
      total += piece;
      r *= 2.0;
      if (piece <= 1e-14 * total) break;
      if (k > 40 || !std::isfinite(total)) {
        throw Error(ErrorCode::DivergentKernel, "integral of r^{n-1} rho(r^2) does not converge");
      }
    }
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorCode::DivergentKernel, "integral of r^{n-1} rho(r^2) is not positive and finite");
  }
  KernelConstant out;
  out.radial_integral = total;
  out.c_n = std::pow(total, 2.0 / n);
  out.full_integral = n * ball_volume(n) * total;
  return out;
}

}  // namespace santalo
