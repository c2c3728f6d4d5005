#include "svcmd/bd_metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace svcmd {

namespace {

std::vector<double> abscissae(std::span<const RdPoint> points, FitAxis axis) {
  std::vector<double> xs;
  xs.reserve(points.size());
  for (const RdPoint& p : points) {
    if (!(p.rate > 0.0) || !std::isfinite(p.rate) || !std::isfinite(p.psnr)) {
      throw std::invalid_argument("RD points need finite PSNR and a positive finite rate");
    }
    xs.push_back(axis == FitAxis::PsnrOnLogRate ? std::log10(p.rate) : p.psnr);
  }
  return xs;
}

struct Interval {
  double lo;
  double hi;
};

Interval overlap(const std::vector<double>& a, const std::vector<double>& b) {
  const auto [a_lo, a_hi] = std::minmax_element(a.begin(), a.end());
  const auto [b_lo, b_hi] = std::minmax_element(b.begin(), b.end());
  const Interval iv{std::max(*a_lo, *b_lo), std::min(*a_hi, *b_hi)};
  if (!(iv.hi > iv.lo)) throw std::invalid_argument("RD curves do not overlap");
  return iv;
}

double mean_gap(std::span<const RdPoint> ref, std::span<const RdPoint> test, FitAxis axis) {
  const RdPoly pr = fit_rd_poly(ref, axis);
  const RdPoly pt = fit_rd_poly(test, axis);
  const Interval iv = overlap(abscissae(ref, axis), abscissae(test, axis));
  return (pt.integral(iv.lo, iv.hi) - pr.integral(iv.lo, iv.hi)) / (iv.hi - iv.lo);
}

}  // namespace

double RdPoly::operator()(double x) const {
  const double t = (x - center) / scale;
  return ((coeffs[3] * t + coeffs[2]) * t + coeffs[1]) * t + coeffs[0];
}

double RdPoly::integral(double a, double b) const {
  auto antiderivative = [this](double x) {
    const double t = (x - center) / scale;
    return scale * t * (coeffs[0] + t * (coeffs[1] / 2 + t * (coeffs[2] / 3 + t * coeffs[3] / 4)));
  };
  return antiderivative(b) - antiderivative(a);
}

RdPoly fit_rd_poly(std::span<const RdPoint> points, FitAxis axis) {
  if (points.size() < 4) throw std::invalid_argument("an RD curve needs at least 4 points");
  const std::vector<double> xs = abscissae(points, axis);
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("RD curve has duplicate abscissae");
  }

  RdPoly poly;
  poly.center = (sorted.front() + sorted.back()) / 2;
  poly.scale = (sorted.back() - sorted.front()) / 2;

  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd v(n, 4);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (xs[i] - poly.center) / poly.scale;
    v(i, 0) = 1.0;
    v(i, 1) = t;
    v(i, 2) = t * t;
    v(i, 3) = t * t * t;
    y(i) = axis == FitAxis::PsnrOnLogRate ? points[i].psnr : std::log10(points[i].rate);
  }
  const Eigen::VectorXd c = n == 4 ? Eigen::VectorXd(v.fullPivLu().solve(y)) : Eigen::VectorXd(v.colPivHouseholderQr().solve(y));
  for (int k = 0; k < 4; ++k) poly.coeffs[k] = c(k);
  return poly;
}

double bd_psnr(std::span<const RdPoint> ref, std::span<const RdPoint> test) {
  return mean_gap(ref, test, FitAxis::PsnrOnLogRate);
}

double bd_rate(std::span<const RdPoint> ref, std::span<const RdPoint> test) {
  return (std::pow(10.0, mean_gap(ref, test, FitAxis::LogRateOnPsnr)) - 1.0) * 100.0;
}

}  // namespace svcmd
