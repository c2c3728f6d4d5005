#pragma once

#include <array>
#include <span>
#include <vector>

namespace svcmd {

struct RdPoint {
  double rate = 0.0;  // kbps
  double psnr = 0.0;  // dB
};

enum class FitAxis { PsnrOnLogRate, LogRateOnPsnr };

/// Cubic in the normalized abscissa t = (x - center) / scale.
struct RdPoly {
  double center = 0.0;
  double scale = 1.0;
  std::array<double, 4> coeffs{};  // c0 + c1 t + c2 t^2 + c3 t^3

  double operator()(double x) const;
  /// Exact integral over [a, b] in the original abscissa.
  double integral(double a, double b) const;
};

// Needs at least 4 points with positive rates and distinct abscissae. Four
// points are interpolated exactly, more are fitted in the least-squares sense.
// The abscissa is log10(rate) for PsnrOnLogRate and psnr for LogRateOnPsnr.
RdPoly fit_rd_poly(std::span<const RdPoint> points, FitAxis axis);

// Mean PSNR gap (test - ref) over the shared log-rate interval, in dB.
double bd_psnr(std::span<const RdPoint> ref, std::span<const RdPoint> test);

// Mean rate gap over the shared PSNR interval, in percent; negative means the
// test curve needs fewer bits.
double bd_rate(std::span<const RdPoint> ref, std::span<const RdPoint> test);

}  // namespace svcmd
