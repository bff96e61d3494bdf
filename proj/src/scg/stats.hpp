#pragma once

#include <functional>
#include <span>
#include <vector>

namespace scg {

struct FitResult {
  double value = 0.0;      // slope or rate
  double intercept = 0.0;
  double stderr_ = 0.0;
  double resid = 0.0;      // residual norm of the mean-curve fit
};

// slope/intercept least squares
FitResult least_squares(std::span<const double> x, std::span<const double> y);

// Least-squares slope of the ensemble mean vs time.  Drift fits use the
// ensemble mean (the quadratic-noise drifts are small against
// fluctuations); stderr comes from the path-to-path slope scatter.
FitResult estimate_drift_rate(std::span<const double> times,
                              const std::vector<std::vector<double>>& paths);

// Slope of Var[observable](t) vs t; stderr from group-split slopes.
FitResult estimate_variance_growth(std::span<const double> times,
                                   const std::vector<std::vector<double>>& paths);

// Slope of log|observable| vs t; the observable must keep one sign over the
// window, else we suggest a shorter window.
FitResult fit_decay_rate(std::span<const double> times, std::span<const double> obs);

struct CorrEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

// Pearson correlation of increments at the given lag, pooled over paths.
CorrEstimate cross_correlation(const std::vector<std::vector<double>>& a,
                               const std::vector<std::vector<double>>& b, int lag);

double mean_of(std::span<const double> v);
double variance_of(std::span<const double> v);  // sample variance (n-1)
double pearson(std::span<const double> a, std::span<const double> b);
double rms(std::span<const double> v);

// Runs fn(0..n-1) on up to `threads` workers; results must be written to
// per-index slots so the reduction order stays deterministic.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace scg
