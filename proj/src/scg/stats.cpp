#include "scg/stats.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace scg {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

double variance_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("pearson: need two equal series");
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double rms(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return v.empty() ? 0.0 : std::sqrt(s / v.size());
}

FitResult least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("least_squares: need at least 2 sample times");
  const double mx = mean_of(x), my = mean_of(y);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares: degenerate abscissae");
  FitResult r;
  r.value = sxy / sxx;
  r.intercept = my - r.value * mx;
  double res = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (r.intercept + r.value * x[i]);
    res += e * e;
  }
  r.resid = std::sqrt(res);
  return r;
}

FitResult estimate_drift_rate(std::span<const double> times,
                              const std::vector<std::vector<double>>& paths) {
  if (times.size() < 2) throw std::invalid_argument("drift fit: need >= 2 sample times");
  if (paths.empty()) throw std::invalid_argument("drift fit: no paths");
  std::vector<double> slopes;
  slopes.reserve(paths.size());
  for (const auto& p : paths) slopes.push_back(least_squares(times, p).value);
  std::vector<double> mean(times.size(), 0.0);
  for (const auto& p : paths)
    for (size_t i = 0; i < mean.size(); ++i) mean[i] += p[i];
  for (double& v : mean) v /= paths.size();
  FitResult r = least_squares(times, mean);
  r.stderr_ = paths.size() > 1
                  ? std::sqrt(variance_of(slopes) / static_cast<double>(slopes.size()))
                  : 0.0;
  return r;
}

FitResult estimate_variance_growth(std::span<const double> times,
                                   const std::vector<std::vector<double>>& paths) {
  if (times.size() < 2) throw std::invalid_argument("variance fit: need >= 2 sample times");
  const int n = static_cast<int>(paths.size());
  if (n < 4) throw std::invalid_argument("variance fit: need >= 4 paths");
  auto var_curve = [&](int lo, int hi) {
    std::vector<double> var(times.size(), 0.0);
    std::vector<double> col(hi - lo);
    for (size_t t = 0; t < times.size(); ++t) {
      for (int p = lo; p < hi; ++p) col[p - lo] = paths[p][t];
      var[t] = variance_of(col);
    }
    return var;
  };
  FitResult r = least_squares(times, var_curve(0, n));
  const int groups = std::max(2, std::min(10, n / 10));
  std::vector<double> gslopes;
  for (int g = 0; g < groups; ++g) {
    const int lo = g * n / groups, hi = (g + 1) * n / groups;
    if (hi - lo >= 2) gslopes.push_back(least_squares(times, var_curve(lo, hi)).value);
  }
  r.stderr_ = std::sqrt(variance_of(gslopes) / static_cast<double>(gslopes.size()));
  return r;
}

FitResult fit_decay_rate(std::span<const double> times, std::span<const double> obs) {
  if (times.size() != obs.size() || times.size() < 2)
    throw std::invalid_argument("decay fit: need >= 2 sample times");
  const int sign0 = obs[0] > 0 ? 1 : (obs[0] < 0 ? -1 : 0);
  if (sign0 == 0) throw std::invalid_argument("decay fit: zero observable");
  std::vector<double> logv(obs.size());
  for (size_t i = 0; i < obs.size(); ++i) {
    const int s = obs[i] > 0 ? 1 : (obs[i] < 0 ? -1 : 0);
    if (s != sign0)
      throw std::invalid_argument(
          "decay fit: observable changes sign in the window; use a shorter window");
    logv[i] = std::log(std::abs(obs[i]));
  }
  return least_squares(times, logv);
}

CorrEstimate cross_correlation(const std::vector<std::vector<double>>& a,
                               const std::vector<std::vector<double>>& b, int lag) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("cross_correlation: mismatched ensembles");
  std::vector<double> da, db;
  for (size_t p = 0; p < a.size(); ++p) {
    const auto& pa = a[p];
    const auto& pb = b[p];
    const int n = static_cast<int>(pa.size()) - 1;
    for (int t = 0; t + lag < n && t < n; ++t) {
      da.push_back(pa[t + 1] - pa[t]);
      db.push_back(pb[t + lag + 1] - pb[t + lag]);
    }
  }
  CorrEstimate e;
  e.value = pearson(da, db);
  e.stderr_ = 1.0 / std::sqrt(static_cast<double>(da.size()));
  return e;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace scg
