#include "surflab/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace surflab {

double mean(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v;
  return x.empty() ? 0 : s / x.size();
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0;
  double m = mean(x), s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return s / (x.size() - 1);
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) return 0;
  std::sort(x.begin(), x.end());
  double pos = q * (x.size() - 1);
  size_t i = std::min(x.size() - 1, static_cast<size_t>(pos));
  size_t j = std::min(x.size() - 1, i + 1);
  double frac = pos - i;
  return x[i] * (1 - frac) + x[j] * frac;
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

LinFit lin_fit(const std::vector<double>& x, const std::vector<double>& y) {
  LinFit fit;
  size_t n = x.size();
  if (n < 2 || y.size() != n) return fit;
  double mx = mean(x), my = mean(y), sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; i++) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0;
  for (size_t i = 0; i < n; i++) {
    double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
  }
  fit.r2 = syy > 0 ? 1 - rss / syy : 1.0;
  if (n > 2) fit.slope_se = std::sqrt(rss / (n - 2) / sxx);
  return fit;
}

double integrated_autocorrelation(const std::vector<double>& series) {
  long n = (long)series.size();
  if (n < 4) return 1.0;
  double m = mean(series);
  auto gamma = [&](long lag) {
    double s = 0;
    for (long i = 0; i + lag < n; i++) s += (series[i] - m) * (series[i + lag] - m);
    return s / n;
  };
  double g0 = gamma(0);
  if (g0 <= 0) return 1.0;
  double tau = -1.0, prev = std::numeric_limits<double>::infinity();
  for (long p = 0; 2 * p + 1 < n && p < 10000; p++) {
    double G = gamma(2 * p) + gamma(2 * p + 1);
    if (G <= 0) break;
    G = std::min(G, prev);
    tau += 2 * G / g0;
    prev = G;
  }
  return std::max(1.0, tau);
}

namespace {

// order statistics with survival level in [min_exceed/n, smax]
struct TailWindow {
  std::vector<double> t, lt, y, w;  // threshold, log, -log survival, weight
};

TailWindow tail_window(const std::vector<double>& samples, double smax, int min_exceed) {
  long n = (long)samples.size();
  long kmax = (long)(smax * n), kmin = min_exceed;
  if (kmax < kmin + 10)
    throw InsufficientExceedances("tail window needs more samples");
  std::vector<double> xs(samples.size());
  for (size_t i = 0; i < samples.size(); i++) xs[i] = std::fabs(samples[i]);
  std::sort(xs.begin(), xs.end());
  TailWindow win;
  for (long k = kmin; k <= kmax; k++) {
    double t = xs[n - k - 1], s = double(k) / n;
    if (t <= 0) continue;
    win.t.push_back(t);
    win.lt.push_back(std::log(t));
    win.y.push_back(-std::log(s));
    win.w.push_back(1 / (1 - s));
  }
  if ((long)win.t.size() < 10)
    throw InsufficientExceedances("tail window collapsed (too many zeros)");
  return win;
}

double weighted_rss(const TailWindow& w, const std::vector<double>& fitted) {
  double s = 0;
  for (size_t i = 0; i < w.y.size(); i++) {
    double r = w.y[i] - fitted[i];
    s += w.w[i] * r * r;
  }
  return s;
}

// weighted LS of y on {1, log t}: returns (intercept, slope, rss)
std::tuple<double, double, double> power_window_fit(const TailWindow& win) {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
  for (size_t i = 0; i < win.y.size(); i++) {
    Eigen::Vector2d x(1.0, win.lt[i]);
    A += win.w[i] * x * x.transpose();
    b += win.w[i] * win.y[i] * x;
  }
  Eigen::Vector2d c = A.fullPivLu().solve(b);
  std::vector<double> fitted(win.y.size());
  for (size_t i = 0; i < win.y.size(); i++) fitted[i] = c[0] + c[1] * win.lt[i];
  return {c[0], c[1], weighted_rss(win, fitted)};
}

}  // namespace

PowerTailFit fit_power_tail(const std::vector<double>& samples, double top_fraction) {
  long n = (long)samples.size();
  long k = (long)(top_fraction * n);
  if (k < 100) throw InsufficientExceedances("fit_power_tail: fewer than 100 exceedances");
  std::vector<double> xs(samples.size());
  for (size_t i = 0; i < samples.size(); i++) xs[i] = std::fabs(samples[i]);
  std::sort(xs.begin(), xs.end());
  double u = xs[n - k - 1];
  if (u <= 0) throw InsufficientExceedances("fit_power_tail: nonpositive threshold");
  double hill = 0;
  for (long i = n - k; i < n; i++) hill += std::log(xs[i] / u);
  PowerTailFit fit;
  fit.k_used = (int)k;
  fit.exponent = k / hill;

  TailWindow win;
  for (long j = 1; j <= k; j++) {
    double t = xs[n - j - 1], s = double(j) / n;
    if (t <= 0) continue;
    win.t.push_back(t);
    win.lt.push_back(std::log(t));
    win.y.push_back(-std::log(s));
    win.w.push_back(1 / (1 - s));
  }
  auto [a, c, rss] = power_window_fit(win);
  (void)a;
  fit.loglog_slope = -c;  // slope of log S, not -log S
  fit.rss = rss;
  return fit;
}

StretchedTailFit fit_stretched_tail(const std::vector<double>& samples, double smax,
                                    int min_exceed) {
  TailWindow win = tail_window(samples, smax, min_exceed);
  size_t np = win.y.size();
  StretchedTailFit best;
  double best_sse = std::numeric_limits<double>::infinity();
  std::vector<double> tb(np), fitted(np);
  for (int gi = 0;; gi++) {
    double beta = 0.10 + 0.0025 * gi;
    if (beta > 4.0 + 1e-9) break;
    for (size_t i = 0; i < np; i++) tb[i] = std::exp(beta * win.lt[i]);

    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (size_t i = 0; i < np; i++) {
      Eigen::Vector3d x(1.0, tb[i], win.lt[i]);
      A += win.w[i] * x * x.transpose();
      rhs += win.w[i] * win.y[i] * x;
    }
    Eigen::Vector3d coef = A.fullPivLu().solve(rhs);
    double a = coef[0], b = coef[1], c = coef[2];
    double clo = -0.5, chi = std::max(0.0, beta - 1.0) + 0.5;
    if (c < clo || c > chi) {
      c = std::min(std::max(c, clo), chi);
      Eigen::Matrix2d A2 = Eigen::Matrix2d::Zero();
      Eigen::Vector2d r2 = Eigen::Vector2d::Zero();
      for (size_t i = 0; i < np; i++) {
        Eigen::Vector2d x(1.0, tb[i]);
        A2 += win.w[i] * x * x.transpose();
        r2 += win.w[i] * (win.y[i] - c * win.lt[i]) * x;
      }
      Eigen::Vector2d c2 = A2.fullPivLu().solve(r2);
      a = c2[0];
      b = c2[1];
    }
    if (b <= 0) continue;
    for (size_t i = 0; i < np; i++) fitted[i] = a + b * tb[i] + c * win.lt[i];
    double sse = weighted_rss(win, fitted);
    if (sse < best_sse) {
      best_sse = sse;
      best.beta = beta;
      best.c = c;
      best.scale = b;
      best.intercept = a;
      best.rss = sse;
      best.points = (int)np;
    }
  }
  if (best.points == 0) throw std::runtime_error("fit_stretched_tail: no admissible fit");
  return best;
}

TailSelection classify_tail(const std::vector<double>& samples, double smax,
                            int min_exceed) {
  TailSelection sel;
  sel.stretched = fit_stretched_tail(samples, smax, min_exceed);
  sel.power = fit_power_tail(samples);
  // compare both on the classification window
  TailWindow win = tail_window(samples, smax, min_exceed);
  auto [a, c, rss_pow] = power_window_fit(win);
  (void)a;
  (void)c;
  sel.power.rss = rss_pow;
  // with beta large the clamp lets the log term act as a pure power law while
  // scale -> 0; such degenerate fits must not vote for a stretched tail, so a
  // stretched win also needs its t^beta term to carry real weight
  double span = sel.stretched.scale *
                (std::exp(sel.stretched.beta * win.lt.front()) -
                 std::exp(sel.stretched.beta * win.lt.back()));
  double yspan = win.y.front() - win.y.back();
  bool real_term = span > 0.1 * yspan;
  sel.kind = (sel.stretched.rss < rss_pow && real_term) ? TailKind::Stretched
                                                        : TailKind::Power;
  return sel;
}

MaxScalingReport max_scaling(const std::vector<long>& sizes,
                             const std::vector<std::vector<double>>& maxima,
                             const std::function<double(double)>& norm) {
  if (sizes.size() != maxima.size() || sizes.empty())
    throw std::invalid_argument("max_scaling: sizes/maxima mismatch");
  MaxScalingReport rep;
  rep.sizes = sizes;
  std::vector<double> logn;
  for (size_t i = 0; i < sizes.size(); i++) {
    rep.medians.push_back(median(maxima[i]));
    double nv = norm((double)sizes[i]);
    if (!(nv > 0)) throw std::invalid_argument("max_scaling: norm must be positive");
    rep.normalized.push_back(rep.medians.back() / nv);
    logn.push_back(std::log((double)sizes[i]));
  }
  auto [lo, hi] = std::minmax_element(rep.normalized.begin(), rep.normalized.end());
  rep.ratio = *lo > 0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  rep.drift_slope = sizes.size() >= 2 ? lin_fit(logn, rep.normalized).slope : 0.0;
  return rep;
}

}  // namespace surflab
