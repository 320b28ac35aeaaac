#include "qpplab/statlab.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "qpplab/diagnostics.hpp"
#include "qpplab/distributions.hpp"
#include "qpplab/error.hpp"

namespace qpplab {

namespace {

void require_pairs(std::span<const double> x, std::span<const double> y, std::size_t min_n, const char* what) {
  if (x.size() != y.size()) throw Error(ErrorKind::Dimension, std::string(what) + ": sequences differ in length");
  if (x.size() < min_n)
    throw Error(ErrorKind::SampleSize, std::string(what) + ": needs at least " + std::to_string(min_n) +
                                           " observations, got " + std::to_string(x.size()));
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

CorrelationResult finish(double coefficient, double p, std::size_t n) {
  p = std::clamp(p, 0.0, 1.0);
  return CorrelationResult{coefficient, p, n, significance_marker(p)};
}

double pearson_p(double r, std::size_t n) {
  if (std::abs(r) >= 1.0) return 0.0;
  const double df = static_cast<double>(n) - 2.0;
  return dist::student_t_two_tailed(r * std::sqrt(df / (1.0 - r * r)), df);
}

// Sum over runs of equal values in a sorted sequence.
template <typename Fn>
void for_each_tie_run(const std::vector<double>& sorted, Fn&& fn) {
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (j - i > 1) fn(static_cast<double>(j - i));
    i = j;
  }
}

// Merge sort on v counting exchanges (pairs out of order).
std::uint64_t sort_counting_exchanges(std::vector<double>& v, std::vector<double>& buffer, std::size_t lo,
                                      std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t swaps = sort_counting_exchanges(v, buffer, lo, mid) + sort_counting_exchanges(v, buffer, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += mid - i;
      buffer[k++] = v[j++];
    } else {
      buffer[k++] = v[i++];
    }
  }
  while (i < mid) buffer[k++] = v[i++];
  while (j < hi) buffer[k++] = v[j++];
  std::copy(buffer.begin() + static_cast<std::ptrdiff_t>(lo), buffer.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

Marker significance_marker(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::Config, "p-value outside [0,1]");
  if (p < 0.01) return Marker::DoubleDagger;
  if (p < 0.05) return Marker::Dagger;
  return Marker::None;
}

std::string marker_symbol(Marker marker) {
  switch (marker) {
    case Marker::DoubleDagger: return "‡";
    case Marker::Dagger: return "†";
    case Marker::None: return "";
  }
  return "";
}

std::string marker_name(Marker marker) {
  switch (marker) {
    case Marker::DoubleDagger: return "ddagger";
    case Marker::Dagger: return "dagger";
    case Marker::None: return "none";
  }
  return "none";
}

Marker parse_marker(std::string_view name) {
  if (name == "ddagger") return Marker::DoubleDagger;
  if (name == "dagger") return Marker::Dagger;
  if (name == "none") return Marker::None;
  throw Error(ErrorKind::Parse, "unknown marker '" + std::string(name) + "'");
}

std::string to_string(Coefficient c) { return c == Coefficient::Pearson ? "pearson" : "kendall"; }

Coefficient parse_coefficient(std::string_view text) {
  std::string lower(text);
  for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lower == "pearson" || lower == "r") return Coefficient::Pearson;
  if (lower == "kendall" || lower == "tau") return Coefficient::Kendall;
  throw Error(ErrorKind::Config, "unknown coefficient '" + std::string(text) + "'");
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
  require_pairs(x, y, 3, "pearson");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::Undefined, "pearson: constant input");
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return finish(r, pearson_p(r, x.size()), x.size());
}

CorrelationResult kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  require_pairs(x, y, 3, "kendall");
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }

  // Pairs tied in x, and pairs tied in both.
  double tied_x = 0.0, tied_xy = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && xs[j] == xs[i]) ++j;
    const double t = static_cast<double>(j - i);
    tied_x += t * (t - 1.0) / 2.0;
    for (std::size_t a = i; a < j;) {
      std::size_t b = a + 1;
      while (b < j && ys[b] == ys[a]) ++b;
      const double u = static_cast<double>(b - a);
      tied_xy += u * (u - 1.0) / 2.0;
      a = b;
    }
    i = j;
  }

  std::vector<double> buffer(n);
  const double exchanges = static_cast<double>(sort_counting_exchanges(ys, buffer, 0, n));

  double tied_y = 0.0;
  for_each_tie_run(ys, [&](double u) { tied_y += u * (u - 1.0) / 2.0; });

  const double nd = static_cast<double>(n);
  const double pairs = nd * (nd - 1.0) / 2.0;
  // Among pairs untied in x (ordered by x), exchanges are the discordant ones.
  const double s = pairs - tied_x - tied_y + tied_xy - 2.0 * exchanges;
  const double denom = (pairs - tied_x) * (pairs - tied_y);
  if (denom <= 0.0) throw Error(ErrorKind::Undefined, "kendall: a sequence is entirely tied");
  const double tau = std::clamp(s / std::sqrt(denom), -1.0, 1.0);

  std::vector<double> xsorted(xs);  // already sorted by x
  double vt = 0.0, vu = 0.0, t1 = 0.0, u1 = 0.0, t2 = 0.0, u2 = 0.0;
  for_each_tie_run(xsorted, [&](double t) {
    vt += t * (t - 1.0) * (2.0 * t + 5.0);
    t1 += t * (t - 1.0);
    t2 += t * (t - 1.0) * (t - 2.0);
  });
  for_each_tie_run(ys, [&](double u) {
    vu += u * (u - 1.0) * (2.0 * u + 5.0);
    u1 += u * (u - 1.0);
    u2 += u * (u - 1.0) * (u - 2.0);
  });
  const double v0 = nd * (nd - 1.0) * (2.0 * nd + 5.0);
  const double variance = (v0 - vt - vu) / 18.0 + t1 * u1 / (2.0 * nd * (nd - 1.0)) +
                          t2 * u2 / (9.0 * nd * (nd - 1.0) * (nd - 2.0));
  const double p = variance > 0.0 ? dist::normal_two_tailed(s / std::sqrt(variance)) : 1.0;
  return finish(tau, p, n);
}

CorrelationResult correlate(Coefficient c, std::span<const double> x, std::span<const double> y) {
  return c == Coefficient::Pearson ? pearson(x, y) : kendall_tau_b(x, y);
}

CorrelationResult correlation_at(Coefficient c, double coefficient, std::size_t n) {
  if (n < 3) throw Error(ErrorKind::SampleSize, "significance needs n >= 3");
  coefficient = std::clamp(coefficient, -1.0, 1.0);
  if (c == Coefficient::Pearson) return finish(coefficient, pearson_p(coefficient, n), n);
  const double nd = static_cast<double>(n);
  const double z = 3.0 * coefficient * std::sqrt(nd * (nd - 1.0)) / std::sqrt(2.0 * (2.0 * nd + 5.0));
  return finish(coefficient, dist::normal_two_tailed(z), n);
}

AnovaTable anova_one_way(const std::map<std::string, std::vector<double>>& groups, const std::string& factor_name) {
  if (groups.size() < 2) throw Error(ErrorKind::SampleSize, "ANOVA needs at least two groups");
  std::size_t total = 0;
  double grand_sum = 0.0;
  for (const auto& [label, values] : groups) {
    if (values.empty()) throw Error(ErrorKind::SampleSize, "ANOVA group '" + label + "' is empty");
    total += values.size();
    grand_sum += std::accumulate(values.begin(), values.end(), 0.0);
  }
  if (total <= groups.size()) throw Error(ErrorKind::SampleSize, "ANOVA needs more observations than groups");
  const double grand_mean = grand_sum / static_cast<double>(total);

  double ss_between = 0.0, ss_within = 0.0;
  for (const auto& [label, values] : groups) {
    const double m = mean(values);
    ss_between += static_cast<double>(values.size()) * (m - grand_mean) * (m - grand_mean);
    for (double v : values) ss_within += (v - m) * (v - m);
  }

  AnovaTable table;
  table.factor = {factor_name, static_cast<int>(groups.size() - 1), ss_between, 0.0};
  table.residuals = {"Residuals", static_cast<int>(total - groups.size()), ss_within, 0.0};
  table.factor.mean_sq = ss_between / table.factor.df;
  table.residuals.mean_sq = ss_within / table.residuals.df;
  if (table.residuals.mean_sq == 0.0) throw Error(ErrorKind::Undefined, "ANOVA: no within-group variation");
  table.f_value = table.factor.mean_sq / table.residuals.mean_sq;
  table.p_value = dist::f_survival(table.f_value, table.factor.df, table.residuals.df);
  return table;
}

ErrorReport regression_errors(std::span<const double> predicted, std::span<const double> actual) {
  require_pairs(predicted, actual, 2, "regression errors");
  const std::size_t n = actual.size();
  std::vector<double> abs_err(n);
  double sum_abs = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = actual[i] - predicted[i];
    abs_err[i] = std::abs(e);
    sum_abs += abs_err[i];
    sum_sq += e * e;
  }
  ErrorReport report;
  report.mae = sum_abs / static_cast<double>(n);
  report.rmse = std::sqrt(sum_sq / static_cast<double>(n));
  std::sort(abs_err.begin(), abs_err.end());
  report.medae = n % 2 == 1 ? abs_err[n / 2] : (abs_err[n / 2 - 1] + abs_err[n / 2]) / 2.0;

  const double m = mean(actual);
  double ss_tot = 0.0;
  for (double a : actual) ss_tot += (a - m) * (a - m);
  if (ss_tot == 0.0)
    warn("R-squared undefined: actual values are constant");
  else
    report.r_squared = 1.0 - sum_sq / ss_tot;
  return report;
}

PairedTResult paired_t(std::span<const double> a, std::span<const double> b, int comparisons) {
  require_pairs(a, b, 2, "paired t-test");
  if (comparisons < 1) throw Error(ErrorKind::Config, "Bonferroni family size must be >= 1");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double md = mean(d);
  double ss = 0.0;
  for (double v : d) ss += (v - md) * (v - md);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  PairedTResult result;
  result.df = static_cast<int>(n - 1);
  if (sd == 0.0) {
    if (md == 0.0) throw Error(ErrorKind::Undefined, "paired t-test: identical samples");
    result.t = md > 0 ? INFINITY : -INFINITY;
    result.p_value = 0.0;
  } else {
    result.t = md / (sd / std::sqrt(static_cast<double>(n)));
    result.p_value = std::min(1.0, dist::student_t_two_tailed(result.t, result.df) * comparisons);
  }
  result.marker = significance_marker(result.p_value);
  return result;
}

}  // namespace qpplab
