#pragma once

// Brute-force reference implementations. They follow the textbook
// definitions directly and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

// `ranked` holds the grade of each retrieved document in rank order;
// `all_grades` holds the grade of every judged document of the query.
inline double ndcg(const std::vector<int>& ranked, const std::vector<int>& all_grades, int cutoff = -1) {
  const std::size_t depth = cutoff < 0 ? ranked.size() : std::min<std::size_t>(ranked.size(), cutoff);
  double dcg = 0.0;
  for (std::size_t i = 0; i < depth; ++i) dcg += ranked[i] / std::log2(static_cast<double>(i) + 2.0);
  std::vector<int> ideal = all_grades;
  std::sort(ideal.rbegin(), ideal.rend());
  const std::size_t ideal_depth = cutoff < 0 ? ideal.size() : std::min<std::size_t>(ideal.size(), cutoff);
  double idcg = 0.0;
  for (std::size_t i = 0; i < ideal_depth; ++i) idcg += ideal[i] / std::log2(static_cast<double>(i) + 2.0);
  return idcg > 0.0 ? dcg / idcg : 0.0;
}

inline double average_precision(const std::vector<int>& ranked, const std::vector<int>& all_grades) {
  const auto total = std::count_if(all_grades.begin(), all_grades.end(), [](int g) { return g > 0; });
  if (total == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i] <= 0) continue;
    int hits = 0;
    for (std::size_t j = 0; j <= i; ++j) hits += ranked[j] > 0;
    sum += static_cast<double>(hits) / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(total);
}

inline double precision_at(const std::vector<int>& ranked, int k) {
  int hits = 0;
  for (int i = 0; i < k && i < static_cast<int>(ranked.size()); ++i) hits += ranked[i] > 0;
  return static_cast<double>(hits) / k;
}

inline double mrr_at(const std::vector<int>& ranked, int k) {
  for (int i = 0; i < k && i < static_cast<int>(ranked.size()); ++i)
    if (ranked[i] > 0) return 1.0 / (i + 1);
  return 0.0;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// All n(n-1)/2 pairs enumerated.
inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0, discordant = 0, tied_x = 0, tied_y = 0, pairs = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      ++pairs;
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0) ++tied_x;
      if (dy == 0) ++tied_y;
      if (dx == 0 || dy == 0) continue;
      if ((dx > 0) == (dy > 0))
        ++concordant;
      else
        ++discordant;
    }
  return (concordant - discordant) / std::sqrt((pairs - tied_x) * (pairs - tied_y));
}

struct Anova {
  double ssb, ssw, f;
  int df_between, df_within;
};

inline Anova anova(const std::vector<std::vector<double>>& groups) {
  std::vector<double> all;
  for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
  const double grand = mean(all);
  double ssb = 0.0, ssw = 0.0;
  for (const auto& g : groups) {
    const double m = mean(g);
    ssb += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) ssw += (v - m) * (v - m);
  }
  const int dfb = static_cast<int>(groups.size()) - 1;
  const int dfw = static_cast<int>(all.size() - groups.size());
  return {ssb, ssw, (ssb / dfb) / (ssw / dfw), dfb, dfw};
}

struct Errors {
  double mae, rmse, medae, r2;
};

inline Errors regression_errors(const std::vector<double>& pred, const std::vector<double>& actual) {
  std::vector<double> abs_err;
  double sq = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    abs_err.push_back(std::fabs(pred[i] - actual[i]));
    sq += (pred[i] - actual[i]) * (pred[i] - actual[i]);
  }
  const double n = static_cast<double>(pred.size());
  std::sort(abs_err.begin(), abs_err.end());
  const std::size_t h = abs_err.size() / 2;
  const double med = abs_err.size() % 2 ? abs_err[h] : (abs_err[h - 1] + abs_err[h]) / 2.0;
  const double m = mean(actual);
  double tot = 0.0;
  for (double a : actual) tot += (a - m) * (a - m);
  return {mean(abs_err), std::sqrt(sq / n), med, 1.0 - sq / tot};
}

// Least squares with intercept for one or two features by Cramer's rule on
// the 2x2 or 3x3 normal equations. Returns {intercept, b1[, b2]}.
inline std::vector<double> ols(const std::vector<std::vector<double>>& cols, const std::vector<double>& y) {
  const std::size_t p = cols.size() + 1;
  auto col = [&](std::size_t j, std::size_t i) { return j == 0 ? 1.0 : cols[j - 1][i]; };
  std::vector<std::vector<double>> a(p, std::vector<double>(p, 0.0));
  std::vector<double> b(p, 0.0);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t r = 0; r < p; ++r) {
      b[r] += col(r, i) * y[i];
      for (std::size_t c = 0; c < p; ++c) a[r][c] += col(r, i) * col(c, i);
    }
  auto det = [p](const std::vector<std::vector<double>>& m) {
    if (p == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double d = det(a);
  std::vector<double> out(p);
  for (std::size_t k = 0; k < p; ++k) {
    auto m = a;
    for (std::size_t r = 0; r < p; ++r) m[r][k] = b[r];
    out[k] = det(m) / d;
  }
  return out;
}

}  // namespace oracle
