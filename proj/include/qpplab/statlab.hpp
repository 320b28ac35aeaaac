#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qpplab {

enum class Marker { None, Dagger, DoubleDagger };

/// DoubleDagger when p < 0.01, Dagger when p < 0.05, None otherwise.
Marker significance_marker(double p);
/// "‡", "†" or "".
std::string marker_symbol(Marker marker);
/// "ddagger", "dagger" or "none" (the machine-readable spelling).
std::string marker_name(Marker marker);
Marker parse_marker(std::string_view name);

enum class Coefficient { Pearson, Kendall };
std::string to_string(Coefficient c);
Coefficient parse_coefficient(std::string_view text);

struct CorrelationResult {
  double coefficient = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  Marker marker = Marker::None;
};

/// Sample Pearson r with a two-tailed p from t = r·sqrt((n−2)/(1−r²)) on
/// n−2 degrees of freedom.
CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

/// Kendall tau-b, counted in O(n log n) by merge sort. The p-value uses the
/// normal approximation with the tie-corrected variance of C − D.
CorrelationResult kendall_tau_b(std::span<const double> x, std::span<const double> y);

CorrelationResult correlate(Coefficient c, std::span<const double> x, std::span<const double> y);

/// Significance of a coefficient obtained without its raw data (e.g. the
/// mean of two fold coefficients), judged at sample size n under the
/// tie-free null distribution of the given coefficient.
CorrelationResult correlation_at(Coefficient c, double coefficient, std::size_t n);

struct AnovaRow {
  std::string source;
  int df = 0;
  double sum_sq = 0.0;
  double mean_sq = 0.0;
};

struct AnovaTable {
  AnovaRow factor;
  AnovaRow residuals;
  double f_value = 0.0;
  double p_value = 1.0;
};

/// One-way ANOVA over labelled groups.
AnovaTable anova_one_way(const std::map<std::string, std::vector<double>>& groups,
                         const std::string& factor_name = "Factor");

struct ErrorReport {
  double mae = 0.0;
  double rmse = 0.0;
  double medae = 0.0;
  /// Empty when the actual values are constant (R² undefined).
  std::optional<double> r_squared;
};

ErrorReport regression_errors(std::span<const double> predicted, std::span<const double> actual);

struct PairedTResult {
  double t = 0.0;
  int df = 0;
  double p_value = 1.0;  // Bonferroni-adjusted, clamped to 1
  Marker marker = Marker::None;
};

/// Two-tailed paired t-test of a against b, p multiplied by `comparisons`.
PairedTResult paired_t(std::span<const double> a, std::span<const double> b, int comparisons = 1);

}  // namespace qpplab
