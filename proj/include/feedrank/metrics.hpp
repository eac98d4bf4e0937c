#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace feedrank {

/// One position of an offered page, in presentation order.
struct OfferedEntry {
    std::string hyperlink;
    double score = 0.0;
};

using ChosenSet = std::set<std::string>;

/// Both halves of the C_D quotient, absent when nothing was chosen.
struct CdComponents {
    std::optional<double> mean_chosen_score;
    std::optional<double> max_mean_score;
    std::optional<double> rate;
};

CdComponents c_d_components(std::span<const OfferedEntry> offered, const ChosenSet& chosen);

/// Mean score of the chosen items over the mean of the N best offered scores,
/// N = |chosen|. Absent when nothing was chosen; 1 when both means are 0.
/// Throws InvalidInput if a chosen hyperlink was not offered.
std::optional<double> c_d_rate(std::span<const OfferedEntry> offered, const ChosenSet& chosen);

/// Fraction of the R chosen items found in the first R offered positions.
/// Throws EmptyChoice when nothing was chosen.
double r_precision(std::span<const OfferedEntry> offered, const ChosenSet& chosen);

/// Ordinary least-squares slope of value over index.
/// Needs at least two distinct indices, otherwise DegenerateSeries.
double trend_slope(std::span<const std::pair<double, double>> series);

struct DifferencePoint {
    std::size_t session = 0;  // 1-based
    std::optional<double> mean_diff;
    std::optional<double> stddev;  // sample (n - 1) form
};

/// Per-user, per-session metric values; absent where the metric was undefined.
using UserSeries = std::vector<std::vector<std::optional<double>>>;

/// For each session, mean and sample standard deviation over users of (a - b).
/// Users where either side is absent are left out of that session.
/// Throws ShapeMismatch when user or session counts differ.
std::vector<DifferencePoint> difference_series(const UserSeries& a, const UserSeries& b);

}  // namespace feedrank
