#include "feedrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_set>

#include "feedrank/errors.hpp"

namespace feedrank {

namespace {

void check_subset(std::span<const OfferedEntry> offered, const ChosenSet& chosen) {
    std::unordered_set<std::string_view> links;
    for (const auto& e : offered) {
        if (!links.insert(e.hyperlink).second) {
            throw InvalidInput("duplicate offered hyperlink " + e.hyperlink);
        }
    }
    for (const auto& c : chosen) {
        if (!links.contains(c)) throw InvalidInput("chosen item not offered: " + c);
    }
}

}  // namespace

std::optional<double> c_d_rate(std::span<const OfferedEntry> offered, const ChosenSet& chosen) {
    return c_d_components(offered, chosen).rate;
}

CdComponents c_d_components(std::span<const OfferedEntry> offered, const ChosenSet& chosen) {
    check_subset(offered, chosen);
    if (chosen.empty()) return {};

    std::vector<double> all;
    std::vector<double> picked;
    all.reserve(offered.size());
    for (const auto& e : offered) {
        if (!std::isfinite(e.score) || e.score < 0.0) throw InvalidInput("invalid offered score");
        all.push_back(e.score);
        if (chosen.contains(e.hyperlink)) picked.push_back(e.score);
    }
    // Both sides summed in descending order: the chosen scores are dominated
    // element-wise by the top-N scores, so the quotient never exceeds 1.
    std::sort(all.begin(), all.end(), std::greater<>());
    std::sort(picked.begin(), picked.end(), std::greater<>());
    const std::size_t n = picked.size();
    double chosen_sum = 0.0, best_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        chosen_sum += picked[i];
        best_sum += all[i];
    }
    const double nd = static_cast<double>(n);
    CdComponents out{chosen_sum / nd, best_sum / nd, 1.0};
    if (best_sum != 0.0) out.rate = *out.mean_chosen_score / *out.max_mean_score;
    return out;
}

double r_precision(std::span<const OfferedEntry> offered, const ChosenSet& chosen) {
    check_subset(offered, chosen);
    if (chosen.empty()) throw EmptyChoice();
    const std::size_t r = chosen.size();
    std::size_t hits = 0;
    for (std::size_t i = 0; i < r && i < offered.size(); ++i) {
        if (chosen.contains(offered[i].hyperlink)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(r);
}

double trend_slope(std::span<const std::pair<double, double>> series) {
    if (series.size() < 2) throw DegenerateSeries("trend needs at least two points");
    const double n = static_cast<double>(series.size());
    double mean_x = 0.0, mean_y = 0.0;
    for (const auto& [x, y] : series) {
        mean_x += x;
        mean_y += y;
    }
    mean_x /= n;
    mean_y /= n;
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [x, y] : series) {
        sxy += (x - mean_x) * (y - mean_y);
        sxx += (x - mean_x) * (x - mean_x);
    }
    if (sxx == 0.0) throw DegenerateSeries("trend needs two distinct indices");
    return sxy / sxx;
}

std::vector<DifferencePoint> difference_series(const UserSeries& a, const UserSeries& b) {
    if (a.size() != b.size()) throw ShapeMismatch("user counts differ");
    const std::size_t sessions = a.empty() ? 0 : a.front().size();
    for (std::size_t u = 0; u < a.size(); ++u) {
        if (a[u].size() != sessions || b[u].size() != sessions) {
            throw ShapeMismatch("session counts differ");
        }
    }
    std::vector<DifferencePoint> out;
    out.reserve(sessions);
    for (std::size_t s = 0; s < sessions; ++s) {
        std::vector<double> diffs;
        for (std::size_t u = 0; u < a.size(); ++u) {
            if (a[u][s] && b[u][s]) diffs.push_back(*a[u][s] - *b[u][s]);
        }
        DifferencePoint point{s + 1, std::nullopt, std::nullopt};
        if (!diffs.empty()) {
            double mean = 0.0;
            for (double d : diffs) mean += d;
            mean /= static_cast<double>(diffs.size());
            point.mean_diff = mean;
            if (diffs.size() >= 2) {
                double ss = 0.0;
                for (double d : diffs) ss += (d - mean) * (d - mean);
                point.stddev = std::sqrt(ss / static_cast<double>(diffs.size() - 1));
            }
        }
        out.push_back(point);
    }
    return out;
}

}  // namespace feedrank
