#include "deckfuse/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "deckfuse/errors.hpp"

namespace deckfuse {

namespace {

constexpr double kCenterTolerance = 1e-9;  // relative center movement
constexpr int kMaxLloydIterations = 300;

// Cost of grouping sorted[i..j) around its mean, via prefix sums.
struct PrefixCost {
    std::vector<double> sum;
    std::vector<double> sum_sq;

    explicit PrefixCost(const std::vector<double>& sorted)
        : sum(sorted.size() + 1, 0.0), sum_sq(sorted.size() + 1, 0.0) {
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            sum[i + 1] = sum[i] + sorted[i];
            sum_sq[i + 1] = sum_sq[i] + sorted[i] * sorted[i];
        }
    }

    double cost(std::size_t i, std::size_t j) const {
        const double s = sum[j] - sum[i];
        const double s2 = sum_sq[j] - sum_sq[i];
        const double n = static_cast<double>(j - i);
        return std::max(0.0, s2 - s * s / n);
    }

    double mean(std::size_t i, std::size_t j) const {
        return (sum[j] - sum[i]) / static_cast<double>(j - i);
    }
};

// Optimal contiguous k-partition of the sorted values: returns the k-1
// split positions (exclusive ends of the first k-1 clusters).
std::vector<std::size_t> optimal_splits(const std::vector<double>& sorted, std::size_t k) {
    const std::size_t n = sorted.size();
    PrefixCost pc(sorted);

    const double inf = std::numeric_limits<double>::infinity();
    // dp[c][j]: best cost of splitting the first j values into c clusters.
    std::vector<std::vector<double>> dp(k + 1, std::vector<double>(n + 1, inf));
    std::vector<std::vector<std::size_t>> arg(k + 1, std::vector<std::size_t>(n + 1, 0));
    dp[0][0] = 0.0;
    for (std::size_t c = 1; c <= k; ++c) {
        for (std::size_t j = c; j + (k - c) <= n; ++j) {
            for (std::size_t i = c - 1; i < j; ++i) {
                if (dp[c - 1][i] == inf) continue;
                double v = dp[c - 1][i] + pc.cost(i, j);
                if (v < dp[c][j]) {
                    dp[c][j] = v;
                    arg[c][j] = i;
                }
            }
        }
    }

    std::vector<std::size_t> splits(k - 1);
    std::size_t j = n;
    for (std::size_t c = k; c > 1; --c) {
        j = arg[c][j];
        splits[c - 2] = j;
    }
    return splits;
}

}  // namespace

ClusterResult kmeans_1d(const std::vector<double>& values, std::size_t k,
                        std::uint64_t /*seed*/) {
    if (k == 0) throw UsageError("k must be positive");
    for (double v : values)
        if (!std::isfinite(v)) throw ValidationError("clustering input contains non-finite value");

    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    std::size_t distinct = sorted.empty() ? 0 : 1;
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] != sorted[i - 1]) ++distinct;
    if (distinct < k)
        throw DegenerateDataError("need at least " + std::to_string(k) +
                                  " distinct values, found " + std::to_string(distinct));

    const std::size_t n = sorted.size();
    auto splits = optimal_splits(sorted, k);
    PrefixCost pc(sorted);

    std::vector<double> centers(k);
    {
        std::size_t begin = 0;
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t end = c + 1 < k ? splits[c] : n;
            centers[c] = pc.mean(begin, end);
            begin = end;
        }
    }

    // Lloyd refinement from the optimal centers. The global optimum is a
    // fixed point, so this settles immediately except for exact-tie
    // reassignments, which it resolves deterministically (lower index).
    const double scale = std::max(std::abs(sorted.front()), std::abs(sorted.back()));
    std::vector<std::size_t> assign_sorted(n, 0);
    for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::abs(sorted[i] - centers[0]);
            for (std::size_t c = 1; c < k; ++c) {
                double d = std::abs(sorted[i] - centers[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            assign_sorted[i] = best;
        }
        std::vector<double> sums(k, 0.0);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[assign_sorted[i]] += sorted[i];
            ++counts[assign_sorted[i]];
        }
        double movement = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // keep an emptied center in place
            double updated = sums[c] / static_cast<double>(counts[c]);
            movement = std::max(movement, std::abs(updated - centers[c]));
            centers[c] = updated;
        }
        if (movement <= kCenterTolerance * std::max(1.0, scale)) break;
    }

    // Present centers sorted ascending and remap assignments accordingly.
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return centers[a] < centers[b]; });
    std::vector<std::size_t> rank(k);
    for (std::size_t r = 0; r < k; ++r) rank[order[r]] = r;
    std::vector<double> sorted_centers(k);
    for (std::size_t c = 0; c < k; ++c) sorted_centers[rank[c]] = centers[c];

    ClusterResult result;
    result.centers = std::move(sorted_centers);
    result.assignments.resize(values.size());
    result.inertia = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::size_t best = 0;
        double best_d = std::abs(values[i] - result.centers[0]);
        for (std::size_t c = 1; c < k; ++c) {
            double d = std::abs(values[i] - result.centers[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        result.assignments[i] = best;
        result.inertia += best_d * best_d;
    }
    return result;
}

namespace {

std::vector<double> modality_values(const std::vector<FeaturePoint>& points, Modality expected,
                                    const char* op) {
    std::vector<double> values;
    values.reserve(points.size());
    for (const auto& p : points) {
        if (p.modality != expected)
            throw UsageError(std::string(op) + " received a " + modality_name(p.modality) +
                             " point");
        values.push_back(p.value);
    }
    return values;
}

}  // namespace

DefectThreshold ie_threshold(const std::vector<FeaturePoint>& points, std::uint64_t seed) {
    auto values = modality_values(points, Modality::IE, "ie_threshold");
    auto clusters = kmeans_1d(values, 3, seed);
    double max_low = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i)
        if (clusters.assignments[i] == 0) max_low = std::max(max_low, values[i]);
    return {Modality::IE, max_low, ThresholdRule::MaxOfLowestCluster};
}

DefectThreshold usw_threshold(const std::vector<FeaturePoint>& points, std::uint64_t seed) {
    auto values = modality_values(points, Modality::USW, "usw_threshold");
    auto clusters = kmeans_1d(values, 3, seed);
    return {Modality::USW, clusters.centers.front(), ThresholdRule::MinClusterCenter};
}

std::vector<FeaturePoint> filter_defects(const std::vector<FeaturePoint>& points,
                                         const DefectThreshold& threshold) {
    std::vector<FeaturePoint> kept;
    for (const auto& p : points) {
        if (p.modality != threshold.modality)
            throw UsageError("filter_defects: threshold modality does not match points");
        if (p.value < threshold.value) kept.push_back(p);
    }
    return kept;
}

const char* threshold_rule_name(ThresholdRule rule) {
    return rule == ThresholdRule::MaxOfLowestCluster ? "MaxOfLowestCluster" : "MinClusterCenter";
}

}  // namespace deckfuse
