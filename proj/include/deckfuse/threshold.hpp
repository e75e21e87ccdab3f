#pragma once

#include <cstdint>
#include <vector>

#include "deckfuse/types.hpp"

namespace deckfuse {

struct ClusterResult {
    std::vector<double> centers;       // sorted ascending
    std::vector<std::size_t> assignments;  // per input point, index into centers
    double inertia = 0.0;              // sum of squared within-cluster distances
};

/// Cluster scalar values into k groups minimizing within-cluster squared
/// error. In one dimension the optimum is contiguous in sorted order, so
/// the globally optimal partition is found directly (dynamic program over
/// contiguous splits) and then confirmed as a Lloyd fixed point
/// (tolerance 1e-9 relative, max 300 iterations). Fully deterministic;
/// the seed parameter is reserved for future randomized initializers and
/// does not affect the result.
/// Requires at least k distinct values.
ClusterResult kmeans_1d(const std::vector<double>& values, std::size_t k,
                        std::uint64_t seed = 0);

enum class ThresholdRule : std::uint8_t { MaxOfLowestCluster, MinClusterCenter };

struct DefectThreshold {
    Modality modality = Modality::IE;
    double value = 0.0;
    ThresholdRule rule = ThresholdRule::MaxOfLowestCluster;
};

/// IE rule: cluster peak frequencies with K=3 and take the maximum value
/// of the lowest-center cluster.
DefectThreshold ie_threshold(const std::vector<FeaturePoint>& points, std::uint64_t seed = 0);

/// USW rule: cluster moduli with K=3 and take the smallest cluster center.
DefectThreshold usw_threshold(const std::vector<FeaturePoint>& points, std::uint64_t seed = 0);

/// Keep points strictly below the threshold (equality counts as healthy).
/// Order preserved. Threshold modality must match the points.
std::vector<FeaturePoint> filter_defects(const std::vector<FeaturePoint>& points,
                                         const DefectThreshold& threshold);

const char* threshold_rule_name(ThresholdRule rule);

}  // namespace deckfuse
