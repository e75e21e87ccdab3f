#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "deckfuse/errors.hpp"
#include "deckfuse/threshold.hpp"
#include "oracles.hpp"

using namespace deckfuse;

namespace {

std::vector<FeaturePoint> as_points(const std::vector<double>& values, Modality m) {
    std::vector<FeaturePoint> pts;
    for (std::size_t i = 0; i < values.size(); ++i)
        pts.push_back({static_cast<double>(i), 0.0, values[i], m});
    return pts;
}

} // namespace

TEST_CASE("kmeans_1d inertia equals the exhaustive partition optimum") {
    std::mt19937_64 rng(123);
    std::uniform_int_distribution<std::size_t> len(3, 12);
    std::uniform_real_distribution<double> val(-50.0, 50.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = len(rng);
        std::vector<double> values(n);
        bool distinct = false;
        while (!distinct) {
            for (auto& v : values) v = val(rng);
            auto sorted = values;
            std::sort(sorted.begin(), sorted.end());
            distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin() >= 3;
        }
        auto result = kmeans_1d(values, 3);
        const double want = oracle::best_partition_inertia(values, 3);
        CHECK(result.inertia == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("kmeans_1d output invariants") {
    std::vector<double> values = {9.0, 1.0, 8.5, 1.2, 5.0, 0.8, 9.5, 5.2};
    auto r = kmeans_1d(values, 3);

    REQUIRE(r.centers.size() == 3);
    CHECK(std::is_sorted(r.centers.begin(), r.centers.end()));
    REQUIRE(r.assignments.size() == values.size());

    // every assignment picks the nearest center
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::size_t nearest = 0;
        for (std::size_t c = 1; c < 3; ++c)
            if (std::abs(values[i] - r.centers[c]) < std::abs(values[i] - r.centers[nearest]))
                nearest = c;
        CHECK(r.assignments[i] == nearest);
    }

    // each center is the mean of its members
    for (std::size_t c = 0; c < 3; ++c) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < values.size(); ++i)
            if (r.assignments[i] == c) {
                sum += values[i];
                ++count;
            }
        REQUIRE(count > 0);
        CHECK(r.centers[c] == doctest::Approx(sum / static_cast<double>(count)).epsilon(1e-12));
    }

    // hand partition: {0.8,1,1.2} {5,5.2} {8.5,9,9.5}
    CHECK(r.centers[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.centers[1] == doctest::Approx(5.1).epsilon(1e-12));
    CHECK(r.centers[2] == doctest::Approx(9.0).epsilon(1e-12));
}

TEST_CASE("kmeans_1d requires k distinct values") {
    CHECK_THROWS_AS(kmeans_1d({1.0, 1.0, 1.0, 1.0}, 3), DegenerateDataError);
    CHECK_THROWS_AS(kmeans_1d({1.0, 2.0}, 3), DegenerateDataError);
    CHECK_THROWS_AS(kmeans_1d({}, 3), DegenerateDataError);
    CHECK_NOTHROW(kmeans_1d({1.0, 2.0, 3.0}, 3));
    CHECK_THROWS_AS(kmeans_1d({1.0, 2.0, 3.0}, 0), UsageError);
}

TEST_CASE("seed does not change the deterministic result") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> val(0.0, 20.0);
    std::vector<double> values(40);
    for (auto& v : values) v = val(rng);
    auto a = kmeans_1d(values, 3, 0);
    auto b = kmeans_1d(values, 3, 987654321);
    CHECK(a.centers == b.centers);
    CHECK(a.assignments == b.assignments);
    CHECK(a.inertia == b.inertia);
}

TEST_CASE("ie threshold is the max value of the lowest cluster") {
    SUBCASE("well separated bands") {
        // defect band 2..4, mid 6..7, healthy 10..12
        std::vector<double> freqs = {2.1, 3.0, 3.9, 6.2, 6.8, 10.5, 11.0, 11.8};
        auto t = ie_threshold(as_points(freqs, Modality::IE));
        CHECK(t.modality == Modality::IE);
        CHECK(t.rule == ThresholdRule::MaxOfLowestCluster);
        CHECK(t.value == doctest::Approx(3.9).epsilon(1e-12));
    }
    SUBCASE("threshold tracks the band edge, not the center") {
        std::vector<double> freqs = {2.0, 4.31, 8.0, 8.1, 11.0, 11.5};
        auto t = ie_threshold(as_points(freqs, Modality::IE));
        CHECK(t.value == doctest::Approx(4.31).epsilon(1e-12));
    }
    SUBCASE("three values degenerate to singleton clusters") {
        std::vector<double> freqs = {3.0, 7.0, 11.0};
        auto t = ie_threshold(as_points(freqs, Modality::IE));
        CHECK(t.value == doctest::Approx(3.0).epsilon(1e-12));
    }
}

TEST_CASE("usw threshold is the smallest cluster center") {
    SUBCASE("well separated bands") {
        std::vector<double> mods = {1400.0, 1600.0, 1800.0, 2800.0, 3000.0, 4200.0, 4400.0};
        auto t = usw_threshold(as_points(mods, Modality::USW));
        CHECK(t.modality == Modality::USW);
        CHECK(t.rule == ThresholdRule::MinClusterCenter);
        CHECK(t.value == doctest::Approx(1600.0).epsilon(1e-12));
    }
    SUBCASE("field-survey-scale fixture") {
        std::vector<double> mods = {1900.0, 2012.0, 2124.0, 3300.0, 3400.0, 4500.0, 4600.0};
        auto t = usw_threshold(as_points(mods, Modality::USW));
        CHECK(t.value == doctest::Approx(2012.0).epsilon(1e-12));
    }
    SUBCASE("three values") {
        std::vector<double> mods = {1500.0, 3000.0, 4500.0};
        auto t = usw_threshold(as_points(mods, Modality::USW));
        CHECK(t.value == doctest::Approx(1500.0).epsilon(1e-12));
    }
}

TEST_CASE("filter_defects keeps strictly-below points in order") {
    std::vector<FeaturePoint> pts = as_points({5.0, 1.0, 3.0, 3.0, 2.0, 4.0}, Modality::IE);
    DefectThreshold t{Modality::IE, 3.0, ThresholdRule::MaxOfLowestCluster};
    auto kept = filter_defects(pts, t);
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].value == 1.0); // order preserved
    CHECK(kept[1].value == 2.0);
    // boundary: equal to threshold counts as healthy
    for (const auto& p : kept) CHECK(p.value < 3.0);

    DefectThreshold wrong{Modality::USW, 3.0, ThresholdRule::MinClusterCenter};
    CHECK_THROWS_AS(filter_defects(pts, wrong), UsageError);
}

TEST_CASE("band-separated inputs keep at least the interior of the defect band") {
    // MaxOfLowestCluster + strict < keeps every defect point except the one
    // sitting exactly at the cluster maximum.
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> low(2.0, 4.0), mid(6.0, 8.0), high(10.0, 12.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> values;
        const std::size_t n_low = 5 + rng() % 10;
        for (std::size_t i = 0; i < n_low; ++i) values.push_back(low(rng));
        for (std::size_t i = 0; i < 8; ++i) values.push_back(mid(rng));
        for (std::size_t i = 0; i < 8; ++i) values.push_back(high(rng));
        auto pts = as_points(values, Modality::IE);
        auto t = ie_threshold(pts);
        auto kept = filter_defects(pts, t);
        CHECK(kept.size() == n_low - 1);
        for (const auto& p : kept) CHECK(p.value < t.value);
    }
}

TEST_CASE("threshold rules reject degenerate feature sets") {
    CHECK_THROWS_AS(ie_threshold({}), DegenerateDataError);
    auto flat = as_points({5.0, 5.0, 5.0, 5.0, 5.0}, Modality::IE);
    CHECK_THROWS_AS(ie_threshold(flat), DegenerateDataError);
}

TEST_CASE("rule names are stable for the report") {
    CHECK(std::string(threshold_rule_name(ThresholdRule::MaxOfLowestCluster)) ==
          "MaxOfLowestCluster");
    CHECK(std::string(threshold_rule_name(ThresholdRule::MinClusterCenter)) ==
          "MinClusterCenter");
}
