#include <string>
#include <vector>

#include <doctest.h>

#include "adl/errors.hpp"
#include "adl/evaluation.hpp"

using namespace adl;

TEST_CASE("one-vs-rest confusion counts by hand") {
    const std::vector<std::string> truth = {"walk", "walk", "walk", "walk", "None",
                                            "None", "None", "None", "None", "None"};
    const std::vector<std::string> pred = {"walk", "walk", "None", "None", "walk",
                                           "None", "None", "None", "None", "None"};
    const ConfusionCounts c = confusion(pred, truth, "walk");
    CHECK(c.tp == 2);
    CHECK(c.fp == 1);
    CHECK(c.fn == 2);
    CHECK(c.tn == 5);
    CHECK(c.total() == 10);

    const Metrics m = metrics(c);
    CHECK(m.precision.value() == doctest::Approx(2.0 / 3.0));
    CHECK(m.recall.value() == doctest::Approx(0.5));
    // F as printed: 1/(1/p + 1/r) = p*r/(p+r) = 2/7.
    CHECK(m.f_score.value() == doctest::Approx(2.0 / 7.0));
    CHECK(m.accuracy.value() == doctest::Approx(0.7));
}

TEST_CASE("the conventional F1 doubles the printed F") {
    const ConfusionCounts c{2, 1, 5, 2};
    const Metrics printed = metrics(c, false);
    const Metrics conventional = metrics(c, true);
    CHECK(conventional.f_score.value() ==
          doctest::Approx(2.0 * printed.f_score.value()));
    CHECK(conventional.f_score.value() == doctest::Approx(4.0 / 7.0));
    CHECK(conventional.precision == printed.precision);
    CHECK(conventional.recall == printed.recall);
}

TEST_CASE("the printed F never exceeds one half") {
    const ConfusionCounts perfect{10, 0, 5, 0};
    const Metrics m = metrics(perfect);
    CHECK(m.precision.value() == doctest::Approx(1.0));
    CHECK(m.recall.value() == doctest::Approx(1.0));
    CHECK(m.f_score.value() == doctest::Approx(0.5));
}

TEST_CASE("zero denominators yield empty metrics") {
    SUBCASE("never predicted: precision is n/a") {
        const ConfusionCounts c{0, 0, 8, 2};
        const Metrics m = metrics(c);
        CHECK(!m.precision.has_value());
        CHECK(m.recall.has_value());
        CHECK(m.recall.value() == doctest::Approx(0.0));
        CHECK(!m.f_score.has_value());
    }
    SUBCASE("absent from the truth: recall is n/a") {
        const ConfusionCounts c{0, 3, 7, 0};
        const Metrics m = metrics(c);
        CHECK(m.precision.has_value());
        CHECK(m.precision.value() == doctest::Approx(0.0));
        CHECK(!m.recall.has_value());
        CHECK(!m.f_score.has_value());
    }
    SUBCASE("p = r = 0 gives F = 0, not 0/0") {
        const ConfusionCounts c{0, 3, 5, 2};
        const Metrics m = metrics(c);
        CHECK(m.precision.value() == doctest::Approx(0.0));
        CHECK(m.recall.value() == doctest::Approx(0.0));
        REQUIRE(m.f_score.has_value());
        CHECK(m.f_score.value() == doctest::Approx(0.0));
    }
    SUBCASE("empty range: everything is n/a") {
        const Metrics m = metrics(ConfusionCounts{});
        CHECK(!m.precision.has_value());
        CHECK(!m.recall.has_value());
        CHECK(!m.f_score.has_value());
        CHECK(!m.accuracy.has_value());
    }
}

TEST_CASE("global accuracy is the exact-match rate") {
    const std::vector<std::string> truth = {"a", "b", "b", "c"};
    const std::vector<std::string> pred = {"a", "b", "c", "c"};
    CHECK(global_accuracy(pred, truth) == doctest::Approx(0.75));
    CHECK(global_accuracy(truth, truth) == doctest::Approx(1.0));
}

TEST_CASE("confusion and accuracy reject mismatched ranges") {
    const std::vector<std::string> truth = {"a", "b"};
    const std::vector<std::string> pred = {"a"};
    CHECK_THROWS_AS(confusion(pred, truth, "a"), RangeMismatch);
    CHECK_THROWS_AS(global_accuracy(pred, truth), RangeMismatch);
}

TEST_CASE("evaluate_timelines sorts by decreasing precision, n/a last") {
    // good: p=1, noisy: p=1/2, ghost: never predicted (p n/a).
    const std::vector<std::string> truth = {"good", "good", "noisy", "noisy",
                                            "ghost", "None"};
    const std::vector<std::string> pred = {"good", "good", "noisy", "None",
                                           "None", "noisy"};
    const std::vector<std::string> acts = {"None", "ghost", "good", "noisy"};
    const EvalReport report = evaluate_timelines(pred, truth, acts);
    CHECK(report.global_accuracy == doctest::Approx(3.0 / 6.0));
    REQUIRE(report.per_activity.size() == 4);
    CHECK(report.per_activity[0].activity == "good");
    CHECK(report.per_activity[0].metrics.precision.value() == doctest::Approx(1.0));
    CHECK(report.per_activity[1].activity == "noisy");
    CHECK(report.per_activity[1].metrics.precision.value() == doctest::Approx(0.5));
    // "None" has precision 0, below "noisy"; "ghost" has no precision at all.
    CHECK(report.per_activity[2].activity == "None");
    CHECK(report.per_activity[3].activity == "ghost");
    CHECK(!report.per_activity[3].metrics.precision.has_value());
}

TEST_CASE("median") {
    CHECK(median({3.0}) == doctest::Approx(3.0));
    CHECK(median({5.0, 1.0, 3.0}) == doctest::Approx(3.0));
    // Even count: mean of the two middle values.
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
    CHECK(median({0.9, 1.0, 0.8, 1.0, 0.7}) == doctest::Approx(0.9));
    CHECK_THROWS_AS(median({}), InsufficientCorpus);
}
