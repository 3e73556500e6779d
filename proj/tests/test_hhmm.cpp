#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <doctest.h>

#include "adl/errors.hpp"
#include "adl/hhmm.hpp"

using namespace adl;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Gmm single_gaussian(std::vector<double> mean, std::vector<double> var) {
    Gmm g;
    g.weights = {1.0};
    g.means = {std::move(mean)};
    g.variances = {std::move(var)};
    return g;
}

// 1-D two-state activity with well separated emissions and explicit
// entry/trans/exit mass.
ActivityHmm two_state_model() {
    ActivityHmm m;
    m.activity = "demo";
    m.num_states = 2;
    m.entry_probs = {0.8, 0.2};
    m.trans = {{0.6, 0.2}, {0.1, 0.7}};
    m.exit_probs = {0.2, 0.2};
    m.emissions = {single_gaussian({0.0}, {1.0}), single_gaussian({5.0}, {1.0})};
    return m;
}

// Exhaustive path-sum oracle for the single-activity likelihood
// (entry * prod trans * prod emission * exit), summed over all state paths.
double brute_force_log_likelihood(const ActivityHmm& m, const Sequence& seq) {
    const int T = static_cast<int>(seq.size());
    const int S = m.num_states;
    long double total = 0.0L;
    std::vector<int> path(static_cast<std::size_t>(T), 0);
    while (true) {
        long double p = m.entry_probs[static_cast<std::size_t>(path[0])] *
                        std::exp(static_cast<long double>(gmm_log_density(
                            m.emissions[static_cast<std::size_t>(path[0])], seq[0])));
        for (int t = 1; t < T; ++t) {
            p *= m.trans[static_cast<std::size_t>(path[static_cast<std::size_t>(t - 1)])]
                        [static_cast<std::size_t>(path[static_cast<std::size_t>(t)])];
            p *= std::exp(static_cast<long double>(gmm_log_density(
                m.emissions[static_cast<std::size_t>(path[static_cast<std::size_t>(t)])],
                seq[static_cast<std::size_t>(t)])));
        }
        p *= m.exit_probs[static_cast<std::size_t>(path[static_cast<std::size_t>(T - 1)])];
        total += p;
        int t = T - 1;
        while (t >= 0 && path[static_cast<std::size_t>(t)] == S - 1) {
            path[static_cast<std::size_t>(t)] = 0;
            --t;
        }
        if (t < 0) break;
        ++path[static_cast<std::size_t>(t)];
    }
    return static_cast<double>(std::log(total));
}

// Exhaustive max-path oracle over the flat decoding network.
std::pair<double, std::vector<int>> brute_force_viterbi(
    const DecodingNetwork& net, const std::vector<std::vector<double>>& obs) {
    const int T = static_cast<int>(obs.size());
    const int S = net.size();
    double best = -kInf;
    std::vector<int> best_path;
    std::vector<int> path(static_cast<std::size_t>(T), 0);
    while (true) {
        double score = std::log(net.initial[static_cast<std::size_t>(path[0])]) +
                       gmm_log_density(net.emissions[static_cast<std::size_t>(path[0])], obs[0]);
        for (int t = 1; t < T && score > -kInf; ++t) {
            const int i = path[static_cast<std::size_t>(t - 1)];
            const int j = path[static_cast<std::size_t>(t)];
            const double a = net.trans[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            score = a > 0.0 ? score + std::log(a) +
                                  gmm_log_density(net.emissions[static_cast<std::size_t>(j)],
                                                  obs[static_cast<std::size_t>(t)])
                            : -kInf;
        }
        if (score > best) {
            best = score;
            best_path = path;
        }
        int t = T - 1;
        while (t >= 0 && path[static_cast<std::size_t>(t)] == S - 1) {
            path[static_cast<std::size_t>(t)] = 0;
            --t;
        }
        if (t < 0) break;
        ++path[static_cast<std::size_t>(t)];
    }
    return {best, best_path};
}

void check_stochastic(const ActivityHmm& m, double tol = 1e-9) {
    double entry = 0.0;
    for (double p : m.entry_probs) entry += p;
    CHECK(entry == doctest::Approx(1.0).epsilon(tol));
    for (int i = 0; i < m.num_states; ++i) {
        double row = m.exit_probs[static_cast<std::size_t>(i)];
        for (double p : m.trans[static_cast<std::size_t>(i)]) row += p;
        CHECK(row == doctest::Approx(1.0).epsilon(tol));
        double w = 0.0;
        for (double x : m.emissions[static_cast<std::size_t>(i)].weights) w += x;
        CHECK(w == doctest::Approx(1.0).epsilon(tol));
    }
}

}  // namespace

TEST_CASE("flat-start initialization layout") {
    InitConfig cfg;
    cfg.activity = "walk";
    cfg.num_states = 3;
    cfg.num_components = 2;
    cfg.loop = 0.6;
    cfg.perturbation = 0.2;

    std::vector<Sequence> seqs = {{{1.0}, {3.0}, {5.0}}, {{2.0}, {4.0}}};
    const ActivityHmm m = init_activity_hmm(cfg, seqs);
    CHECK(m.activity == "walk");
    CHECK(m.num_states == 3);
    check_stochastic(m);

    // Loop mass 0.6, the remaining 0.4 shared by 2 cross arcs and the exit.
    for (int i = 0; i < 3; ++i) {
        CHECK(m.entry_probs[static_cast<std::size_t>(i)] == doctest::Approx(1.0 / 3.0));
        CHECK(m.exit_probs[static_cast<std::size_t>(i)] == doctest::Approx(0.4 / 3.0));
        for (int j = 0; j < 3; ++j) {
            CHECK(m.trans[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] ==
                  doctest::Approx(i == j ? 0.6 : 0.4 / 3.0));
        }
    }

    // Pooled data: mean 3, variance 2. Component k's mean is offset by
    // k * 0.2 * sigma; all states share the same mixture.
    const double sigma = std::sqrt(2.0);
    for (int i = 0; i < 3; ++i) {
        const Gmm& g = m.emissions[static_cast<std::size_t>(i)];
        REQUIRE(g.components() == 2);
        CHECK(g.weights[0] == doctest::Approx(0.5));
        CHECK(g.means[0][0] == doctest::Approx(3.0));
        CHECK(g.means[1][0] == doctest::Approx(3.0 + 0.2 * sigma));
        CHECK(g.variances[0][0] == doctest::Approx(2.0));
        CHECK(g.variances[1][0] == doctest::Approx(2.0));
    }
}

TEST_CASE("initialization error paths") {
    InitConfig cfg;
    CHECK_THROWS_AS(init_activity_hmm(cfg, std::vector<Sequence>{}), NoData);
    CHECK_THROWS_AS(init_activity_hmm(cfg, std::vector<Sequence>{{}}), NoData);
    cfg.num_states = 0;
    CHECK_THROWS_AS(init_activity_hmm(cfg, std::vector<Sequence>{{{1.0}}}), InvalidConfig);
    CHECK_THROWS_AS(parse_init_mode("random"), InvalidConfig);
    CHECK(parse_init_mode("flat") == InitMode::flat_start);
    CHECK(parse_init_mode("viterbi-align") == InitMode::viterbi_align);
}

TEST_CASE("activity likelihood matches exhaustive path enumeration") {
    const ActivityHmm m = two_state_model();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> obs(-2.0, 7.0);
    for (int trial = 0; trial < 20; ++trial) {
        const int T = 1 + static_cast<int>(rng() % 6);
        Sequence seq;
        for (int t = 0; t < T; ++t) seq.push_back({obs(rng)});
        const std::vector<Sequence> seqs = {seq};
        CHECK(activity_log_likelihood(m, seqs) ==
              doctest::Approx(brute_force_log_likelihood(m, seq)).epsilon(1e-10));
    }
}

TEST_CASE("likelihood sums over sequences") {
    const ActivityHmm m = two_state_model();
    const Sequence a = {{0.1}, {4.9}};
    const Sequence b = {{1.0}, {2.0}, {3.0}};
    const std::vector<Sequence> both = {a, b};
    const std::vector<Sequence> va = {a}, vb = {b};
    CHECK(activity_log_likelihood(m, both) ==
          doctest::Approx(activity_log_likelihood(m, va) + activity_log_likelihood(m, vb)));
}

TEST_CASE("baum_welch log-likelihood is monotone and reported per iteration") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n0(0.0, 1.0), n1(5.0, 1.0);
    std::vector<Sequence> seqs;
    for (int s = 0; s < 6; ++s) {
        Sequence seq;
        for (int t = 0; t < 15; ++t) seq.push_back({n0(rng)});
        for (int t = 0; t < 15; ++t) seq.push_back({n1(rng)});
        seqs.push_back(std::move(seq));
    }

    InitConfig cfg;
    cfg.activity = "demo";
    cfg.num_states = 2;
    cfg.num_components = 2;
    cfg.mode = InitMode::viterbi_align;
    const ActivityHmm init = init_activity_hmm(cfg, seqs);

    BaumWelchOptions opts;
    opts.max_iterations = 12;
    opts.convergence_tol = -1.0;  // disable early stopping for the check
    const TrainResult result = baum_welch(init, seqs, opts);

    REQUIRE(result.log_likelihoods.size() == 12);
    // The first reported value is the likelihood of the initial model.
    CHECK(result.log_likelihoods.front() ==
          doctest::Approx(activity_log_likelihood(init, seqs)).epsilon(1e-9));
    for (std::size_t i = 1; i < result.log_likelihoods.size(); ++i) {
        CHECK(result.log_likelihoods[i] >= result.log_likelihoods[i - 1] - 1e-8);
    }
    check_stochastic(result.model);

    // Training strictly improved on this data.
    CHECK(result.log_likelihoods.back() > result.log_likelihoods.front() + 1.0);
}

TEST_CASE("baum_welch converges early when improvement stalls") {
    std::vector<Sequence> seqs = {{{0.0}, {0.1}, {-0.1}, {0.05}, {0.0}, {-0.05},
                                   {0.02}, {0.0}, {0.01}, {-0.02}}};
    InitConfig cfg;
    cfg.num_states = 1;
    cfg.num_components = 1;
    const ActivityHmm init = init_activity_hmm(cfg, seqs);
    BaumWelchOptions opts;
    opts.max_iterations = 50;
    opts.convergence_tol = 1e-6;
    const TrainResult result = baum_welch(init, seqs, opts);
    CHECK(result.log_likelihoods.size() < 50);
}

TEST_CASE("baum_welch recovers a planted two-state model") {
    // Ground truth: long dwell in a -5 regime, then a +5 regime.
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> lo(-5.0, 1.0), hi(5.0, 1.0);
    std::vector<Sequence> seqs;
    int total = 0;
    while (total < 5000) {
        Sequence seq;
        const int half = 25;
        for (int t = 0; t < half; ++t) seq.push_back({lo(rng)});
        for (int t = 0; t < half; ++t) seq.push_back({hi(rng)});
        total += 2 * half;
        seqs.push_back(std::move(seq));
    }

    InitConfig cfg;
    cfg.activity = "planted";
    cfg.num_states = 2;
    cfg.num_components = 1;
    cfg.mode = InitMode::viterbi_align;
    const TrainResult result = baum_welch(init_activity_hmm(cfg, seqs), seqs);

    std::vector<double> means = {result.model.emissions[0].means[0][0],
                                 result.model.emissions[1].means[0][0]};
    std::sort(means.begin(), means.end());
    CHECK(std::abs(means[0] - -5.0) < 0.1);
    CHECK(std::abs(means[1] - 5.0) < 0.1);
    // Dwell time ~25 frames: strong self-transitions on both states.
    CHECK(result.model.trans[0][0] > 0.85);
    CHECK(result.model.trans[1][1] > 0.85);
}

TEST_CASE("mixture components below the pruning threshold are dropped") {
    // Second component sits far from all data; its responsibility collapses
    // in one EM pass and it falls below the threshold.
    ActivityHmm m;
    m.activity = "prune";
    m.num_states = 1;
    m.entry_probs = {1.0};
    m.trans = {{0.9}};
    m.exit_probs = {0.1};
    Gmm g;
    g.weights = {0.95, 0.05};
    g.means = {{0.0}, {100.0}};
    g.variances = {{1.0}, {1.0}};
    m.emissions = {g};

    std::mt19937_64 rng(17);
    std::normal_distribution<double> data(0.0, 1.0);
    std::vector<Sequence> seqs(4);
    for (Sequence& s : seqs) {
        for (int t = 0; t < 50; ++t) s.push_back({data(rng)});
    }
    BaumWelchOptions opts;
    opts.max_iterations = 3;
    opts.prune_threshold = 1e-3;
    const TrainResult result = baum_welch(m, seqs, opts);
    CHECK(result.model.emissions[0].components() == 1);
    CHECK(result.model.emissions[0].weights[0] == doctest::Approx(1.0));
    CHECK(std::abs(result.model.emissions[0].means[0][0]) < 0.5);
}

TEST_CASE("baum_welch error paths") {
    ActivityHmm m = two_state_model();
    CHECK_THROWS_AS(baum_welch(m, std::vector<Sequence>{}), NoData);
    CHECK_THROWS_AS(baum_welch(m, std::vector<Sequence>{{}, {}}), NoData);
}

TEST_CASE("make_hhmm builds an equiprobable top level") {
    ActivityHmm a = two_state_model();
    a.activity = "a";
    ActivityHmm b = two_state_model();
    b.activity = "b";
    const HhmmModel model = make_hhmm({a, b});
    REQUIRE(model.activity_count() == 2);
    for (const auto& row : model.top_trans) {
        REQUIRE(row.size() == 2);
        for (double p : row) CHECK(p == doctest::Approx(0.5));
    }
}

TEST_CASE("flatten expands entry, intra and inter-activity arcs") {
    ActivityHmm a;
    a.activity = "a";
    a.num_states = 2;
    a.entry_probs = {0.7, 0.3};
    a.trans = {{0.5, 0.3}, {0.1, 0.6}};
    a.exit_probs = {0.2, 0.3};
    a.emissions = {single_gaussian({0.0}, {1.0}), single_gaussian({1.0}, {1.0})};

    ActivityHmm b;
    b.activity = "b";
    b.num_states = 1;
    b.entry_probs = {1.0};
    b.trans = {{0.4}};
    b.exit_probs = {0.6};
    b.emissions = {single_gaussian({5.0}, {1.0})};

    const DecodingNetwork net = flatten(make_hhmm({a, b}));
    REQUIRE(net.size() == 3);
    CHECK(net.activity_names == std::vector<std::string>{"a", "b"});
    CHECK(net.state_activity == std::vector<int>{0, 0, 1});

    // Initial: (1/2) * entry.
    CHECK(net.initial[0] == doctest::Approx(0.35));
    CHECK(net.initial[1] == doctest::Approx(0.15));
    CHECK(net.initial[2] == doctest::Approx(0.5));

    // Intra arcs plus the exit->top->entry hop back into the same activity:
    // trans[0][0] = 0.5 + 0.2*0.5*0.7.
    CHECK(net.trans[0][0] == doctest::Approx(0.5 + 0.2 * 0.5 * 0.7));
    CHECK(net.trans[0][1] == doctest::Approx(0.3 + 0.2 * 0.5 * 0.3));
    CHECK(net.trans[0][2] == doctest::Approx(0.2 * 0.5 * 1.0));
    CHECK(net.trans[1][2] == doctest::Approx(0.3 * 0.5 * 1.0));
    CHECK(net.trans[2][0] == doctest::Approx(0.6 * 0.5 * 0.7));
    CHECK(net.trans[2][2] == doctest::Approx(0.4 + 0.6 * 0.5 * 1.0));

    // Every flat row is stochastic.
    for (int i = 0; i < net.size(); ++i) {
        double row = 0.0;
        for (double p : net.trans[static_cast<std::size_t>(i)]) row += p;
        CHECK(row == doctest::Approx(1.0));
    }
    double init_sum = 0.0;
    for (double p : net.initial) init_sum += p;
    CHECK(init_sum == doctest::Approx(1.0));
}

TEST_CASE("flatten rejects untrained activities") {
    ActivityHmm empty;
    empty.activity = "hollow";
    empty.num_states = 0;
    CHECK_THROWS_AS(flatten(make_hhmm({empty})), UntrainedActivity);
    CHECK_THROWS_AS(flatten(HhmmModel{}), UntrainedActivity);
}

TEST_CASE("viterbi_decode matches exhaustive enumeration") {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> mu(-4.0, 4.0);
    std::uniform_real_distribution<double> obs(-5.0, 5.0);
    std::uniform_real_distribution<double> mass(0.1, 1.0);

    for (int trial = 0; trial < 40; ++trial) {
        const int S = 2 + static_cast<int>(rng() % 3);  // 2..4 flat states
        const int T = 2 + static_cast<int>(rng() % 4);  // 2..5 observations
        DecodingNetwork net;
        net.activity_names.resize(static_cast<std::size_t>(S));
        for (int s = 0; s < S; ++s) {
            net.activity_names[static_cast<std::size_t>(s)] = "act" + std::to_string(s);
            net.state_activity.push_back(s);
            net.emissions.push_back(single_gaussian({mu(rng)}, {0.5 + mass(rng)}));
            net.initial.push_back(mass(rng));
        }
        double isum = 0.0;
        for (double p : net.initial) isum += p;
        for (double& p : net.initial) p /= isum;
        net.trans.assign(static_cast<std::size_t>(S),
                         std::vector<double>(static_cast<std::size_t>(S)));
        for (auto& row : net.trans) {
            double rsum = 0.0;
            for (double& p : row) {
                p = mass(rng);
                rsum += p;
            }
            for (double& p : row) p /= rsum;
        }

        std::vector<std::vector<double>> observations;
        for (int t = 0; t < T; ++t) observations.push_back({obs(rng)});

        const auto [want_score, want_path] = brute_force_viterbi(net, observations);
        const DecodedTimeline timeline = viterbi_decode(net, observations, kInf);
        CHECK(timeline.log_score == doctest::Approx(want_score).epsilon(1e-10));
        std::vector<std::string> want_labels;
        for (int s : want_path) {
            want_labels.push_back(net.activity_names[static_cast<std::size_t>(s)]);
        }
        CHECK(timeline.labels() == want_labels);

        // Interval scores decompose the total.
        double sum = 0.0;
        for (const DecodedInterval& iv : timeline.intervals) sum += iv.log_score;
        CHECK(sum == doctest::Approx(timeline.log_score).epsilon(1e-10));
        CHECK(timeline.intervals.front().start == 0);
        CHECK(timeline.intervals.back().end == T - 1);
    }
}

TEST_CASE("viterbi ties break toward the lower flat-state index") {
    // Two interchangeable states: identical emissions, symmetric transitions.
    DecodingNetwork net;
    net.activity_names = {"first", "second"};
    net.state_activity = {0, 1};
    net.initial = {0.5, 0.5};
    net.trans = {{0.5, 0.5}, {0.5, 0.5}};
    net.emissions = {single_gaussian({0.0}, {1.0}), single_gaussian({0.0}, {1.0})};

    const std::vector<std::vector<double>> obs = {{0.3}, {-0.2}, {0.1}};
    const DecodedTimeline timeline = viterbi_decode(net, obs, kInf);
    REQUIRE(timeline.intervals.size() == 1);
    CHECK(timeline.intervals[0].activity == "first");
}

TEST_CASE("a generous beam reproduces the exact decode") {
    ActivityHmm a = two_state_model();
    a.activity = "near";
    ActivityHmm b = two_state_model();
    b.activity = "far";
    b.emissions = {single_gaussian({20.0}, {1.0}), single_gaussian({25.0}, {1.0})};
    const DecodingNetwork net = flatten(make_hhmm({a, b}));

    std::mt19937_64 rng(404);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<std::vector<double>> obs;
    for (int t = 0; t < 30; ++t) obs.push_back({(t < 15 ? 0.0 : 22.5) + noise(rng)});

    const DecodedTimeline exact = viterbi_decode(net, obs, kInf);
    const DecodedTimeline beamed = viterbi_decode(net, obs, 500.0);
    CHECK(beamed.log_score == doctest::Approx(exact.log_score));
    CHECK(beamed.labels() == exact.labels());
    // The decode follows the planted switch.
    CHECK(exact.labels().front() == "near");
    CHECK(exact.labels().back() == "far");
}

TEST_CASE("viterbi error paths") {
    DecodingNetwork net;
    net.activity_names = {"only"};
    net.state_activity = {0};
    net.initial = {0.0};  // unreachable state
    net.trans = {{1.0}};
    net.emissions = {single_gaussian({0.0}, {1.0})};
    const std::vector<std::vector<double>> obs = {{0.0}};
    CHECK_THROWS_AS(viterbi_decode(net, obs, kInf), AllTokensPruned);
    net.initial = {1.0};
    CHECK_THROWS_AS(viterbi_decode(net, std::vector<std::vector<double>>{}, kInf), NoData);
}
