#pragma once

#include <span>
#include <string>
#include <vector>

#include "adl/gmm.hpp"

namespace adl {

using Sequence = std::vector<std::vector<double>>;

// Bottom-level HMM for one activity. Each emitting state carries a GMM;
// entry/exit mass models the non-emitting entry and exit states of the
// two-level structure. Invariant: entry sums to 1, every trans row plus the
// state's exit probability sums to 1.
struct ActivityHmm {
    std::string activity;
    int num_states = 0;
    std::vector<double> entry_probs;
    std::vector<std::vector<double>> trans;
    std::vector<double> exit_probs;
    std::vector<Gmm> emissions;
};

// Two-level model: per-activity bottom HMMs plus an equiprobable fully
// connected top level (including the reject class "None").
struct HhmmModel {
    std::vector<ActivityHmm> activities;
    std::vector<std::vector<double>> top_trans;

    int activity_count() const { return static_cast<int>(activities.size()); }
};

HhmmModel make_hhmm(std::vector<ActivityHmm> activities);

enum class InitMode { flat_start, viterbi_align };

InitMode parse_init_mode(const std::string& name);
std::string init_mode_name(InitMode mode);

struct InitConfig {
    std::string activity;
    int num_states = 3;
    int num_components = 5;
    double loop = 0.6;            // initial self-transition mass
    InitMode mode = InitMode::flat_start;
    double perturbation = 0.2;    // mean offset step, in global sigmas
};

// Flat-start (global moments, symmetry broken by +k*delta*sigma mean offsets)
// or uniform-partition moments refined by 2 rounds of Viterbi realignment.
// Throws NoData when no observations are given.
ActivityHmm init_activity_hmm(const InitConfig& config,
                              std::span<const Sequence> sequences);

struct BaumWelchOptions {
    int max_iterations = 15;
    double prune_threshold = 1e-3;
    // Per-dimension variance floor factor relative to the pooled variance.
    double variance_floor_factor = 1e-4;
    // Stop when the total log-likelihood improves by less than this.
    double convergence_tol = 1e-6;
};

struct TrainResult {
    ActivityHmm model;
    std::vector<double> log_likelihoods;  // one entry per completed iteration
};

// Classical EM over all sequences with log-space forward-backward,
// mixture-weight pruning and variance flooring.
TrainResult baum_welch(ActivityHmm model, std::span<const Sequence> sequences,
                       const BaumWelchOptions& options = {});

// Total log-likelihood of the sequences under the model (entry ... exit).
double activity_log_likelihood(const ActivityHmm& model,
                               std::span<const Sequence> sequences);

// Flat decoding graph over all emitting states of all activities.
struct DecodingNetwork {
    std::vector<std::string> activity_names;
    std::vector<int> state_activity;             // flat state -> activity index
    std::vector<double> initial;                 // linear probabilities
    std::vector<std::vector<double>> trans;      // linear probabilities
    std::vector<Gmm> emissions;

    int size() const { return static_cast<int>(state_activity.size()); }
};

// Expands the two-level model: intra-activity arcs from trans, inter-activity
// arcs exit_i[k] * top[i][q] * entry_q[j], initial mass uniform over
// activities times entry probabilities. Throws UntrainedActivity if an
// activity has no emitting states.
DecodingNetwork flatten(const HhmmModel& model);

struct DecodedInterval {
    int start = 0;  // inclusive observation indices
    int end = 0;
    std::string activity;
    double log_score = 0.0;
};

struct DecodedTimeline {
    std::vector<DecodedInterval> intervals;
    double log_score = 0.0;

    // One activity label per observation, expanded from the intervals.
    std::vector<std::string> labels() const;
};

// Beam-pruned token-passing Viterbi over the flat network. beam is a
// log-width; infinity reproduces exact Viterbi. Ties break toward the lower
// flat-state index. Throws AllTokensPruned when no token survives.
DecodedTimeline viterbi_decode(const DecodingNetwork& network,
                               std::span<const std::vector<double>> observations,
                               double beam);

}  // namespace adl
