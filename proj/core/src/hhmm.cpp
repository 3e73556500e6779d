#include "adl/hhmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "adl/errors.hpp"

namespace adl {

namespace {

constexpr double kAbsVarianceFloor = 1e-8;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

struct Moments {
    std::vector<double> mean;
    std::vector<double> variance;
    std::size_t count = 0;
};

Moments pooled_moments(std::span<const Sequence> sequences, int dim) {
    Moments m;
    m.mean.assign(static_cast<std::size_t>(dim), 0.0);
    m.variance.assign(static_cast<std::size_t>(dim), 0.0);
    for (const Sequence& seq : sequences) {
        for (const auto& o : seq) {
            for (int d = 0; d < dim; ++d) m.mean[static_cast<std::size_t>(d)] += o[static_cast<std::size_t>(d)];
            ++m.count;
        }
    }
    if (m.count == 0) return m;
    for (double& v : m.mean) v /= static_cast<double>(m.count);
    for (const Sequence& seq : sequences) {
        for (const auto& o : seq) {
            for (int d = 0; d < dim; ++d) {
                const double diff = o[static_cast<std::size_t>(d)] - m.mean[static_cast<std::size_t>(d)];
                m.variance[static_cast<std::size_t>(d)] += diff * diff;
            }
        }
    }
    for (double& v : m.variance) v /= static_cast<double>(m.count);
    return m;
}

void floor_variance(std::vector<double>& var, const std::vector<double>& floor) {
    for (std::size_t d = 0; d < var.size(); ++d) {
        var[d] = std::max(var[d], floor[d]);
    }
}

std::vector<double> absolute_floor(int dim) {
    return std::vector<double>(static_cast<std::size_t>(dim), kAbsVarianceFloor);
}

// Deterministic k-means on pooled vectors; centers seeded at the data mean
// offset by k*delta*sigma per component.
Gmm kmeans_gmm(const std::vector<const std::vector<double>*>& data, int dim,
               int num_components, double delta,
               const std::vector<double>& var_floor) {
    Gmm g;
    std::vector<double> mean(static_cast<std::size_t>(dim), 0.0);
    std::vector<double> var(static_cast<std::size_t>(dim), 0.0);
    for (const auto* o : data) {
        for (int d = 0; d < dim; ++d) mean[static_cast<std::size_t>(d)] += (*o)[static_cast<std::size_t>(d)];
    }
    const double n = static_cast<double>(std::max<std::size_t>(data.size(), 1));
    for (double& v : mean) v /= n;
    for (const auto* o : data) {
        for (int d = 0; d < dim; ++d) {
            const double diff = (*o)[static_cast<std::size_t>(d)] - mean[static_cast<std::size_t>(d)];
            var[static_cast<std::size_t>(d)] += diff * diff;
        }
    }
    for (double& v : var) v /= n;
    floor_variance(var, var_floor);

    std::vector<std::vector<double>> centers(static_cast<std::size_t>(num_components), mean);
    for (int k = 0; k < num_components; ++k) {
        for (int d = 0; d < dim; ++d) {
            centers[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)] +=
                k * delta * std::sqrt(var[static_cast<std::size_t>(d)]);
        }
    }

    std::vector<int> assign(data.size(), 0);
    for (int iter = 0; iter < 10; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < data.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_k = 0;
            for (int k = 0; k < num_components; ++k) {
                double dist = 0.0;
                for (int d = 0; d < dim; ++d) {
                    const double diff = (*data[i])[static_cast<std::size_t>(d)] -
                                        centers[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)];
                    dist += diff * diff;
                }
                if (dist < best) {
                    best = dist;
                    best_k = k;
                }
            }
            if (assign[i] != best_k) {
                assign[i] = best_k;
                changed = true;
            }
        }
        std::vector<std::vector<double>> sums(static_cast<std::size_t>(num_components),
                                              std::vector<double>(static_cast<std::size_t>(dim), 0.0));
        std::vector<std::size_t> counts(static_cast<std::size_t>(num_components), 0);
        for (std::size_t i = 0; i < data.size(); ++i) {
            for (int d = 0; d < dim; ++d) {
                sums[static_cast<std::size_t>(assign[i])][static_cast<std::size_t>(d)] +=
                    (*data[i])[static_cast<std::size_t>(d)];
            }
            ++counts[static_cast<std::size_t>(assign[i])];
        }
        for (int k = 0; k < num_components; ++k) {
            if (counts[static_cast<std::size_t>(k)] > 0) {
                for (int d = 0; d < dim; ++d) {
                    centers[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)] =
                        sums[static_cast<std::size_t>(k)][static_cast<std::size_t>(d)] /
                        static_cast<double>(counts[static_cast<std::size_t>(k)]);
                }
            }
        }
        if (!changed && iter > 0) break;
    }

    g.weights.assign(static_cast<std::size_t>(num_components), 0.0);
    g.means.assign(static_cast<std::size_t>(num_components),
                   std::vector<double>(static_cast<std::size_t>(dim), 0.0));
    g.variances.assign(static_cast<std::size_t>(num_components),
                       std::vector<double>(static_cast<std::size_t>(dim), 0.0));
    std::vector<std::size_t> counts(static_cast<std::size_t>(num_components), 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::size_t k = static_cast<std::size_t>(assign[i]);
        ++counts[k];
        for (int d = 0; d < dim; ++d) {
            g.means[k][static_cast<std::size_t>(d)] += (*data[i])[static_cast<std::size_t>(d)];
        }
    }
    for (int k = 0; k < num_components; ++k) {
        const std::size_t ks = static_cast<std::size_t>(k);
        if (counts[ks] == 0) {
            g.means[ks] = centers[ks];
            g.variances[ks] = var;
            g.weights[ks] = 1e-6;
            continue;
        }
        for (double& v : g.means[ks]) v /= static_cast<double>(counts[ks]);
        g.weights[ks] = static_cast<double>(counts[ks]) / n;
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        const std::size_t k = static_cast<std::size_t>(assign[i]);
        for (int d = 0; d < dim; ++d) {
            const double diff = (*data[i])[static_cast<std::size_t>(d)] -
                                g.means[k][static_cast<std::size_t>(d)];
            g.variances[k][static_cast<std::size_t>(d)] += diff * diff;
        }
    }
    for (int k = 0; k < num_components; ++k) {
        const std::size_t ks = static_cast<std::size_t>(k);
        if (counts[ks] > 0) {
            for (double& v : g.variances[ks]) v /= static_cast<double>(counts[ks]);
        }
        floor_variance(g.variances[ks], var_floor);
    }
    const double wsum = std::accumulate(g.weights.begin(), g.weights.end(), 0.0);
    for (double& w : g.weights) w /= wsum;
    return g;
}

void init_loop_transitions(ActivityHmm& model, double loop) {
    const int m = model.num_states;
    model.entry_probs.assign(static_cast<std::size_t>(m), 1.0 / m);
    model.trans.assign(static_cast<std::size_t>(m),
                       std::vector<double>(static_cast<std::size_t>(m), 0.0));
    model.exit_probs.assign(static_cast<std::size_t>(m), 0.0);
    // Remaining mass after the loop is shared by the (m-1) cross arcs and
    // the exit arc.
    const double share = (1.0 - loop) / m;
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            model.trans[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                i == j ? loop : share;
        }
        model.exit_probs[static_cast<std::size_t>(i)] = share;
    }
}

// Viterbi state alignment of one sequence against a single-activity HMM,
// used for initialization refinement.
std::vector<int> align_sequence(const ActivityHmm& model, const Sequence& seq) {
    const int m = model.num_states;
    const int T = static_cast<int>(seq.size());
    std::vector<std::vector<double>> delta(static_cast<std::size_t>(T),
                                           std::vector<double>(static_cast<std::size_t>(m), kNegInf));
    std::vector<std::vector<int>> back(static_cast<std::size_t>(T),
                                       std::vector<int>(static_cast<std::size_t>(m), 0));
    for (int i = 0; i < m; ++i) {
        delta[0][static_cast<std::size_t>(i)] =
            safe_log(model.entry_probs[static_cast<std::size_t>(i)]) +
            gmm_log_density(model.emissions[static_cast<std::size_t>(i)], seq[0]);
    }
    for (int t = 1; t < T; ++t) {
        for (int j = 0; j < m; ++j) {
            double best = kNegInf;
            int arg = 0;
            for (int i = 0; i < m; ++i) {
                const double cand = delta[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(i)] +
                                    safe_log(model.trans[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
                if (cand > best) {
                    best = cand;
                    arg = i;
                }
            }
            delta[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] =
                best + gmm_log_density(model.emissions[static_cast<std::size_t>(j)],
                                       seq[static_cast<std::size_t>(t)]);
            back[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)] = arg;
        }
    }
    double best = kNegInf;
    int arg = 0;
    for (int i = 0; i < m; ++i) {
        const double cand = delta[static_cast<std::size_t>(T - 1)][static_cast<std::size_t>(i)] +
                            safe_log(model.exit_probs[static_cast<std::size_t>(i)]);
        if (cand > best) {
            best = cand;
            arg = i;
        }
    }
    std::vector<int> path(static_cast<std::size_t>(T));
    path[static_cast<std::size_t>(T - 1)] = arg;
    for (int t = T - 1; t > 0; --t) {
        path[static_cast<std::size_t>(t - 1)] =
            back[static_cast<std::size_t>(t)][static_cast<std::size_t>(path[static_cast<std::size_t>(t)])];
    }
    return path;
}

}  // namespace

InitMode parse_init_mode(const std::string& name) {
    if (name == "flat") return InitMode::flat_start;
    if (name == "viterbi-align") return InitMode::viterbi_align;
    throw InvalidConfig("unknown init mode '" + name + "' (expected flat|viterbi-align)");
}

std::string init_mode_name(InitMode mode) {
    return mode == InitMode::flat_start ? "flat" : "viterbi-align";
}

ActivityHmm init_activity_hmm(const InitConfig& config,
                              std::span<const Sequence> sequences) {
    if (config.num_states < 1) throw InvalidConfig("num_states must be >= 1");
    if (config.num_components < 1) throw InvalidConfig("num_components must be >= 1");
    int dim = 0;
    for (const Sequence& s : sequences) {
        if (!s.empty()) {
            dim = static_cast<int>(s.front().size());
            break;
        }
    }
    if (dim == 0) throw NoData("init_activity_hmm: no training observations");

    const Moments global = pooled_moments(sequences, dim);
    const auto floor = absolute_floor(dim);

    ActivityHmm model;
    model.activity = config.activity;
    model.num_states = config.num_states;
    init_loop_transitions(model, config.loop);

    const int m = config.num_states;
    const int K = config.num_components;

    if (config.mode == InitMode::flat_start) {
        Gmm g;
        g.weights.assign(static_cast<std::size_t>(K), 1.0 / K);
        std::vector<double> var = global.variance;
        floor_variance(var, floor);
        for (int k = 0; k < K; ++k) {
            std::vector<double> mu = global.mean;
            for (int d = 0; d < dim; ++d) {
                mu[static_cast<std::size_t>(d)] +=
                    k * config.perturbation *
                    std::sqrt(global.variance[static_cast<std::size_t>(d)]);
            }
            g.means.push_back(std::move(mu));
            g.variances.push_back(var);
        }
        model.emissions.assign(static_cast<std::size_t>(m), g);
        return model;
    }

    // viterbi-align: uniform temporal partition into m chunks, per-chunk
    // k-means moments, then 2 rounds of Viterbi realignment of the frames.
    auto fit_states = [&](const std::vector<std::vector<const std::vector<double>*>>& buckets) {
        model.emissions.clear();
        for (int i = 0; i < m; ++i) {
            const auto& data = buckets[static_cast<std::size_t>(i)];
            if (data.empty()) {
                // Starved state: fall back to the global moments.
                std::vector<const std::vector<double>*> none;
                Gmm g = kmeans_gmm(none, dim, K, config.perturbation, floor);
                for (auto& mu : g.means) mu = global.mean;
                for (auto& v : g.variances) {
                    v = global.variance;
                    floor_variance(v, floor);
                }
                std::fill(g.weights.begin(), g.weights.end(), 1.0 / K);
                model.emissions.push_back(std::move(g));
            } else {
                model.emissions.push_back(
                    kmeans_gmm(data, dim, K, config.perturbation, floor));
            }
        }
    };

    std::vector<std::vector<const std::vector<double>*>> buckets(static_cast<std::size_t>(m));
    for (const Sequence& seq : sequences) {
        const std::size_t T = seq.size();
        for (std::size_t t = 0; t < T; ++t) {
            const int chunk = std::min<int>(static_cast<int>(t * static_cast<std::size_t>(m) / std::max<std::size_t>(T, 1)), m - 1);
            buckets[static_cast<std::size_t>(chunk)].push_back(&seq[t]);
        }
    }
    fit_states(buckets);

    for (int round = 0; round < 2; ++round) {
        std::vector<std::vector<const std::vector<double>*>> realigned(static_cast<std::size_t>(m));
        for (const Sequence& seq : sequences) {
            if (seq.empty()) continue;
            const std::vector<int> path = align_sequence(model, seq);
            for (std::size_t t = 0; t < seq.size(); ++t) {
                realigned[static_cast<std::size_t>(path[t])].push_back(&seq[t]);
            }
        }
        fit_states(realigned);
    }
    return model;
}

namespace {

struct SequenceStats {
    double log_likelihood = 0.0;
    // Accumulators shared across sequences; indices [state], [state][state],
    // [state][component] etc.
    std::vector<double>* entry_acc;
    std::vector<std::vector<double>>* trans_acc;
    std::vector<double>* exit_acc;
    std::vector<double>* state_occ;
    std::vector<std::vector<double>>* comp_occ;
    std::vector<std::vector<std::vector<double>>>* comp_mean_acc;
    std::vector<std::vector<std::vector<double>>>* comp_sq_acc;
};

// Log-space forward-backward over one sequence, accumulating expected
// counts. Returns the sequence log-likelihood (entry ... exit).
double forward_backward(const ActivityHmm& model, const Sequence& seq,
                        SequenceStats& stats) {
    const int m = model.num_states;
    const int T = static_cast<int>(seq.size());
    const auto ms = [](int v) { return static_cast<std::size_t>(v); };

    // Cached per-component and per-state log densities.
    std::vector<std::vector<std::vector<double>>> comp_ld(
        ms(T), std::vector<std::vector<double>>(ms(m)));
    std::vector<std::vector<double>> state_ld(ms(T), std::vector<double>(ms(m)));
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < m; ++i) {
            gmm_component_log_densities(model.emissions[ms(i)], seq[ms(t)], comp_ld[ms(t)][ms(i)]);
            state_ld[ms(t)][ms(i)] = log_sum_exp(comp_ld[ms(t)][ms(i)]);
        }
    }

    std::vector<double> ltrans_flat(ms(m * m));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            ltrans_flat[ms(i * m + j)] = safe_log(model.trans[ms(i)][ms(j)]);

    std::vector<std::vector<double>> la(ms(T), std::vector<double>(ms(m), kNegInf));
    std::vector<std::vector<double>> lb(ms(T), std::vector<double>(ms(m), kNegInf));
    std::vector<double> scratch(ms(m));

    for (int i = 0; i < m; ++i) {
        la[0][ms(i)] = safe_log(model.entry_probs[ms(i)]) + state_ld[0][ms(i)];
    }
    for (int t = 1; t < T; ++t) {
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                scratch[ms(i)] = la[ms(t - 1)][ms(i)] + ltrans_flat[ms(i * m + j)];
            }
            la[ms(t)][ms(j)] = log_sum_exp(scratch) + state_ld[ms(t)][ms(j)];
        }
    }
    for (int i = 0; i < m; ++i) {
        scratch[ms(i)] = la[ms(T - 1)][ms(i)] + safe_log(model.exit_probs[ms(i)]);
    }
    const double log_p = log_sum_exp(scratch);
    if (!std::isfinite(log_p)) {
        throw NumericalUnderflow("sequence has zero likelihood under the model");
    }

    for (int i = 0; i < m; ++i) {
        lb[ms(T - 1)][ms(i)] = safe_log(model.exit_probs[ms(i)]);
    }
    for (int t = T - 2; t >= 0; --t) {
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                scratch[ms(j)] = ltrans_flat[ms(i * m + j)] + state_ld[ms(t + 1)][ms(j)] +
                                 lb[ms(t + 1)][ms(j)];
            }
            lb[ms(t)][ms(i)] = log_sum_exp(scratch);
        }
    }

    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < m; ++i) {
            const double lgamma = la[ms(t)][ms(i)] + lb[ms(t)][ms(i)] - log_p;
            const double gamma = std::exp(lgamma);
            (*stats.state_occ)[ms(i)] += gamma;
            if (t == 0) (*stats.entry_acc)[ms(i)] += gamma;

            const auto& comps = comp_ld[ms(t)][ms(i)];
            for (std::size_t k = 0; k < comps.size(); ++k) {
                const double r = std::exp(lgamma + comps[k] - state_ld[ms(t)][ms(i)]);
                (*stats.comp_occ)[ms(i)][k] += r;
                auto& macc = (*stats.comp_mean_acc)[ms(i)][k];
                auto& sacc = (*stats.comp_sq_acc)[ms(i)][k];
                const auto& o = seq[ms(t)];
                for (std::size_t d = 0; d < o.size(); ++d) {
                    macc[d] += r * o[d];
                    sacc[d] += r * o[d] * o[d];
                }
            }
        }
    }
    for (int t = 0; t + 1 < T; ++t) {
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                const double lxi = la[ms(t)][ms(i)] + ltrans_flat[ms(i * m + j)] +
                                   state_ld[ms(t + 1)][ms(j)] + lb[ms(t + 1)][ms(j)] - log_p;
                (*stats.trans_acc)[ms(i)][ms(j)] += std::exp(lxi);
            }
        }
    }
    for (int i = 0; i < m; ++i) {
        (*stats.exit_acc)[ms(i)] +=
            std::exp(la[ms(T - 1)][ms(i)] + safe_log(model.exit_probs[ms(i)]) - log_p);
    }
    return log_p;
}

}  // namespace

double activity_log_likelihood(const ActivityHmm& model,
                               std::span<const Sequence> sequences) {
    const int m = model.num_states;
    const auto ms = [](int v) { return static_cast<std::size_t>(v); };
    double total = 0.0;
    std::vector<double> scratch(ms(m));
    for (const Sequence& seq : sequences) {
        if (seq.empty()) continue;
        const int T = static_cast<int>(seq.size());
        std::vector<double> prev(ms(m)), cur(ms(m));
        for (int i = 0; i < m; ++i) {
            prev[ms(i)] = safe_log(model.entry_probs[ms(i)]) +
                          gmm_log_density(model.emissions[ms(i)], seq[0]);
        }
        for (int t = 1; t < T; ++t) {
            for (int j = 0; j < m; ++j) {
                for (int i = 0; i < m; ++i) {
                    scratch[ms(i)] = prev[ms(i)] + safe_log(model.trans[ms(i)][ms(j)]);
                }
                cur[ms(j)] = log_sum_exp(scratch) +
                             gmm_log_density(model.emissions[ms(j)], seq[ms(t)]);
            }
            std::swap(prev, cur);
        }
        for (int i = 0; i < m; ++i) {
            scratch[ms(i)] = prev[ms(i)] + safe_log(model.exit_probs[ms(i)]);
        }
        total += log_sum_exp(scratch);
    }
    return total;
}

TrainResult baum_welch(ActivityHmm model, std::span<const Sequence> sequences,
                       const BaumWelchOptions& options) {
    if (sequences.empty()) throw NoData("baum_welch: no training sequences");
    const int m = model.num_states;
    const int dim = model.emissions.empty() ? 0 : model.emissions.front().dim();
    const auto ms = [](int v) { return static_cast<std::size_t>(v); };

    const Moments global = pooled_moments(sequences, dim);
    if (global.count == 0) throw NoData("baum_welch: sequences contain no observations");
    std::vector<double> var_floor(ms(dim));
    for (int d = 0; d < dim; ++d) {
        var_floor[ms(d)] = std::max(options.variance_floor_factor * global.variance[ms(d)],
                                    kAbsVarianceFloor);
    }

    TrainResult result;
    std::size_t num_sequences = 0;
    for (const Sequence& s : sequences) {
        if (!s.empty()) ++num_sequences;
    }
    if (num_sequences == 0) throw NoData("baum_welch: all sequences are empty");

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        std::vector<double> entry_acc(ms(m), 0.0), exit_acc(ms(m), 0.0), state_occ(ms(m), 0.0);
        std::vector<std::vector<double>> trans_acc(ms(m), std::vector<double>(ms(m), 0.0));
        std::vector<std::vector<double>> comp_occ(ms(m));
        std::vector<std::vector<std::vector<double>>> comp_mean_acc(ms(m)), comp_sq_acc(ms(m));
        for (int i = 0; i < m; ++i) {
            const std::size_t K = model.emissions[ms(i)].weights.size();
            comp_occ[ms(i)].assign(K, 0.0);
            comp_mean_acc[ms(i)].assign(K, std::vector<double>(ms(dim), 0.0));
            comp_sq_acc[ms(i)].assign(K, std::vector<double>(ms(dim), 0.0));
        }

        SequenceStats stats;
        stats.entry_acc = &entry_acc;
        stats.trans_acc = &trans_acc;
        stats.exit_acc = &exit_acc;
        stats.state_occ = &state_occ;
        stats.comp_occ = &comp_occ;
        stats.comp_mean_acc = &comp_mean_acc;
        stats.comp_sq_acc = &comp_sq_acc;

        double total_ll = 0.0;
        for (const Sequence& seq : sequences) {
            if (seq.empty()) continue;
            total_ll += forward_backward(model, seq, stats);
        }
        result.log_likelihoods.push_back(total_ll);

        // M-step.
        for (int i = 0; i < m; ++i) {
            model.entry_probs[ms(i)] = entry_acc[ms(i)] / static_cast<double>(num_sequences);
        }
        for (int i = 0; i < m; ++i) {
            const double occ = state_occ[ms(i)];
            if (occ <= 1e-12) continue;  // starved state keeps its parameters
            for (int j = 0; j < m; ++j) {
                model.trans[ms(i)][ms(j)] = trans_acc[ms(i)][ms(j)] / occ;
            }
            model.exit_probs[ms(i)] = exit_acc[ms(i)] / occ;

            Gmm& g = model.emissions[ms(i)];
            const std::size_t K = g.weights.size();
            for (std::size_t k = 0; k < K; ++k) {
                const double c = comp_occ[ms(i)][k];
                if (c <= 1e-12) {
                    g.weights[k] = 0.0;
                    continue;
                }
                g.weights[k] = c / occ;
                for (int d = 0; d < dim; ++d) {
                    const double mu = comp_mean_acc[ms(i)][k][ms(d)] / c;
                    const double ex2 = comp_sq_acc[ms(i)][k][ms(d)] / c;
                    g.means[k][ms(d)] = mu;
                    g.variances[k][ms(d)] = std::max(ex2 - mu * mu, var_floor[ms(d)]);
                }
            }

            // Prune low-weight components, always keeping the heaviest one.
            const std::size_t keep =
                static_cast<std::size_t>(std::distance(g.weights.begin(),
                    std::max_element(g.weights.begin(), g.weights.end())));
            Gmm pruned;
            for (std::size_t k = 0; k < K; ++k) {
                if (k == keep || g.weights[k] >= options.prune_threshold) {
                    pruned.weights.push_back(g.weights[k]);
                    pruned.means.push_back(g.means[k]);
                    pruned.variances.push_back(g.variances[k]);
                }
            }
            const double wsum = std::accumulate(pruned.weights.begin(), pruned.weights.end(), 0.0);
            for (double& w : pruned.weights) w /= wsum;
            g = std::move(pruned);
        }

        if (result.log_likelihoods.size() >= 2) {
            const auto& ll = result.log_likelihoods;
            if (ll[ll.size() - 1] - ll[ll.size() - 2] < options.convergence_tol) break;
        }
    }

    result.model = std::move(model);
    return result;
}

HhmmModel make_hhmm(std::vector<ActivityHmm> activities) {
    HhmmModel model;
    model.activities = std::move(activities);
    const int n1 = model.activity_count();
    model.top_trans.assign(static_cast<std::size_t>(n1),
                           std::vector<double>(static_cast<std::size_t>(n1), 1.0 / n1));
    return model;
}

DecodingNetwork flatten(const HhmmModel& model) {
    const int n1 = model.activity_count();
    if (n1 == 0) throw UntrainedActivity("flatten: model has no activities");

    DecodingNetwork net;
    std::vector<int> offsets;
    int total = 0;
    for (int a = 0; a < n1; ++a) {
        const ActivityHmm& act = model.activities[static_cast<std::size_t>(a)];
        if (act.num_states < 1 || act.emissions.empty()) {
            throw UntrainedActivity("activity '" + act.activity + "' has no emitting states");
        }
        net.activity_names.push_back(act.activity);
        offsets.push_back(total);
        total += act.num_states;
        for (int j = 0; j < act.num_states; ++j) {
            net.state_activity.push_back(a);
            net.emissions.push_back(act.emissions[static_cast<std::size_t>(j)]);
        }
    }

    net.initial.assign(static_cast<std::size_t>(total), 0.0);
    net.trans.assign(static_cast<std::size_t>(total),
                     std::vector<double>(static_cast<std::size_t>(total), 0.0));

    for (int a = 0; a < n1; ++a) {
        const ActivityHmm& act = model.activities[static_cast<std::size_t>(a)];
        const int off = offsets[static_cast<std::size_t>(a)];
        for (int j = 0; j < act.num_states; ++j) {
            net.initial[static_cast<std::size_t>(off + j)] =
                (1.0 / n1) * act.entry_probs[static_cast<std::size_t>(j)];
            for (int k = 0; k < act.num_states; ++k) {
                net.trans[static_cast<std::size_t>(off + j)][static_cast<std::size_t>(off + k)] =
                    act.trans[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
            }
            // Inter-activity arcs through the non-emitting exit/entry states.
            for (int q = 0; q < n1; ++q) {
                const ActivityHmm& target = model.activities[static_cast<std::size_t>(q)];
                const int toff = offsets[static_cast<std::size_t>(q)];
                const double hop = act.exit_probs[static_cast<std::size_t>(j)] *
                                   model.top_trans[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)];
                for (int l = 0; l < target.num_states; ++l) {
                    net.trans[static_cast<std::size_t>(off + j)][static_cast<std::size_t>(toff + l)] +=
                        hop * target.entry_probs[static_cast<std::size_t>(l)];
                }
            }
        }
    }
    return net;
}

std::vector<std::string> DecodedTimeline::labels() const {
    std::vector<std::string> out;
    for (const DecodedInterval& iv : intervals) {
        for (int t = iv.start; t <= iv.end; ++t) out.push_back(iv.activity);
    }
    return out;
}

DecodedTimeline viterbi_decode(const DecodingNetwork& network,
                               std::span<const std::vector<double>> observations,
                               double beam) {
    const int S = network.size();
    const int T = static_cast<int>(observations.size());
    if (T == 0) throw NoData("viterbi_decode: empty observation sequence");
    const auto ms = [](int v) { return static_cast<std::size_t>(v); };

    std::vector<double> log_init(ms(S)), score(ms(S)), next(ms(S));
    std::vector<std::vector<double>> log_trans(ms(S), std::vector<double>(ms(S)));
    for (int i = 0; i < S; ++i) {
        log_init[ms(i)] = safe_log(network.initial[ms(i)]);
        for (int j = 0; j < S; ++j) {
            log_trans[ms(i)][ms(j)] = safe_log(network.trans[ms(i)][ms(j)]);
        }
    }

    std::vector<std::vector<int>> back(ms(T), std::vector<int>(ms(S), -1));
    std::vector<std::vector<double>> emit(ms(T), std::vector<double>(ms(S)));

    for (int s = 0; s < S; ++s) {
        emit[0][ms(s)] = gmm_log_density(network.emissions[ms(s)], observations[0]);
        score[ms(s)] = log_init[ms(s)] + emit[0][ms(s)];
    }

    auto apply_beam = [&](std::vector<double>& sc) {
        double best = kNegInf;
        for (double v : sc) best = std::max(best, v);
        if (!std::isfinite(best)) {
            throw AllTokensPruned("all tokens have zero probability");
        }
        if (std::isinf(beam)) return;
        const double cutoff = best - beam;
        for (double& v : sc) {
            if (v < cutoff) v = kNegInf;
        }
    };
    apply_beam(score);

    for (int t = 1; t < T; ++t) {
        for (int s = 0; s < S; ++s) {
            emit[ms(t)][ms(s)] = gmm_log_density(network.emissions[ms(s)], observations[ms(t)]);
        }
        for (int j = 0; j < S; ++j) {
            double best = kNegInf;
            int arg = -1;
            for (int i = 0; i < S; ++i) {
                if (score[ms(i)] == kNegInf) continue;
                const double cand = score[ms(i)] + log_trans[ms(i)][ms(j)];
                if (cand > best) {
                    best = cand;
                    arg = i;
                }
            }
            next[ms(j)] = best == kNegInf ? kNegInf : best + emit[ms(t)][ms(j)];
            back[ms(t)][ms(j)] = arg;
        }
        score = next;
        apply_beam(score);
    }

    double best = kNegInf;
    int arg = 0;
    for (int s = 0; s < S; ++s) {
        if (score[ms(s)] > best) {
            best = score[ms(s)];
            arg = s;
        }
    }
    if (!std::isfinite(best)) {
        throw AllTokensPruned("no surviving token at the final observation");
    }

    std::vector<int> path(ms(T));
    path[ms(T - 1)] = arg;
    for (int t = T - 1; t > 0; --t) {
        path[ms(t - 1)] = back[ms(t)][ms(path[ms(t)])];
    }

    // Per-step score contributions (transition-into + emission; entry at t=0).
    std::vector<double> contrib(ms(T));
    contrib[0] = log_init[ms(path[0])] + emit[0][ms(path[0])];
    for (int t = 1; t < T; ++t) {
        contrib[ms(t)] = log_trans[ms(path[ms(t - 1)])][ms(path[ms(t)])] + emit[ms(t)][ms(path[ms(t)])];
    }

    DecodedTimeline timeline;
    timeline.log_score = best;
    int start = 0;
    double interval_score = contrib[0];
    for (int t = 1; t <= T; ++t) {
        const bool boundary =
            t == T || network.state_activity[ms(path[ms(t)])] !=
                          network.state_activity[ms(path[ms(t - 1)])];
        if (boundary) {
            DecodedInterval iv;
            iv.start = start;
            iv.end = t - 1;
            iv.activity =
                network.activity_names[ms(network.state_activity[ms(path[ms(t - 1)])])];
            iv.log_score = interval_score;
            timeline.intervals.push_back(std::move(iv));
            if (t < T) {
                start = t;
                interval_score = contrib[ms(t)];
            }
        } else {
            interval_score += contrib[ms(t)];
        }
    }
    return timeline;
}

}  // namespace adl
