// sweep.cpp - scenario runner for the dense and free-fermion paths

#include "relax/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <thread>

#include "relax/emit.hpp"
#include "relax/errors.hpp"
#include "relax/freefermion.hpp"
#include "relax/log.hpp"
#include "relax/propagate.hpp"
#include "relax/steadystate.hpp"

namespace relax {

namespace {

// Blocks above this size are never turned into dense d_A x d_A matrices.
constexpr int kMaxDenseBlock = 10;
constexpr double kPositionSpotTolerance = 1e-8;
// Stream offset separating random-state seeds from disorder seeds.
constexpr std::uint64_t kStateStream = 0x5157415445ULL;

bool has(const std::vector<Quantity>& qs, Quantity q) { return std::find(qs.begin(), qs.end(), q) != qs.end(); }

std::string metric_symbol(MetricKind m) {
    switch (m) {
        case MetricKind::TraceDistance: return "D";
        case MetricKind::Bures: return "B";
        case MetricKind::Schatten2: return "S";
        case MetricKind::NormalizedSchatten2: return "N";
        case MetricKind::RelativeDistance: return "R";
    }
    return "?";
}

std::string speed_symbol(MetricKind m) {
    switch (m) {
        case MetricKind::TraceDistance: return "v_A";
        case MetricKind::Bures: return "u_A";
        case MetricKind::Schatten2: return "s_A";
        case MetricKind::NormalizedSchatten2: return "n_A";
        case MetricKind::RelativeDistance: return "r_A";
    }
    return "?";
}

std::string window_label(double a, double b) { return format_double(a) + ".." + format_double(b); }

std::optional<SteadyStateKind> steady_kind(const ExperimentConfig& c, double t_a, double t_b) {
    switch (c.reference) {
        case ReferenceKind::MaximallyMixed: return MaximallyMixed{};
        case ReferenceKind::Gibbs: return Gibbs{c.beta};
        case ReferenceKind::GibbsEnergyMatched: return GibbsEnergyMatched{};
        case ReferenceKind::DiagonalEnsemble: return DiagonalEnsemble{};
        case ReferenceKind::TimeAveraged: return TimeAveragedRdm{t_a, t_b, c.window.samples};
        case ReferenceKind::None:
        case ReferenceKind::Gge: return std::nullopt;
    }
    return std::nullopt;
}

bool uniform_product(const ExperimentConfig& c) {
    return c.initial_state && *c.initial_state != ProductStateKind::Neel;
}

bool translation_invariant_model(const ExperimentConfig& c) { return !is_disordered(c.scenario); }

ChainSpec make_spec(const ExperimentConfig& c, int L, double h, int realization) {
    const auto& p = c.parameters;
    switch (c.scenario) {
        case Scenario::Fig1Random:
        case Scenario::Fig2Product: return ChainSpec(ChaoticIsing{p.h_x, p.h_z}, L);
        case Scenario::FigS2TfimRandom:
        case Scenario::FigS3TfimProduct: return ChainSpec(Tfim{p.h_z}, L);
        case Scenario::Fig3Xxz:
        case Scenario::FigS1Transition: {
            const DisorderSpec d{h, c.base_seed, static_cast<std::uint64_t>(realization)};
            return ChainSpec(Xxz{p.delta, sample_disorder(d, L)}, L);
        }
        case Scenario::FigS4Quench: break;
    }
    throw DomainError("scenario has no dense chain model");
}

StateVector make_state(const ExperimentConfig& c, int L, int realization) {
    if (is_disordered(c.scenario)) return make_initial_state(ProductState{ProductStateKind::Neel}, L);
    if (c.initial_state) return make_initial_state(ProductState{*c.initial_state}, L);
    const auto seed = derive_seed(derive_seed(c.base_seed, kStateStream), static_cast<std::uint64_t>(realization));
    return make_initial_state(RandomGaussianState{seed, c.complex_random_amplitudes}, L);
}

// Mean and standard error (n - 1 variance over sqrt n); no error for n = 1.
struct Stat {
    double mean = 0.0;
    std::optional<double> error;
};
Stat statistics(const std::vector<double>& v) {
    Stat s;
    const double n = static_cast<double>(v.size());
    for (double x : v) s.mean += x;
    s.mean /= n;
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    return s;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Per-realization reduced values for one (L_A, metric, quantity) channel.
struct ChannelValues {
    double value = 0.0;                // time and position mean
    double deviation = 0.0;            // rms over time of v(t) - <v>, position mean
    double abs_deviation = 0.0;        // mean over time of |v(t) - <v>|, position mean
    std::vector<double> series;        // position mean at each sample
};

// Reduces data[p][t] in a fixed order.
ChannelValues reduce_channel(const std::vector<std::vector<double>>& data) {
    ChannelValues out;
    const std::size_t np = data.size();
    const std::size_t nt = data.front().size();
    out.series.assign(nt, 0.0);
    for (const auto& row : data) {
        const double m = mean_of(row);
        double sq = 0.0, ab = 0.0;
        for (double v : row) {
            sq += (v - m) * (v - m);
            ab += std::abs(v - m);
        }
        out.value += m;
        out.deviation += std::sqrt(sq / static_cast<double>(nt));
        out.abs_deviation += ab / static_cast<double>(nt);
        for (std::size_t t = 0; t < nt; ++t) out.series[t] += row[t];
    }
    const double inv = 1.0 / static_cast<double>(np);
    out.value *= inv;
    out.deviation *= inv;
    out.abs_deviation *= inv;
    for (double& v : out.series) v *= inv;
    return out;
}

struct Channel {
    int block_size = 0;
    MetricKind metric = MetricKind::TraceDistance;
    Quantity quantity = Quantity::Speed;
};

// Collects per-realization channel values and turns them into rows.
class RowBuilder {
public:
    RowBuilder(const ExperimentConfig& c, std::string tag, int L, std::vector<double> times)
        : config_(c), tag_(std::move(tag)), L_(L), times_(std::move(times)) {}

    // normalizer: full-system speed of this realization (speed channels only).
    void add(const Channel& ch, int realization, ChannelValues values, std::optional<double> normalizer) {
        auto& slot = slots_[key(ch)];
        slot.channel = ch;
        slot.realizations.push_back(realization);
        slot.values.push_back(std::move(values));
        if (normalizer) slot.normalizers.push_back(*normalizer);
    }

    void emit(std::vector<ResultRow>& rows) const {
        const std::string window = window_label(times_.front(), times_.back());
        const std::string base_seed = std::to_string(config_.base_seed);
        for (const auto& [k, slot] : slots_) {
            const auto& ch = slot.channel;
            const std::string label = row_label(ch.metric, ch.quantity);
            const double x = static_cast<double>(ch.block_size) / static_cast<double>(L_);
            const bool normalized = slot.normalizers.size() == slot.values.size() && !slot.normalizers.empty();
            const double norm_mean = normalized ? mean_of(slot.normalizers) : 0.0;

            auto row = [&](std::string metric, std::string when, double value, std::optional<double> vnorm,
                           std::optional<double> err, std::string seed) {
                rows.push_back(ResultRow{tag_, L_, ch.block_size, x, std::move(when), std::move(metric), value,
                                         vnorm, err, std::move(seed)});
            };
            auto collect = [&](auto getter) {
                std::vector<double> v;
                for (const auto& cv : slot.values) v.push_back(getter(cv));
                return v;
            };
            auto norm = [&](double v) -> std::optional<double> {
                if (!normalized) return std::nullopt;
                return norm_mean > 0.0 ? std::optional<double>(v / norm_mean) : std::nullopt;
            };

            const auto main = statistics(collect([](const ChannelValues& cv) { return cv.value; }));
            row(label, window, main.mean, norm(main.mean), main.error, base_seed);
            if (ch.quantity == Quantity::Speed && ch.block_size < L_) {
                const auto dev = statistics(collect([](const ChannelValues& cv) { return cv.deviation; }));
                row(label + "_dev", window, dev.mean, norm(dev.mean), dev.error, base_seed);
                const auto adev = statistics(collect([](const ChannelValues& cv) { return cv.abs_deviation; }));
                row(label + "_absdev", window, adev.mean, norm(adev.mean), adev.error, base_seed);
            }
            if (config_.emit_time_series && !slot.values.front().series.empty()) {
                for (std::size_t t = 0; t < times_.size(); ++t) {
                    const auto s = statistics(collect([t](const ChannelValues& cv) { return cv.series[t]; }));
                    row(label + "(t)", format_double(times_[t]), s.mean, norm(s.mean), s.error, base_seed);
                }
            }
            if (config_.emit_realizations) {
                for (std::size_t r = 0; r < slot.values.size(); ++r) {
                    const double v = slot.values[r].value;
                    std::optional<double> vn;
                    if (normalized && slot.normalizers[r] > 0.0) vn = v / slot.normalizers[r];
                    row(label + "#r" + std::to_string(slot.realizations[r]), window, v, vn, std::nullopt,
                        base_seed + ":" + std::to_string(slot.realizations[r]));
                }
            }
        }
    }

private:
    // Order: block size, then metric as configured, then quantity as configured.
    std::tuple<int, int, int> key(const Channel& ch) const {
        const auto mi = std::find(config_.metrics.begin(), config_.metrics.end(), ch.metric) - config_.metrics.begin();
        const auto qi =
            std::find(config_.quantities.begin(), config_.quantities.end(), ch.quantity) - config_.quantities.begin();
        return {ch.block_size, static_cast<int>(mi), static_cast<int>(qi)};
    }

    struct Slot {
        Channel channel;
        std::vector<int> realizations;
        std::vector<ChannelValues> values;
        std::vector<double> normalizers;
    };

    const ExperimentConfig& config_;
    std::string tag_;
    int L_;
    std::vector<double> times_;
    std::map<std::tuple<int, int, int>, Slot> slots_;
};

// ---------------------------------------------------------------------------
// Dense path

bool needs_dense_block(const ExperimentConfig& c, MetricKind m, Quantity q) {
    if (m != MetricKind::TraceDistance) return true;
    if (q == Quantity::Steady) return c.reference != ReferenceKind::MaximallyMixed;
    return false;  // exact speed and D_ini use low-rank forms
}

void check_dense_resources(const ExperimentConfig& c) {
    for (int L : c.sizes) {
        if (L > kMaxDenseSites)
            throw ResourceError("L=" + std::to_string(L) + " exceeds the dense limit of " +
                                std::to_string(kMaxDenseSites) + " sites");
        for (int la : subsystem_sizes_for(c, L))
            for (auto m : c.metrics)
                for (auto q : c.quantities)
                    if (la > kMaxDenseBlock && needs_dense_block(c, m, q))
                        throw ResourceError("L_A=" + std::to_string(la) + " exceeds the dense block limit of " +
                                            std::to_string(kMaxDenseBlock) + " sites for " +
                                            row_label(m, q));
    }
}

DensityMatrix block_rdm(const ComplexVector& psi, int L, const Block& block) {
    const ComplexMatrix m = block_amplitudes(psi, L, block);
    return DensityMatrix::trusted(m * m.adjoint());
}

struct DenseContext {
    const ExperimentConfig& config;
    int L;
    std::vector<int> block_sizes;
    std::vector<int> positions;
    std::vector<double> times;
    std::vector<double> shifted;
    bool need_shifted = false;
    std::optional<SteadyStateKind> kind;
};

// One realization: returns data[channel][position][sample] for subsystem channels.
void run_dense_realization(const DenseContext& ctx, const Trajectory& traj, const StateVector& psi0,
                           const std::vector<Channel>& channels,
                           std::vector<std::vector<std::vector<double>>>& data) {
    const auto& c = ctx.config;
    const int L = ctx.L;
    const int np = static_cast<int>(ctx.positions.size());
    const int nt = static_cast<int>(ctx.times.size());

    const auto samples = traj.sample(ctx.times);
    Trajectory::Samples later;
    if (ctx.need_shifted) later = traj.sample(ctx.shifted);

    // references per (block size, position)
    const bool need_steady_rdm = has(c.quantities, Quantity::Steady) &&
                                 std::any_of(channels.begin(), channels.end(), [&](const Channel& ch) {
                                     return ch.quantity == Quantity::Steady && needs_dense_block(c, ch.metric, ch.quantity);
                                 });
    const bool need_initial_rdm = std::any_of(channels.begin(), channels.end(), [&](const Channel& ch) {
        return ch.quantity == Quantity::Initial && ch.metric != MetricKind::TraceDistance;
    });
    const int nb = static_cast<int>(ctx.block_sizes.size());
    std::vector<std::optional<DensityMatrix>> steady(static_cast<std::size_t>(nb * np));
    std::vector<std::optional<DensityMatrix>> initial(static_cast<std::size_t>(nb * np));
    std::vector<ComplexMatrix> initial_amplitudes(static_cast<std::size_t>(nb * np));
    parallel_for(nb * np, c.workers, [&](int i) {
        const Block block{ctx.positions[static_cast<std::size_t>(i % np)], ctx.block_sizes[static_cast<std::size_t>(i / np)]};
        if (need_steady_rdm) {
            if (std::holds_alternative<MaximallyMixed>(*ctx.kind))
                steady[static_cast<std::size_t>(i)] = DensityMatrix::maximally_mixed(block.length);
            else
                steady[static_cast<std::size_t>(i)] = steady_rdm(*ctx.kind, traj, block);
        }
        if (has(c.quantities, Quantity::Initial)) {
            initial_amplitudes[static_cast<std::size_t>(i)] = block_amplitudes(psi0.amplitudes(), L, block);
            if (need_initial_rdm) initial[static_cast<std::size_t>(i)] = block_rdm(psi0.amplitudes(), L, block);
        }
    });

    const int nc = static_cast<int>(channels.size());
    data.assign(static_cast<std::size_t>(nc),
                std::vector<std::vector<double>>(static_cast<std::size_t>(np),
                                                 std::vector<double>(static_cast<std::size_t>(nt), 0.0)));
    const double dt = c.speed_step;

    parallel_for(np * nt, c.workers, [&](int task) {
        const int p = task / nt;
        const int t = task % nt;
        const ComplexVector psi = samples.states.col(t);
        const ComplexVector hpsi = samples.h_states.col(t);
        for (int b = 0; b < nb; ++b) {
            const Block block{ctx.positions[static_cast<std::size_t>(p)], ctx.block_sizes[static_cast<std::size_t>(b)]};
            const auto ref_index = static_cast<std::size_t>(b * np + p);
            std::optional<DensityMatrix> rho, rho_later;
            auto rho_now = [&]() -> const DensityMatrix& {
                if (!rho) rho = block_rdm(psi, L, block);
                return *rho;
            };
            for (int k = 0; k < nc; ++k) {
                const auto& ch = channels[static_cast<std::size_t>(k)];
                if (ch.block_size != block.length) continue;
                double v = 0.0;
                switch (ch.quantity) {
                    case Quantity::Speed:
                        if (ch.metric == MetricKind::TraceDistance) {
                            v = subsystem_speed_exact(psi, hpsi, L, block);
                        } else {
                            if (!rho_later) rho_later = block_rdm(later.states.col(t), L, block);
                            v = distance(ch.metric, rho_now(), *rho_later) / dt;
                        }
                        break;
                    case Quantity::Steady:
                        if (ch.metric == MetricKind::TraceDistance &&
                            std::holds_alternative<MaximallyMixed>(*ctx.kind))
                            v = maximally_mixed_distance(psi, L, block);
                        else
                            v = distance(ch.metric, rho_now(), *steady[ref_index]);
                        break;
                    case Quantity::Initial:
                        if (ch.metric == MetricKind::TraceDistance) {
                            const ComplexMatrix& m0 = initial_amplitudes[ref_index];
                            const ComplexMatrix m = block_amplitudes(psi, L, block);
                            ComplexMatrix factor(m.rows(), m.cols() + m0.cols());
                            factor << m, m0;
                            RealVector w(factor.cols());
                            w.head(m.cols()).setOnes();
                            w.tail(m0.cols()).setConstant(-1.0);
                            v = 0.5 * trace_norm_lowrank(factor, w);
                        } else {
                            v = distance(ch.metric, rho_now(), *initial[ref_index]);
                        }
                        break;
                }
                data[static_cast<std::size_t>(k)][static_cast<std::size_t>(p)][static_cast<std::size_t>(t)] = v;
            }
        }
    });
}

// Full-system channel values of one realization; nullopt when undefined.
std::optional<ChannelValues> full_system_values(const DenseContext& ctx, const Trajectory& traj,
                                                const StateVector& psi0, MetricKind m, Quantity q) {
    const auto& c = ctx.config;
    std::vector<double> series;
    switch (q) {
        case Quantity::Speed:
            if (m == MetricKind::RelativeDistance) return std::nullopt;
            series.assign(ctx.times.size(), traj.energy_fluctuation());
            break;
        case Quantity::Steady:
            if (m != MetricKind::TraceDistance) return std::nullopt;
            for (double t : ctx.times) series.push_back(total_steady_distance(*ctx.kind, traj, t));
            break;
        case Quantity::Initial:
            if (m == MetricKind::RelativeDistance) return std::nullopt;
            for (double t : ctx.times) series.push_back(pure_distance(m, traj.state(t), psi0));
            break;
    }
    (void)c;
    return reduce_channel({series});
}

void run_dense(const ExperimentConfig& c, std::optional<double> h, std::vector<ResultRow>& rows) {
    // basis cache: the model is identical across realizations without disorder
    const bool cacheable = !h || *h == 0.0;
    for (int L : c.sizes) {
        const WorkPlan plan = schedule(c, L);
        DenseContext ctx{c, L, subsystem_sizes_for(c, L), plan.positions, plan.times, {}, false, std::nullopt};
        ctx.kind = steady_kind(c, plan.times.front(), plan.times.back());
        for (auto m : c.metrics)
            if (m != MetricKind::TraceDistance && has(c.quantities, Quantity::Speed)) ctx.need_shifted = true;
        if (ctx.need_shifted)
            for (double t : ctx.times) ctx.shifted.push_back(t + c.speed_step);

        std::vector<Channel> channels;
        for (int la : ctx.block_sizes)
            for (auto m : c.metrics)
                for (auto q : c.quantities) channels.push_back({la, m, q});

        RowBuilder builder(c, scenario_tag(c, h), L, ctx.times);
        std::map<std::optional<int>, std::shared_ptr<const EigenBasis>> cache;
        bool spot_checked = false;

        for (int r : plan.realizations) {
            const ChainSpec spec = make_spec(c, L, h.value_or(0.0), r);
            const StateVector psi0 = make_state(c, L, r);
            std::shared_ptr<const EigenBasis> basis;
            const auto sector = spec.conserves_magnetization() ? definite_magnetization(psi0) : std::nullopt;
            if (cacheable && cache.count(sector)) {
                basis = cache[sector];
            } else {
                basis = std::make_shared<const EigenBasis>(diagonalize_for(spec, psi0));
                if (cacheable) cache[sector] = basis;
            }
            const Trajectory traj(basis, psi0);

            if (!spot_checked && ctx.positions.size() == 1 && c.positions == PositionMode::Auto) {
                // translation invariance of the skipped average, checked once
                const StateVector psi = traj.state(ctx.times.front());
                const int la = ctx.block_sizes.front();
                const double d = trace_distance(partial_trace(psi, Block{0, la}), partial_trace(psi, Block{1, la}));
                if (d > kPositionSpotTolerance)
                    throw Error("position spot check failed: RDMs at sites 0 and 1 differ by " + format_double(d));
                spot_checked = true;
            }

            std::vector<std::vector<std::vector<double>>> data;
            run_dense_realization(ctx, traj, psi0, channels, data);
            const double delta_h = traj.energy_fluctuation();
            for (std::size_t k = 0; k < channels.size(); ++k) {
                const auto& ch = channels[k];
                std::optional<double> normalizer;
                if (ch.quantity == Quantity::Speed && ch.metric != MetricKind::RelativeDistance) normalizer = delta_h;
                builder.add(ch, r, reduce_channel(data[k]), normalizer);
            }
            for (auto m : c.metrics)
                for (auto q : c.quantities)
                    if (auto full = full_system_values(ctx, traj, psi0, m, q)) {
                        std::optional<double> normalizer;
                        if (q == Quantity::Speed) normalizer = delta_h;
                        builder.add({L, m, q}, r, std::move(*full), normalizer);
                    }
        }
        builder.emit(rows);
    }
}

// ---------------------------------------------------------------------------
// Free-fermion path

void run_gaussian(const ExperimentConfig& c, std::vector<ResultRow>& rows, bool& regularized) {
    const auto& p = c.parameters;
    GaussianMetricOptions options;
    options.relative_entropy.support_cutoff = c.relative_entropy_cutoff;
    for (int L : c.sizes) {
        const WorkPlan plan = schedule(c, L);
        const QuenchDynamics dynamics(QuenchSpec{p.h0, p.h1, L});
        const MajoranaCovariance gge = dynamics.gge();
        const auto block_sizes = subsystem_sizes_for(c, L);
        const double t_star = p.t_star * L;

        // extra sample at t* appended after the window grid
        std::vector<double> times = plan.times;
        times.push_back(t_star);
        const int nt = static_cast<int>(times.size());
        const int nb = static_cast<int>(block_sizes.size());
        const int nm = static_cast<int>(c.metrics.size());
        const int nq = static_cast<int>(c.quantities.size());
        const auto slot = [&](int t, int b, int m, int q) {
            return static_cast<std::size_t>(((t * nb + b) * nm + m) * nq + q);
        };
        std::vector<double> values(static_cast<std::size_t>(nt * nb * nm * nq), 0.0);
        std::vector<char> flags(static_cast<std::size_t>(nt), 0);

        parallel_for(nt, c.workers, [&](int t) {
            const MajoranaCovariance now = dynamics.covariance(times[static_cast<std::size_t>(t)]);
            for (int b = 0; b < nb; ++b) {
                const Block block{0, block_sizes[static_cast<std::size_t>(b)]};
                const auto g_now = block_covariance(now, block);
                for (int m = 0; m < nm; ++m) {
                    const auto metric = c.metrics[static_cast<std::size_t>(m)];
                    for (int q = 0; q < nq; ++q) {
                        GaussianMetricValue v;
                        switch (c.quantities[static_cast<std::size_t>(q)]) {
                            case Quantity::Steady:
                                v = gaussian_metric(g_now, block_covariance(gge, block), metric, options);
                                break;
                            case Quantity::Initial:
                                v = gaussian_metric(g_now, block_covariance(dynamics.initial(), block), metric, options);
                                break;
                            case Quantity::Speed:
                                v = gaussian_speed_fd(dynamics, block, times[static_cast<std::size_t>(t)],
                                                      c.speed_step, metric, options);
                                break;
                        }
                        values[slot(t, b, m, q)] = v.value;
                        if (v.regularized) flags[static_cast<std::size_t>(t)] = 1;
                    }
                }
            }
        });
        if (std::any_of(flags.begin(), flags.end(), [](char f) { return f != 0; })) {
            regularized = true;
            log_message("L=" + std::to_string(L) + ": Gaussian metric regularized (singular 1 + G1 G2)");
        }

        const std::string tag = scenario_tag(c, std::nullopt);
        const std::string seed = std::to_string(c.base_seed);
        const std::string window = window_label(plan.times.front(), plan.times.back());
        const int nw = nt - 1;
        for (int b = 0; b < nb; ++b) {
            const int la = block_sizes[static_cast<std::size_t>(b)];
            const double x = static_cast<double>(la) / L;
            for (int m = 0; m < nm; ++m)
                for (int q = 0; q < nq; ++q) {
                    const std::string label =
                        row_label(c.metrics[static_cast<std::size_t>(m)], c.quantities[static_cast<std::size_t>(q)]);
                    double mean = 0.0;
                    for (int t = 0; t < nw; ++t) mean += values[slot(t, b, m, q)];
                    mean /= nw;
                    rows.push_back({tag, L, la, x, window, label, mean, std::nullopt, std::nullopt, seed});
                    rows.push_back({tag, L, la, x, format_double(t_star), label, values[slot(nw, b, m, q)],
                                    std::nullopt, std::nullopt, seed});
                    if (c.emit_time_series)
                        for (int t = 0; t < nw; ++t)
                            rows.push_back({tag, L, la, x, format_double(times[static_cast<std::size_t>(t)]),
                                            label + "(t)", values[slot(t, b, m, q)], std::nullopt, std::nullopt,
                                            seed});
                }
        }
    }
}

}  // namespace

// ---------------------------------------------------------------------------

std::string row_label(MetricKind metric, Quantity quantity) {
    switch (quantity) {
        case Quantity::Speed: return speed_symbol(metric);
        case Quantity::Steady: return metric_symbol(metric) + "_ss";
        case Quantity::Initial: return metric_symbol(metric) + "_ini";
    }
    return "?";
}

std::string scenario_tag(const ExperimentConfig& config, std::optional<double> disorder_strength) {
    std::string tag(to_string(config.scenario));
    if (disorder_strength) tag += "@h=" + format_double(*disorder_strength);
    return tag;
}

std::vector<int> positions_for(const ExperimentConfig& config, int num_sites) {
    bool single = config.positions == PositionMode::First;
    if (config.positions == PositionMode::Auto)
        single = is_gaussian(config.scenario) || (translation_invariant_model(config) && uniform_product(config));
    if (single) return {0};
    std::vector<int> all(static_cast<std::size_t>(num_sites));
    std::iota(all.begin(), all.end(), 0);
    return all;
}

WorkPlan schedule(const ExperimentConfig& config, int num_sites) {
    validate(config);
    WorkPlan plan;
    plan.num_sites = num_sites;
    for (int r = 0; r < config.realizations; ++r) plan.realizations.push_back(config.first_realization + r);
    plan.positions = positions_for(config, num_sites);
    plan.times = uniform_grid(config.window.start_time(num_sites), config.window.end_time(num_sites),
                              config.window.samples);
    plan.tasks.reserve(plan.realizations.size() * plan.positions.size() * plan.times.size());
    for (int r : plan.realizations)
        for (int p : plan.positions)
            for (int t = 0; t < static_cast<int>(plan.times.size()); ++t) plan.tasks.push_back({r, p, t});
    return plan;
}

void parallel_for(int count, int workers, const std::function<void(int)>& body) {
    if (count <= 0) return;
    const int n = std::max(1, std::min(workers, count));
    if (n == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex error_mutex;
    int error_index = count;
    std::exception_ptr error;
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> threads;
    for (int k = 1; k < n; ++k) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

SweepResult run_scenario(const ExperimentConfig& config) {
    validate(config);
    SweepResult result;
    result.config = config;
    if (is_gaussian(config.scenario)) {
        run_gaussian(config, result.rows, result.regularized);
    } else {
        check_dense_resources(config);
        if (is_disordered(config.scenario))
            for (double h : config.disorder_strengths) run_dense(config, h, result.rows);
        else
            run_dense(config, std::nullopt, result.rows);
    }
    if (result.rows.empty()) throw Error("scenario produced no rows");
    return result;
}

}  // namespace relax
