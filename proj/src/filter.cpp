#include "fpfv/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "fpfv/errors.hpp"
#include "fpfv/parallel.hpp"

namespace fpfv {

ObservationModel gaussian_abs_position_model(double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("observation noise sigma must be positive");
    const double log_norm = std::log(sigma * std::sqrt(2.0 * std::numbers::pi));
    ObservationModel model;
    model.log_likelihood = [sigma, log_norm](double z, const Point& x) {
        const double r = (z - std::abs(x[0])) / sigma;
        return -0.5 * r * r - log_norm;
    };
    model.description = "z ~ N(|x1|, " + std::to_string(sigma) + "^2)";
    return model;
}

ObservationSequence::ObservationSequence(std::vector<Observation> items) : items_(std::move(items)) {
    double last = 0.0;
    for (const auto& o : items_) {
        if (!std::isfinite(o.time) || !std::isfinite(o.value)) throw InvalidArgument("observation is not finite");
        if (!(o.time > last)) throw InvalidArgument("observation times must be positive and strictly increasing");
        last = o.time;
    }
}

HistoryRecord summarize(const Density& density, double time, double log_evidence) {
    const Moments m = moments(density);
    HistoryRecord r;
    r.time = time;
    r.mean = m.mean;
    for (std::size_t i = 0; i < m.mean.size(); ++i) r.stddev.push_back(m.stddev(i));
    r.mode_count = count_modes(marginal(density, 0), kHistoryModeProminence);
    r.log_evidence = log_evidence;
    return r;
}

FilterState make_filter_state(Density prior, double time) {
    FilterState state;
    state.time = time;
    state.origin = time;
    state.history.push_back(summarize(prior, time, 0.0));
    state.posterior = std::move(prior);
    return state;
}

namespace {

void advance(FilterState& state, const TransitionOperator& op, std::size_t steps) {
    for (std::size_t i = 0; i < steps; ++i) {
        state.posterior = step(op, state.posterior);
        ++state.step_index;
        state.time = state.origin + static_cast<double>(state.step_index) * op.dt();
        state.history.push_back(summarize(state.posterior, state.time, state.log_evidence));
    }
}

}  // namespace

FilterState predict(FilterState state, const TransitionOperator& op, double t_target) {
    const double span = t_target - state.time;
    if (span < -1e-12 * std::max(1.0, std::abs(t_target))) throw InvalidArgument("predict target lies in the past");
    advance(state, op, steps_until(std::max(0.0, span), op.dt()));
    return state;
}

FilterState bayes_update(FilterState state, const ObservationModel& model, double z) {
    const Density& prior = state.posterior;
    const Grid& grid = prior.grid();
    const std::size_t n = grid.cell_count();

    std::vector<double> loglik(n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) loglik[c] = model.log_likelihood(z, grid.midpoint(c));
    });
    double lmax = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c)
        if (prior[c] > 0.0 && std::isfinite(loglik[c])) lmax = std::max(lmax, loglik[c]);
    if (!std::isfinite(lmax)) throw ZeroEvidence("observation has zero likelihood wherever the prior has mass");

    std::vector<double> weighted(n);
    for (std::size_t c = 0; c < n; ++c) {
        const double w = std::isfinite(loglik[c]) ? std::exp(loglik[c] - lmax) : 0.0;
        weighted[c] = prior[c] * w;
    }
    const double scaled_evidence = grid.cell_measure() * deterministic_sum(weighted);
    if (!(scaled_evidence > 0.0) || !std::isfinite(scaled_evidence))
        throw ZeroEvidence("observation evidence underflows");

    for (double& w : weighted) w /= scaled_evidence;
    state.log_evidence += lmax + std::log(scaled_evidence);
    state.posterior = Density(prior.grid_ptr(), std::move(weighted));

    HistoryRecord record = summarize(state.posterior, state.time, state.log_evidence);
    if (!state.history.empty() && state.history.back().time == state.time) state.history.back() = std::move(record);
    else state.history.push_back(std::move(record));
    return state;
}

TimeSnap snap_to_steps(double t, double dt) {
    if (!(t >= 0.0)) throw InvalidArgument("time must be non-negative");
    TimeSnap s;
    s.requested = t;
    s.step = static_cast<std::size_t>(std::llround(t / dt));
    s.snapped = static_cast<double>(s.step) * dt;
    return s;
}

FilterRun run_filter(const Density& prior, const TransitionOperator& op, const ObservationModel& model,
                     const ObservationSequence& obs, double t_end, const std::vector<double>& snapshot_times) {
    const double mass = prior.mass();
    if (std::abs(mass - 1.0) > 1e-10) throw InvalidArgument("prior must have mass 1");
    if (!obs.empty() && obs.items().back().time > t_end) throw InvalidArgument("observation after t_end");
    for (double t : snapshot_times)
        if (t < 0.0 || t > t_end) throw InvalidArgument("snapshot time outside [0, t_end]");

    FilterRun run;
    run.state = make_filter_state(prior, 0.0);
    for (const auto& o : obs.items()) run.observation_snaps.push_back(snap_to_steps(o.time, op.dt()));
    std::vector<TimeSnap> snaps;
    for (double t : snapshot_times) snaps.push_back(snap_to_steps(t, op.dt()));
    const std::size_t end_step = steps_until(t_end, op.dt());

    std::set<std::size_t> events{end_step};
    for (const auto& s : run.observation_snaps) events.insert(s.step);
    for (const auto& s : snaps) events.insert(s.step);

    std::vector<std::optional<Density>> taken(snaps.size());
    std::size_t next_obs = 0;
    for (std::size_t event : events) {
        advance(run.state, op, event - run.state.step_index);
        while (next_obs < obs.size() && run.observation_snaps[next_obs].step == event) {
            run.state = bayes_update(std::move(run.state), model, obs.items()[next_obs].value);
            ++next_obs;
        }
        for (std::size_t i = 0; i < snaps.size(); ++i)
            if (snaps[i].step == event) taken[i] = run.state.posterior;
    }
    for (std::size_t i = 0; i < snaps.size(); ++i) run.snapshots.emplace_back(snaps[i], *taken[i]);
    return run;
}

namespace {

Point axpy(const Point& x, double a, const Point& k) {
    Point y = x;
    for (std::size_t i = 0; i < kMaxDim; ++i) y[i] += a * k[i];
    return y;
}

}  // namespace

std::vector<Point> simulate_truth(const VelocityField& field, const Point& x0, const std::vector<double>& times,
                                  TruthOptions options) {
    if (!(options.max_step > 0.0)) throw InvalidArgument("integration step must be positive");
    std::vector<Point> states;
    states.reserve(times.size());
    Point x = x0;
    double t = 0.0;
    for (double target : times) {
        if (target < t) throw InvalidArgument("truth times must be non-decreasing and start at or after 0");
        const double span = target - t;
        const auto n = static_cast<std::size_t>(std::ceil(span / options.max_step));
        const double h = n > 0 ? span / static_cast<double>(n) : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Point k1 = field.eval(x);
            const Point k2 = field.eval(axpy(x, 0.5 * h, k1));
            const Point k3 = field.eval(axpy(x, 0.5 * h, k2));
            const Point k4 = field.eval(axpy(x, h, k3));
            for (std::size_t j = 0; j < kMaxDim; ++j) x[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        t = target;
        Point reported = x;
        if (options.wrap) {
            const Grid& g = *options.wrap;
            for (std::size_t i = 0; i < g.dim(); ++i) {
                if (g.boundaries()[i] != Boundary::Periodic) continue;
                const double lo = g.domain().lower[i];
                const double width = g.domain().upper[i] - lo;
                reported[i] = lo + (reported[i] - lo) - width * std::floor((reported[i] - lo) / width);
            }
        }
        states.push_back(reported);
    }
    return states;
}

ObservationSequence synthesize_observations(const std::vector<Point>& truth, const std::vector<double>& times,
                                            double sigma, std::uint64_t seed) {
    if (truth.size() != times.size()) throw InvalidArgument("truth and times differ in length");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<Observation> items;
    items.reserve(truth.size());
    for (std::size_t k = 0; k < truth.size(); ++k) items.push_back({times[k], std::abs(truth[k][0]) + sigma * noise(gen)});
    return ObservationSequence(std::move(items));
}

}  // namespace fpfv
