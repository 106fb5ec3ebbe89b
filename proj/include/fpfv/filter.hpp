#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fpfv/density.hpp"
#include "fpfv/transition.hpp"
#include "fpfv/velocity.hpp"

namespace fpfv {

struct ObservationModel {
    std::function<double(double z, const Point& x)> log_likelihood;
    std::string description;
};

/// z ~ N(|x_1|, sigma^2). Carries no information about the sign of x_1.
ObservationModel gaussian_abs_position_model(double sigma);

struct Observation {
    double time = 0.0;
    double value = 0.0;
};

/// Observations with strictly increasing, positive times.
class ObservationSequence {
public:
    ObservationSequence() = default;
    explicit ObservationSequence(std::vector<Observation> items);

    const std::vector<Observation>& items() const noexcept { return items_; }
    bool empty() const noexcept { return items_.empty(); }
    std::size_t size() const noexcept { return items_.size(); }

private:
    std::vector<Observation> items_;
};

struct HistoryRecord {
    double time = 0.0;
    std::vector<double> mean;
    std::vector<double> stddev;
    int mode_count = 0;  // modes of the axis-0 marginal
    double log_evidence = 0.0;
};

struct FilterState {
    Density posterior;
    double time = 0.0;
    double origin = 0.0;         // time of the initial density
    std::size_t step_index = 0;  // completed operator steps since `origin`
    double log_evidence = 0.0;
    std::vector<HistoryRecord> history;
};

/// Prominence used for the mode counts stored in the history.
inline constexpr double kHistoryModeProminence = 0.1;

FilterState make_filter_state(Density prior, double time = 0.0);

HistoryRecord summarize(const Density& density, double time, double log_evidence);

/// Evolves the posterior by floor((t_target - time) / dt) steps and appends a
/// history record after every step.
FilterState predict(FilterState state, const TransitionOperator& op, double t_target);

/// Multiplies by the likelihood at cell midpoints, accumulates the log
/// evidence and renormalises. Replaces the history record at the current time.
/// Throws ZeroEvidence when no posterior mass survives.
FilterState bayes_update(FilterState state, const ObservationModel& model, double z);

/// Where an observation or output time landed on the step lattice.
struct TimeSnap {
    double requested = 0.0;
    double snapped = 0.0;
    std::size_t step = 0;
};

/// Nearest multiple of dt.
TimeSnap snap_to_steps(double t, double dt);

struct FilterRun {
    FilterState state;
    std::vector<TimeSnap> observation_snaps;
    /// Posterior at each requested snapshot time (snapped like observations);
    /// taken after the Bayes update when an observation shares the step.
    std::vector<std::pair<TimeSnap, Density>> snapshots;
};

/// Alternates predict and bayes_update over the observation sequence, then
/// predicts to t_end.
FilterRun run_filter(const Density& prior, const TransitionOperator& op, const ObservationModel& model,
                     const ObservationSequence& obs, double t_end, const std::vector<double>& snapshot_times = {});

struct TruthOptions {
    double max_step = 1e-3;
    /// Wraps periodic axes of this grid's box after every reported state.
    const Grid* wrap = nullptr;
};

/// Classical RK4 trajectory, states reported at `times`.
std::vector<Point> simulate_truth(const VelocityField& field, const Point& x0, const std::vector<double>& times,
                                  TruthOptions options = {});

/// z_k = |x_1(t_k)| + sigma * N(0, 1), deterministic in `seed`.
ObservationSequence synthesize_observations(const std::vector<Point>& truth, const std::vector<double>& times,
                                            double sigma, std::uint64_t seed);

}  // namespace fpfv
