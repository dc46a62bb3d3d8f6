#pragma once

#include <optional>
#include <span>
#include <vector>

#include "polis/round_log.hpp"
#include "polis/types.hpp"

namespace polis::diagnostics {

/// Per-round, per-topic values; row t-1 holds round t.
using TopicSeries = std::vector<std::vector<double>>;

/// Largest value among topics other than `true_topic`.
double max_other(std::span<const double> row, TopicId true_topic);

/// True iff some false topic reaches lockin_threshold within the first
/// early_window rounds and the final true-topic support stays below it.
/// Throws std::invalid_argument if the trajectory is shorter than the window.
bool early_lockin(const TopicSeries& support, TopicId true_topic, const DiagnosticsParams& params);

/// Population variance of final true-topic support across replicates.
/// Throws std::invalid_argument for fewer than two replicates.
double path_dependence(std::span<const double> final_supports);

struct CorrectionLag {
    std::optional<int> evidence_round;  // t*, 1-based
    std::optional<int> lag;             // absent when censored
    double normalized = 1.0;            // lag / (T - t*), 1 when censored

    bool censored() const { return !lag.has_value(); }
};

/// t* is the first round where evidence for the true topic exceeds every
/// false topic by more than correction_margin; the lag counts rounds from t*
/// to the first round at or after it with true support >= lockin_threshold.
CorrectionLag correction_lag(const TopicSeries& support, const TopicSeries& evidence, TopicId true_topic,
                             const DiagnosticsParams& params);

/// Sum of squared influence shares, w_i / sum(w), for one round. Takes raw
/// weights; throws std::invalid_argument for a negative weight or a total
/// that is not positive and finite.
double herfindahl(std::span<const double> weights);

/// Time average of herfindahl() over rounds.
double influence_concentration(const std::vector<std::vector<double>>& weight_snapshots);

struct ContourPoint {
    double axis1 = 0.0;
    double axis2 = 0.0;
};
using Polyline = std::vector<ContourPoint>;

/// Marching squares on grid[i][j] (i along axis1, j along axis2) at `level`,
/// with linear interpolation along cell edges. Segments are joined into
/// polylines; closed loops repeat their first point at the end. Saddle cells
/// are split according to the mean of their corners.
std::vector<Polyline> failure_boundary(const std::vector<std::vector<double>>& grid,
                                       std::span<const double> axis1_values, std::span<const double> axis2_values,
                                       double level);

struct TrialSummary {
    double final_true_support = 0.0;
    bool lockin = false;
    CorrectionLag lag;
    double herfindahl_mean = 0.0;
};

/// Recomputes every per-trial diagnostic from the logs alone. Under NG the
/// correction evidence is progress instead of the (absent) social signal.
/// When the run is shorter than early_window the lock-in window is cut to
/// the run length.
TrialSummary summarize_trial(std::span<const RoundLog> logs, TopicId true_topic, Mechanism mechanism,
                             const DiagnosticsParams& params);

}  // namespace polis::diagnostics
