#include "polis/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>

namespace polis::diagnostics {

double max_other(std::span<const double> row, TopicId true_topic) {
    double best = -std::numeric_limits<double>::infinity();
    for (TopicId k = 0; k < row.size(); ++k) {
        if (k != true_topic) {
            best = std::max(best, row[k]);
        }
    }
    return best;
}

bool early_lockin(const TopicSeries& support, TopicId true_topic, const DiagnosticsParams& params) {
    const auto window = static_cast<std::size_t>(params.early_window);
    if (support.size() < window) {
        throw std::invalid_argument("early_lockin: trajectory has " + std::to_string(support.size()) +
                                    " rounds, shorter than the early window of " + std::to_string(window));
    }
    bool false_hit = false;
    for (std::size_t t = 0; t < window && !false_hit; ++t) {
        false_hit = max_other(support[t], true_topic) >= params.lockin_threshold;
    }
    return false_hit && support.back()[true_topic] < params.lockin_threshold;
}

double path_dependence(std::span<const double> final_supports) {
    if (final_supports.size() < 2) {
        throw std::invalid_argument("path_dependence: needs at least two replicates");
    }
    // Welford update.
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    for (double x : final_supports) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    return m2 / static_cast<double>(n);
}

CorrectionLag correction_lag(const TopicSeries& support, const TopicSeries& evidence, TopicId true_topic,
                             const DiagnosticsParams& params) {
    CorrectionLag out;
    const std::size_t rounds = std::min(support.size(), evidence.size());
    std::optional<std::size_t> star;
    for (std::size_t t = 0; t < rounds; ++t) {
        if (evidence[t][true_topic] - max_other(evidence[t], true_topic) > params.correction_margin) {
            star = t;
            break;
        }
    }
    if (!star) {
        return out;
    }
    out.evidence_round = static_cast<int>(*star) + 1;
    for (std::size_t t = *star; t < rounds; ++t) {
        if (support[t][true_topic] >= params.lockin_threshold) {
            const int lag = static_cast<int>(t - *star);
            const auto span = static_cast<double>(rounds - 1 - *star);
            out.lag = lag;
            out.normalized = span > 0.0 ? static_cast<double>(lag) / span : 0.0;
            return out;
        }
    }
    return out;
}

double herfindahl(std::span<const double> weights) {
    double total = 0.0;
    double sum_sq = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) {
            throw std::invalid_argument("herfindahl: negative or non-finite weight");
        }
        total += w;
        sum_sq += w * w;
    }
    if (!(total > 0.0) || !std::isfinite(sum_sq)) {
        throw std::invalid_argument("herfindahl: weights must have a positive finite total");
    }
    // Sum of squared shares without normalising first, so equal integer
    // weights give exactly 1/N.
    return sum_sq / (total * total);
}

double influence_concentration(const std::vector<std::vector<double>>& weight_snapshots) {
    if (weight_snapshots.empty()) {
        throw std::invalid_argument("influence_concentration: no rounds");
    }
    double total = 0.0;
    for (const auto& snapshot : weight_snapshots) {
        total += herfindahl(snapshot);
    }
    return total / static_cast<double>(weight_snapshots.size());
}

namespace {

// Edge identity in the grid: (row, col, orientation). Orientation 0 joins
// (i, j)-(i, j+1); orientation 1 joins (i, j)-(i+1, j).
using EdgeKey = std::tuple<std::size_t, std::size_t, int>;

}  // namespace

std::vector<Polyline> failure_boundary(const std::vector<std::vector<double>>& grid,
                                       std::span<const double> axis1_values, std::span<const double> axis2_values,
                                       double level) {
    const std::size_t rows = grid.size();
    const std::size_t cols = rows ? grid.front().size() : 0;
    if (axis1_values.size() != rows || axis2_values.size() != cols) {
        throw std::invalid_argument("failure_boundary: axis values do not match the grid shape");
    }
    for (const auto& row : grid) {
        if (row.size() != cols) {
            throw std::invalid_argument("failure_boundary: ragged grid");
        }
    }

    std::map<EdgeKey, ContourPoint> points;
    std::map<EdgeKey, std::vector<EdgeKey>> links;

    auto above = [&](std::size_t i, std::size_t j) { return grid[i][j] >= level; };
    auto edge_point = [&](const EdgeKey& key) {
        const auto [i, j, orient] = key;
        const std::size_t i2 = orient == 1 ? i + 1 : i;
        const std::size_t j2 = orient == 0 ? j + 1 : j;
        const double v0 = grid[i][j];
        const double v1 = grid[i2][j2];
        const double t = (level - v0) / (v1 - v0);
        return ContourPoint{axis1_values[i] + t * (axis1_values[i2] - axis1_values[i]),
                            axis2_values[j] + t * (axis2_values[j2] - axis2_values[j])};
    };
    auto link = [&](const EdgeKey& a, const EdgeKey& b) {
        points.emplace(a, edge_point(a));
        points.emplace(b, edge_point(b));
        links[a].push_back(b);
        links[b].push_back(a);
    };

    for (std::size_t i = 0; i + 1 < rows; ++i) {
        for (std::size_t j = 0; j + 1 < cols; ++j) {
            // Corners in cyclic order and the edge between consecutive corners.
            const std::array<bool, 4> c = {above(i, j), above(i, j + 1), above(i + 1, j + 1), above(i + 1, j)};
            const std::array<EdgeKey, 4> e = {EdgeKey{i, j, 0}, EdgeKey{i, j + 1, 1}, EdgeKey{i + 1, j, 0},
                                              EdgeKey{i, j, 1}};
            std::vector<int> crossing;
            for (int s = 0; s < 4; ++s) {
                if (c[s] != c[(s + 1) % 4]) {
                    crossing.push_back(s);
                }
            }
            if (crossing.size() == 2) {
                link(e[crossing[0]], e[crossing[1]]);
            } else if (crossing.size() == 4) {
                const double centre = 0.25 * (grid[i][j] + grid[i][j + 1] + grid[i + 1][j + 1] + grid[i + 1][j]);
                if ((centre >= level) == c[0]) {
                    // Corners 0 and 2 connect through the centre; cut off 1 and 3.
                    link(e[0], e[1]);
                    link(e[2], e[3]);
                } else {
                    link(e[3], e[0]);
                    link(e[1], e[2]);
                }
            }
        }
    }

    std::vector<Polyline> out;
    std::set<EdgeKey> visited;
    auto walk = [&](const EdgeKey& start) {
        Polyline line;
        EdgeKey cur = start;
        while (true) {
            visited.insert(cur);
            line.push_back(points.at(cur));
            std::optional<EdgeKey> next;
            for (const auto& n : links.at(cur)) {
                if (!visited.count(n)) {
                    next = n;
                    break;
                }
            }
            if (!next) {
                break;
            }
            cur = *next;
        }
        const auto& tail = links.at(cur);
        if (line.size() > 2 && std::find(tail.begin(), tail.end(), start) != tail.end()) {
            line.push_back(points.at(start));
        }
        out.push_back(std::move(line));
    };
    for (const auto& [key, neighbours] : links) {
        if (neighbours.size() == 1 && !visited.count(key)) {
            walk(key);
        }
    }
    for (const auto& [key, neighbours] : links) {
        if (!visited.count(key)) {
            walk(key);
        }
    }
    return out;
}

TrialSummary summarize_trial(std::span<const RoundLog> logs, TopicId true_topic, Mechanism mechanism,
                             const DiagnosticsParams& params) {
    if (logs.empty()) {
        throw std::invalid_argument("summarize_trial: no rounds");
    }
    TopicSeries support;
    TopicSeries evidence;
    std::vector<std::vector<double>> weights;
    support.reserve(logs.size());
    evidence.reserve(logs.size());
    weights.reserve(logs.size());
    for (const auto& log : logs) {
        std::vector<double> s;
        std::vector<double> ev;
        for (const auto& topic : log.topics) {
            s.push_back(topic.support);
            ev.push_back(mechanism == Mechanism::NG ? topic.progress : topic.social_signal);
        }
        support.push_back(std::move(s));
        evidence.push_back(std::move(ev));
        std::vector<double> w;
        w.reserve(log.agents.size());
        for (const auto& a : log.agents) {
            w.push_back(a.weight);
        }
        weights.push_back(std::move(w));
    }
    DiagnosticsParams window = params;
    window.early_window = std::min<int>(params.early_window, static_cast<int>(logs.size()));

    TrialSummary out;
    out.final_true_support = support.back()[true_topic];
    out.lockin = early_lockin(support, true_topic, window);
    out.lag = correction_lag(support, evidence, true_topic, params);
    out.herfindahl_mean = influence_concentration(weights);
    return out;
}

}  // namespace polis::diagnostics
