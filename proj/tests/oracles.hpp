#pragma once

// Straightforward reimplementations used to cross-check the library.

#include <cmath>
#include <optional>
#include <vector>

namespace oracle {

using Series = std::vector<std::vector<double>>;

inline bool early_lockin(const Series& s, std::size_t true_topic, double tau, int window) {
    bool hit = false;
    for (int t = 0; t < window; ++t) {
        for (std::size_t k = 0; k < s[t].size(); ++k) {
            if (k != true_topic && s[t][k] >= tau) hit = true;
        }
    }
    return hit && !(s[s.size() - 1][true_topic] >= tau);
}

inline double path_dependence(const std::vector<double>& x) {
    long double mean = 0;
    for (double v : x) mean += v;
    mean /= x.size();
    long double ss = 0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return static_cast<double>(ss / x.size());
}

struct Lag {
    std::optional<int> star;  // 1-based
    std::optional<int> lag;
    double normalized;
};

inline Lag correction_lag(const Series& support, const Series& evidence, std::size_t true_topic, double tau,
                          double delta) {
    const int T = static_cast<int>(support.size());
    Lag out{std::nullopt, std::nullopt, 1.0};
    for (int t = 1; t <= T; ++t) {
        double best_false = -INFINITY;
        for (std::size_t k = 0; k < evidence[t - 1].size(); ++k) {
            if (k != true_topic && evidence[t - 1][k] > best_false) best_false = evidence[t - 1][k];
        }
        if (evidence[t - 1][true_topic] - best_false > delta) {
            out.star = t;
            break;
        }
    }
    if (!out.star) return out;
    for (int t = *out.star; t <= T; ++t) {
        if (support[t - 1][true_topic] >= tau) {
            out.lag = t - *out.star;
            out.normalized = T == *out.star ? 0.0 : static_cast<double>(*out.lag) / (T - *out.star);
            return out;
        }
    }
    return out;
}

inline double influence_concentration(const Series& w) {
    double acc = 0;
    for (const auto& row : w) {
        double h = 0;
        for (double x : row) h += x * x;
        acc += h;
    }
    return acc / w.size();
}

}  // namespace oracle
