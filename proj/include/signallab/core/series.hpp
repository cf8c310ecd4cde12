#pragma once

#include <optional>
#include <string>
#include <vector>

#include "signallab/core/date.hpp"
#include "signallab/core/error.hpp"

namespace signallab {

/// Week-indexed series over consecutive Monday-start weeks. A disengaged
/// value marks a week with no observation; zero is an observed zero.
struct WeeklySeries {
    Week start;
    std::vector<std::optional<double>> values;
    std::string label;

    std::size_t size() const { return values.size(); }
    Week week_at(std::size_t i) const { return start + static_cast<std::int64_t>(i); }
    Week end() const { return start + static_cast<std::int64_t>(values.size()); } // exclusive

    bool contains(Week w) const { return w >= start && w < end(); }

    std::optional<double>& at_week(Week w) { return values.at(static_cast<std::size_t>(w.index - start.index)); }
    const std::optional<double>& at_week(Week w) const {
        return values.at(static_cast<std::size_t>(w.index - start.index));
    }

    std::size_t n_present() const {
        std::size_t n = 0;
        for (const auto& v : values)
            if (v) ++n;
        return n;
    }

    /// [first, last] positions of the longest run without missing values;
    /// empty series or all-missing gives length 0.
    struct Run {
        std::size_t first = 0;
        std::size_t length = 0;
    };
    Run longest_contiguous_run() const {
        Run best, cur;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i]) {
                if (cur.length == 0) cur.first = i;
                ++cur.length;
                if (cur.length > best.length) best = cur;
            } else {
                cur.length = 0;
            }
        }
        return best;
    }
};

/// Extracts the values of the longest contiguous non-missing run.
inline std::vector<double> longest_run_values(const WeeklySeries& s) {
    auto run = s.longest_contiguous_run();
    std::vector<double> out;
    out.reserve(run.length);
    for (std::size_t i = run.first; i < run.first + run.length; ++i) out.push_back(*s.values[i]);
    return out;
}

} // namespace signallab
