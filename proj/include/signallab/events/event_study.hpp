#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "signallab/core/csv.hpp"
#include "signallab/core/error.hpp"
#include "signallab/core/format.hpp"
#include "signallab/core/series.hpp"
#include "signallab/ingest/records.hpp"
#include "signallab/tsa/dist.hpp"

namespace signallab::events {

struct EventStudyConfig {
    double q = 0.90;          // peak = top (1-q) share of weeks
    int w = 3;                // event window covers tau in [0..w]
    int L = 6;                // estimation window covers [e-L..e-1]
    bool merge_adjacent = true;
    bool one_sided = true;    // H1: sales increase after the event
};

struct Event {
    std::size_t week = 0;  // index into the weekly series
    double tweet_value = 0.0;
    bool usable = true;
    std::string exclusion_reason;
};

/// Top-k weeks by tweet count, k = max(1, floor((1-q)*n)); ties go to the
/// earlier week. With merge_adjacent, a run of consecutive selected weeks
/// becomes one event at the run's first week.
inline std::vector<Event> detect_peak_weeks(const WeeklySeries& tweets, double q,
                                            bool merge_adjacent = true) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("detect_peak_weeks: q must be in (0,1)");
    const std::size_t n = tweets.size();
    if (n < 2) throw std::invalid_argument("detect_peak_weeks: need at least 2 weeks");

    std::vector<std::pair<double, std::size_t>> ranked;  // (value, week)
    for (std::size_t i = 0; i < n; ++i) ranked.emplace_back(tweets.values[i].value_or(0.0), i);
    const bool all_equal = std::all_of(ranked.begin(), ranked.end(), [&](const auto& v) {
        return v.first == ranked.front().first;
    });
    if (all_equal) throw degenerate_error("no peaks distinguishable");

    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    const std::size_t k = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor((1.0 - q) * static_cast<double>(n))));

    std::vector<std::size_t> weeks;
    for (std::size_t i = 0; i < k; ++i) weeks.push_back(ranked[i].second);
    std::sort(weeks.begin(), weeks.end());

    std::vector<Event> events;
    for (std::size_t i = 0; i < weeks.size(); ++i) {
        if (merge_adjacent && !events.empty() && weeks[i] == weeks[i - 1] + 1) continue;
        Event e;
        e.week = weeks[i];
        e.tweet_value = tweets.values[weeks[i]].value_or(0.0);
        events.push_back(e);
    }
    if (!merge_adjacent) {
        events.clear();
        for (std::size_t wk : weeks)
            events.push_back({wk, tweets.values[wk].value_or(0.0), true, {}});
    }
    return events;
}

struct EventStudyResult {
    std::vector<Event> events;           // all, with usability filled in
    std::vector<std::vector<double>> ar; // per usable event, tau in [0..w]
    std::vector<double> car;             // per usable event
    double mean_car = 0.0;
    double sd_car = 0.0;
    double t_statistic = std::numeric_limits<double>::quiet_NaN();
    double p_value = std::numeric_limits<double>::quiet_NaN();
    std::size_t n_usable = 0;
    bool uniform_effect = false;  // sd(CAR)=0 with nonzero mean
    std::size_t n_contaminated = 0;  // usable events whose estimation window
                                     // overlaps another event's window
    Week series_start{0};
    int w = 0;
};

/// Abnormal sales around each event: normal level N_e is the mean of the L
/// weeks before the event, AR[tau] = sales[e+tau] - N_e, CAR their sum.
/// The t-statistic is mean(CAR)*sqrt(n)/sd(CAR) with sample sd and
/// n_usable-1 degrees of freedom. All-equal CARs with nonzero mean report
/// as a uniform effect instead of a t-test.
inline EventStudyResult event_study(const WeeklySeries& sales, const std::vector<Event>& events,
                                    const EventStudyConfig& cfg = {}) {
    if (cfg.w < 0) throw std::invalid_argument("event_study: negative event window");
    if (cfg.L < 1) throw std::invalid_argument("event_study: estimation window must be >= 1");
    const std::size_t n = sales.size();

    EventStudyResult res;
    res.series_start = sales.start;
    res.w = cfg.w;
    res.events = events;
    for (auto& e : res.events) {
        e.usable = true;
        e.exclusion_reason.clear();
        if (e.week < static_cast<std::size_t>(cfg.L)) {
            e.usable = false;
            e.exclusion_reason = "estimation window out of range";
        } else if (e.week + static_cast<std::size_t>(cfg.w) >= n) {
            e.usable = false;
            e.exclusion_reason = "event window out of range";
        } else {
            for (std::size_t i = e.week - static_cast<std::size_t>(cfg.L);
                 i <= e.week + static_cast<std::size_t>(cfg.w); ++i)
                if (!sales.values[i]) {
                    e.usable = false;
                    e.exclusion_reason = "missing sales in window";
                    break;
                }
        }
    }

    for (const auto& e : res.events) {
        if (!e.usable) continue;
        double normal = 0.0;
        for (std::size_t i = e.week - static_cast<std::size_t>(cfg.L); i < e.week; ++i)
            normal += *sales.values[i];
        normal /= static_cast<double>(cfg.L);
        std::vector<double> ar(static_cast<std::size_t>(cfg.w) + 1);
        double car = 0.0;
        for (int tau = 0; tau <= cfg.w; ++tau) {
            ar[static_cast<std::size_t>(tau)] =
                *sales.values[e.week + static_cast<std::size_t>(tau)] - normal;
            car += ar[static_cast<std::size_t>(tau)];
        }
        res.ar.push_back(std::move(ar));
        res.car.push_back(car);
    }
    res.n_usable = res.car.size();
    if (res.n_usable < 2) throw degenerate_error("insufficient events");

    // An estimation window touched by another event's [f .. f+w] weeks
    // measures contaminated "normal" sales; count, do not exclude.
    for (const auto& e : res.events) {
        if (!e.usable) continue;
        const std::size_t est_lo = e.week - static_cast<std::size_t>(cfg.L);
        for (const auto& f : res.events) {
            if (&f == &e) continue;
            const std::size_t win_lo = f.week;
            const std::size_t win_hi = f.week + static_cast<std::size_t>(cfg.w);
            if (win_lo < e.week && win_hi >= est_lo) {
                ++res.n_contaminated;
                break;
            }
        }
    }

    const double dn = static_cast<double>(res.n_usable);
    for (double c : res.car) res.mean_car += c;
    res.mean_car /= dn;
    double ss = 0.0;
    for (double c : res.car) ss += (c - res.mean_car) * (c - res.mean_car);
    res.sd_car = std::sqrt(ss / (dn - 1.0));

    if (res.sd_car == 0.0) {
        if (res.mean_car == 0.0) throw degenerate_error("degenerate CARs");
        res.uniform_effect = true;
        return res;
    }
    res.t_statistic = res.mean_car * std::sqrt(dn) / res.sd_car;
    const double df = dn - 1.0;
    res.p_value = cfg.one_sided ? tsa::t_sf(res.t_statistic, df)
                                : tsa::t_two_sided_p(res.t_statistic, df);
    return res;
}

inline nlohmann::json event_study_report(const EventStudyResult& res, const EventStudyConfig& cfg,
                                         const std::string& manifest = {}) {
    nlohmann::json j;
    if (!manifest.empty()) j["manifest"] = manifest;
    j["config"] = {{"q", cfg.q},
                   {"w", cfg.w},
                   {"L", cfg.L},
                   {"merge_adjacent", cfg.merge_adjacent},
                   {"one_sided", cfg.one_sided}};
    nlohmann::json evs = nlohmann::json::array();
    std::size_t usable_i = 0;
    for (const auto& e : res.events) {
        nlohmann::json je;
        je["week"] = e.week;
        je["week_start"] = format_date((res.series_start + static_cast<std::int64_t>(e.week)).monday());
        je["tweet_value"] = e.tweet_value;
        je["usable"] = e.usable;
        if (!e.usable) {
            je["reason"] = e.exclusion_reason;
        } else {
            je["ar"] = res.ar[usable_i];
            je["car"] = res.car[usable_i];
            ++usable_i;
        }
        evs.push_back(std::move(je));
    }
    j["events"] = std::move(evs);
    j["n_usable"] = res.n_usable;
    j["n_contaminated"] = res.n_contaminated;
    j["mean_car"] = res.mean_car;
    j["sd_car"] = res.sd_car;
    j["uniform_effect"] = res.uniform_effect;
    if (res.uniform_effect) {
        j["t"] = nullptr;
        j["p"] = nullptr;
    } else {
        j["t"] = res.t_statistic;
        j["p"] = res.p_value;
    }
    return j;
}

struct RobustnessCell {
    double q = 0.0;
    int w = 0;
    int L = 0;
    std::optional<double> t;
    std::optional<double> p;
    std::size_t n_usable = 0;
    bool significant = false;  // p < 0.05
    bool uniform_effect = false;
    std::string error;  // set when this cell could not be evaluated
};

/// Full (q, w, L) grid; failed cells carry their error and the sweep goes
/// on. Peaks are re-detected per q with the config's merge policy.
inline std::vector<RobustnessCell> robustness_sweep(const WeeklySeries& tweets,
                                                    const WeeklySeries& sales,
                                                    const std::vector<double>& q_set,
                                                    int w_min, int w_max, int l_min, int l_max,
                                                    bool merge_adjacent = true,
                                                    bool one_sided = true) {
    std::vector<RobustnessCell> cells;
    for (double q : q_set)
        for (int w = w_min; w <= w_max; ++w)
            for (int L = l_min; L <= l_max; ++L) {
                RobustnessCell cell;
                cell.q = q;
                cell.w = w;
                cell.L = L;
                try {
                    const auto events = detect_peak_weeks(tweets, q, merge_adjacent);
                    EventStudyConfig cfg{q, w, L, merge_adjacent, one_sided};
                    const auto res = event_study(sales, events, cfg);
                    cell.n_usable = res.n_usable;
                    cell.uniform_effect = res.uniform_effect;
                    if (!res.uniform_effect) {
                        cell.t = res.t_statistic;
                        cell.p = res.p_value;
                        cell.significant = res.p_value < 0.05;
                    }
                } catch (const std::exception& e) {
                    cell.error = e.what();
                }
                cells.push_back(std::move(cell));
            }
    return cells;
}

/// CSV columns q,w,L,t,p,n_usable,significant; failed cells leave t and p
/// empty and carry the error in the significant column.
inline void write_robustness_csv(std::ostream& os, const std::vector<RobustnessCell>& cells,
                                 const std::string& comment = {}) {
    if (!comment.empty()) os << "# " << comment << '\n';
    write_csv_row(os, {"q", "w", "L", "t", "p", "n_usable", "significant"});
    for (const auto& cell : cells) {
        std::vector<std::string> fields{format_num(cell.q), std::to_string(cell.w),
                                        std::to_string(cell.L)};
        if (!cell.error.empty()) {
            fields.push_back("");
            fields.push_back("");
            fields.push_back("");
            fields.push_back("error: " + cell.error);
        } else if (cell.uniform_effect) {
            fields.push_back("");
            fields.push_back("");
            fields.push_back(std::to_string(cell.n_usable));
            fields.push_back("uniform_effect");
        } else {
            fields.push_back(format_num(*cell.t));
            fields.push_back(format_num(*cell.p));
            fields.push_back(std::to_string(cell.n_usable));
            fields.push_back(cell.significant ? "true" : "false");
        }
        write_csv_row(os, fields);
    }
}

struct ReachStats {
    double mean_followers_peak = 0.0;
    double mean_followers_normal = 0.0;
    std::optional<double> ratio;  // absent when the normal mean is zero
};

/// Weekly follower reach: per-week sum of followers over the supplied
/// tweets, averaged over peak weeks and over the rest. Weeks without
/// tweets count as zero reach.
inline ReachStats reach_stats(const std::vector<ingest::TweetRecord>& tweets, Date from, Date to,
                              const std::vector<std::size_t>& peak_weeks) {
    const Week first = Week::of_date(from);
    const Week last = Week::of_date(to);
    if (last < first) throw std::invalid_argument("reach_stats: range start after end");
    const std::size_t n = static_cast<std::size_t>(last.index - first.index + 1);

    std::vector<bool> is_peak(n, false);
    for (std::size_t wk : peak_weeks) {
        if (wk >= n) throw std::invalid_argument("reach_stats: peak week outside range");
        is_peak[wk] = true;
    }
    const std::size_t n_peak = static_cast<std::size_t>(
        std::count(is_peak.begin(), is_peak.end(), true));
    if (n_peak == 0) throw std::invalid_argument("reach_stats: no peak weeks");
    if (n_peak == n) throw std::invalid_argument("reach_stats: no comparison group");

    std::vector<double> reach(n, 0.0);
    for (const auto& t : tweets) {
        const Week w = t.created_at.week();
        if (w < first || w > last) continue;
        reach[static_cast<std::size_t>(w.index - first.index)] += static_cast<double>(t.followers);
    }
    ReachStats stats;
    for (std::size_t i = 0; i < n; ++i)
        (is_peak[i] ? stats.mean_followers_peak : stats.mean_followers_normal) += reach[i];
    stats.mean_followers_peak /= static_cast<double>(n_peak);
    stats.mean_followers_normal /= static_cast<double>(n - n_peak);
    if (stats.mean_followers_normal > 0.0)
        stats.ratio = stats.mean_followers_peak / stats.mean_followers_normal;
    return stats;
}

} // namespace signallab::events
