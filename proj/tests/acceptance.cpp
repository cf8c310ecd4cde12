// Acceptance gate. Runs one check per release criterion and prints exactly
// one line for each, so the output doubles as the release checklist:
//
//     criterion 1 statistical-core-oracles   PASS
//
// The process exit code is the number of failed criteria. Criterion 9
// drives the installed command line binary; pass its path as argv[1]
// (default: the SIGNALLAB_CLI environment variable) and the name lexicon
// as argv[2] (default: SIGNALLAB_LEXICON).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "signallab/signallab.hpp"

#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace signallab;
using namespace testutil;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ------------------------------------------------- 1: statistical core --

Outcome criterion_oracles() {
    const auto t0 = Clock::now();
    int probes = 0;
    double worst = 0.0;
    auto probe = [&](double got, double want) {
        worst = std::max(worst, rel_err(got, want));
        ++probes;
    };

    Xoshiro256 rng(101);
    for (int c = 0; c < 8; ++c) {
        const std::size_t n = 20 + 5 * static_cast<std::size_t>(c);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = rng.uniform(-3.0, 3.0);
            y[i] = 0.4 * x[i] + rng.gaussian();
        }
        const double r = tsa::pearson(x, y);
        probe(r, oracle_pearson(x, y));
        const double df = static_cast<double>(n - 2);
        const double t = r * std::sqrt(df / (1.0 - r * r));
        probe(tsa::pearson_p_value(r, n), 2.0 * oracle_t_sf(std::fabs(t), df));
    }

    for (int c = 0; c < 6; ++c) {
        const std::size_t n = 25;
        std::vector<std::vector<double>> X(n, std::vector<double>(4));
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            X[i][0] = 1.0;
            for (std::size_t j = 1; j < 4; ++j) X[i][j] = rng.uniform(-2.0, 2.0);
            y[i] = 1.5 - X[i][1] + 0.25 * X[i][2] + rng.gaussian();
        }
        const tsa::OlsFit fit = tsa::ols_fit(y, X);
        const auto [beta, rss] = oracle_ols(y, X);
        for (std::size_t j = 0; j < 4; ++j)
            probe(fit.coefficients[j] - beta[j] + 1.0, 1.0);  // absolute on coefficients
        probe(fit.rss, rss);
    }

    for (const double nu : {1.0, 4.0, 29.0, 88.0})
        for (const double t : {0.7, 2.6}) probe(tsa::t_sf(t, nu), oracle_t_sf(t, nu));
    for (const auto& [d1, d2] : std::vector<std::pair<double, double>>{
             {1.0, 8.0}, {2.0, 40.0}, {4.0, 86.0}, {8.0, 30.0}})
        for (const double f : {0.6, 3.1}) probe(tsa::f_sf(f, d1, d2), oracle_f_sf(f, d1, d2));

    const double elapsed = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d probes, worst rel err %.2e, %.1fs", probes, worst, elapsed);
    return {probes >= 20 && worst <= 1e-6 && elapsed < 5.0, buf};
}

// -------------------------------------------------- 2: ADF calibration --

Outcome criterion_adf() {
    const auto t0 = Clock::now();
    const int n_seeds = 200;
    int rw_rejects = 0, wn_rejects = 0;
    for (int seed = 0; seed < n_seeds; ++seed) {
        Xoshiro256 rng(9000 + static_cast<std::uint64_t>(seed));
        std::vector<double> rw(91), wn(91);
        double level = 0.0;
        for (std::size_t t = 0; t < 91; ++t) {
            level += rng.gaussian();
            rw[t] = level;
            wn[t] = rng.gaussian();
        }
        if (tsa::adf_test(make_series(rw), 1).reject_5pct) ++rw_rejects;
        if (tsa::adf_test(make_series(wn), 1).reject_5pct) ++wn_rejects;
    }
    const double elapsed = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "random walk %d/200 rejected, white noise %d/200, %.1fs",
                  rw_rejects, wn_rejects, elapsed);
    return {rw_rejects <= 20 && wn_rejects >= 180 && elapsed < 30.0, buf};
}

// ------------------------------------------------ 3: Granger power/size --

Outcome criterion_granger() {
    const auto t0 = Clock::now();
    int power_hits = 0;
    for (int seed = 0; seed < 100; ++seed) {
        Xoshiro256 rng(3000 + static_cast<std::uint64_t>(seed));
        std::vector<double> x(91), y(91);
        for (std::size_t t = 0; t < 91; ++t) {
            x[t] = rng.gaussian();
            y[t] = (t >= 2 ? 0.8 * x[t - 2] : 0.0) + rng.gaussian();
        }
        const auto res = tsa::granger_test(make_series(x), make_series(y), 2);
        if (!res.degenerate && res.p_value < 0.05) ++power_hits;
    }
    int null_rejects = 0;
    for (int seed = 0; seed < 400; ++seed) {
        Xoshiro256 rng(40000 + static_cast<std::uint64_t>(seed));
        std::vector<double> x(91), y(91);
        for (std::size_t t = 0; t < 91; ++t) {
            x[t] = rng.gaussian();
            y[t] = rng.gaussian();
        }
        const auto res = tsa::granger_test(make_series(x), make_series(y), 2);
        if (!res.degenerate && res.p_value < 0.05) ++null_rejects;
    }
    const double elapsed = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "power %d/100, null rejections %d/400, %.1fs", power_hits,
                  null_rejects, elapsed);
    // size band: 5% of 400 = 20, +-3 sigma of Binomial(400, 0.05) ~ +-13
    return {power_hits >= 95 && null_rejects >= 8 && null_rejects <= 36 && elapsed < 60.0, buf};
}

// --------------------------------------- 4: synthetic replication table --

Outcome criterion_replication() {
    const classify::Triple source{classify::TweetType::personal, classify::UserType::person,
                                  classify::Sentiment::positive};
    int ok_seeds = 0;
    for (int seed = 0; seed < 100; ++seed) {
        synth::SynthConfig cfg;
        cfg.seed = 500 + static_cast<std::uint64_t>(seed);
        const synth::SynthDataset data = synth::generate_dataset(cfg);

        WeeklySeries src, sales;
        src.start = sales.start = Week::of_date(cfg.start);
        src.label = "source";
        sales.label = "sales";
        for (long c : data.truth.weekly_counts.at(source))
            src.values.emplace_back(static_cast<double>(c));
        for (const auto& rec : data.sales) sales.values.emplace_back(rec.units);

        const auto cells = tsa::lagged_correlation(src, sales);
        std::set<int> moderate;
        for (const auto& [lag, cell] : cells)
            if (cell && std::fabs(cell->r) >= tsa::kModerateR) moderate.insert(lag);
        const bool causal_found = moderate.count(3) == 1 && moderate.count(4) == 1;
        bool spurious = false;
        for (int lag = -4; lag <= 0; ++lag) spurious = spurious || moderate.count(lag) == 1;
        if (causal_found && !spurious) ++ok_seeds;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "lags +3/+4 flagged, none at <= 0: %d/100 seeds", ok_seeds);
    return {ok_seeds >= 90, buf};
}

// --------------------------------------------- 5: event study recovery --

Outcome criterion_event_power() {
    const std::vector<std::size_t> weeks{10, 20, 30, 40, 50};
    events::EventStudyConfig cfg;
    cfg.w = 2;  // the injected effect spans tau 0..2
    cfg.L = 6;
    cfg.one_sided = true;

    auto run_once = [&](std::uint64_t seed, double effect) {
        Xoshiro256 rng(seed);
        std::vector<double> sales(60);
        for (std::size_t t = 0; t < 60; ++t) sales[t] = 1.0 + 0.05 * rng.gaussian();
        for (const std::size_t e : weeks)
            for (std::size_t tau = 0; tau <= 2; ++tau) sales[e + tau] += effect;
        std::vector<events::Event> evs;
        for (const std::size_t e : weeks) evs.push_back({e, 1.0, true, {}});
        return events::event_study(make_series(sales), evs, cfg);
    };

    int power_hits = 0;
    for (int seed = 0; seed < 100; ++seed)
        if (run_once(7000 + static_cast<std::uint64_t>(seed), 0.3).p_value < 0.05) ++power_hits;
    int null_rejects = 0;
    for (int seed = 0; seed < 200; ++seed)
        if (run_once(80000 + static_cast<std::uint64_t>(seed), 0.0).p_value < 0.05) ++null_rejects;

    char buf[128];
    std::snprintf(buf, sizeof buf, "power %d/100, null rejections %d/200", power_hits,
                  null_rejects);
    // 5% of 200 = 10, +-3 sigma ~ +-9
    return {power_hits >= 90 && null_rejects >= 1 && null_rejects <= 19, buf};
}

// ------------------------------------------- 6: event study invariances --

Outcome criterion_invariance() {
    Xoshiro256 rng(606);
    std::vector<double> sales(40);
    for (std::size_t t = 0; t < 40; ++t)
        sales[t] = static_cast<double>(5 + rng.below(36));  // integers: shifts stay exact
    const std::vector<events::Event> evs{{10, 1.0, true, {}}, {22, 1.0, true, {}},
                                         {31, 1.0, true, {}}};
    events::EventStudyConfig cfg;
    cfg.w = 2;
    cfg.L = 8;  // power-of-two window keeps the estimation mean dyadic

    const auto base = events::event_study(make_series(sales), evs, cfg);
    if (base.n_usable != 3 || std::isnan(base.t_statistic))
        return {false, "fixture produced no usable t statistic"};

    int transforms = 0;
    for (int i = 0; i < 10; ++i) {
        const double shift = static_cast<double>(static_cast<int>(rng.below(101)) - 50);
        std::vector<double> shifted = sales;
        for (double& v : shifted) v += shift;
        const auto res = events::event_study(make_series(shifted), evs, cfg);
        if (res.ar != base.ar || res.car != base.car)
            return {false, "AR changed under shift " + format_num(shift)};
        ++transforms;
    }
    for (int i = 0; i < 10; ++i) {
        const double scale = std::exp(rng.uniform(-2.0, 3.0));
        std::vector<double> scaled = sales;
        for (double& v : scaled) v *= scale;
        const auto res = events::event_study(make_series(scaled), evs, cfg);
        if (format_num(res.t_statistic) != format_num(base.t_statistic) ||
            format_num(res.p_value) != format_num(base.p_value))
            return {false, "t or p changed under scale " + format_num(scale)};
        ++transforms;
    }
    return {transforms == 20, "20 random transforms left t, p, and AR fixed"};
}

// ------------------------------------------- 7: classifier consistency --

Outcome criterion_classifier() {
    synth::SynthConfig cfg;
    cfg.rater_noise = 0.0;
    const synth::SynthDataset data = synth::generate_dataset(cfg);
    const auto lexicon = synth::synth_name_lexicon();

    std::vector<classify::TweetFeatures> feats;
    feats.reserve(data.tweets.size());
    for (const auto& t : data.tweets) feats.push_back(classify::extract_features(t, lexicon));

    double worst_accuracy = 1.0;
    for (const auto dim : {classify::Dimension::tweet_type, classify::Dimension::user_type,
                           classify::Dimension::sentiment}) {
        std::vector<classify::Example> examples;
        for (std::size_t i = 0; i < data.tweets.size(); ++i) {
            const classify::Triple cls = classify::aggregate_classes(data.truth.raw_labels[i]);
            std::string label;
            switch (dim) {
                case classify::Dimension::tweet_type: label = classify::to_string(cls.tweet_type); break;
                case classify::Dimension::user_type: label = classify::to_string(cls.user_type); break;
                case classify::Dimension::sentiment: label = classify::to_string(cls.sentiment); break;
            }
            examples.emplace_back(feats[i], std::move(label));
        }
        const auto [tree, report] = classify::train_tree(examples, classify::to_string(dim));
        worst_accuracy = std::min(worst_accuracy, report.accuracy);
    }

    const auto labels = synth::label_sample(data.tweets, data.truth.raw_labels, 0.0, cfg.seed + 1,
                                            cfg.n_raters);
    const auto groups = classify::group_by_tweet(labels);
    bool agreement_exact = true;
    for (const auto scheme : {classify::Scheme::raw, classify::Scheme::revised})
        for (const auto dim : {classify::Dimension::tweet_type, classify::Dimension::user_type,
                               classify::Dimension::sentiment})
            agreement_exact = agreement_exact &&
                              classify::agreement_accuracy(groups, dim, scheme)
                                      .overall_accuracy() == 1.0;

    char buf[128];
    std::snprintf(buf, sizeof buf, "worst held-out accuracy %.4f, noise-free agreement %s",
                  worst_accuracy, agreement_exact ? "1.0" : "below 1.0");
    return {worst_accuracy >= 0.99 && agreement_exact, buf};
}

// --------------------------------------------- 8: agreement unit fixture --

Outcome criterion_agreement_fixture() {
    using classify::RawSentiment;
    using classify::RawTweetType;
    using classify::RawUserType;
    std::vector<classify::LabelRecord> labels;
    const auto add = [&](const char* rater, RawUserType u) {
        labels.push_back({"t1", rater, {RawTweetType::chatter, u, RawSentiment::neutral}});
    };
    add("r1", RawUserType::person);
    add("r2", RawUserType::person);
    add("r3", RawUserType::company);

    const auto rep = classify::agreement_accuracy(classify::group_by_tweet(labels),
                                                  classify::Dimension::user_type,
                                                  classify::Scheme::raw);
    const bool ok = rep.per_class.at("person").accuracy() == 1.0 &&
                    rep.per_class.at("company").accuracy() == 0.0 &&
                    rep.overall_accuracy() == 2.0 / 3.0 && rep.n_ratings == 3;
    char buf[128];
    std::snprintf(buf, sizeof buf, "per-class %.2f/%.2f, overall %.4f",
                  rep.per_class.at("person").accuracy(), rep.per_class.at("company").accuracy(),
                  rep.overall_accuracy());
    return {ok, buf};
}

// ------------------------------------------- 9: end-to-end determinism --

std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root))
        if (entry.is_regular_file())
            files[fs::relative(entry.path(), root).string()] = read_file(entry.path().string());
    return files;
}

Outcome criterion_determinism(const std::string& cli, const std::string& lexicon) {
    TempDir tmp;
    write_file(tmp / "cfg.json", "{\"n_weeks\": 40}\n");

    auto run_chain = [&](const std::string& name) -> std::optional<std::string> {
        const std::string root = tmp / name;
        const std::string raw = root + "/raw";
        const std::string series = root + "/series";
        const std::vector<std::string> cmds = {
            cli + " synth --config " + (tmp / "cfg.json") + " --out " + raw,
            cli + " ingest --tweets " + raw + "/tweets.jsonl --sales " + raw + "/sales.csv" +
                " --lang nl --capital Amsterdam --country Netherlands --out " + series,
            cli + " classify train --tweets " + raw + "/tweets.jsonl --labels " + raw +
                "/labels.csv --lexicon " + lexicon + " --out " + root + "/models",
            cli + " classify predict --tweets " + raw + "/tweets.jsonl --model-dir " + root +
                "/models --lexicon " + lexicon + " --out " + series,
            cli + " analyze correlate --series-dir " + series + " --out " + root + "/correlate",
            cli + " analyze adf --series-dir " + series + " --out " + root + "/adf",
            cli + " analyze granger --sweep --series-dir " + series + " --out " + root + "/granger",
            cli + " analyze eventstudy --series-dir " + series +
                " --q 0.85 --window 2 --est-window 4 --out " + root + "/events",
        };
        for (const auto& cmd : cmds) {
            const auto res = run_cmd(cmd);
            if (res.code != 0)
                return "exit " + std::to_string(res.code) + " from: " + cmd + "\n" + res.output;
        }
        return std::nullopt;
    };

    if (const auto err = run_chain("a")) return {false, "first run failed: " + *err};
    if (const auto err = run_chain("b")) return {false, "second run failed: " + *err};

    const auto a = snapshot_tree(tmp / "a");
    const auto b = snapshot_tree(tmp / "b");
    if (a.size() != b.size()) return {false, "runs produced different file sets"};
    int compared = 0;
    for (const auto& [rel, content] : a) {
        const auto it = b.find(rel);
        if (it == b.end()) return {false, "missing from second run: " + rel};
        if (fs::path(rel).filename() == "manifest.json") continue;  // carries the timestamp
        if (it->second != content) return {false, "differs between runs: " + rel};
        ++compared;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d report files byte-identical across two runs", compared);
    return {true, buf};
}

} // namespace

int main(int argc, char** argv) {
    std::string cli = argc > 1 ? argv[1] : "";
    if (cli.empty())
        if (const char* env = std::getenv("SIGNALLAB_CLI"); env && *env) cli = env;
    std::string lexicon = argc > 2 ? argv[2] : "";
    if (lexicon.empty())
        if (const char* env = std::getenv("SIGNALLAB_LEXICON"); env && *env) lexicon = env;

    struct Row {
        int num;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Row> rows = {
        {1, "statistical-core-oracles", criterion_oracles},
        {2, "adf-calibration", criterion_adf},
        {3, "granger-power-size", criterion_granger},
        {4, "synthetic-replication", criterion_replication},
        {5, "event-study-recovery", criterion_event_power},
        {6, "event-study-invariances", criterion_invariance},
        {7, "classifier-consistency", criterion_classifier},
        {8, "agreement-unit-fixture", criterion_agreement_fixture},
        {9, "end-to-end-determinism",
         [&] {
             if (cli.empty() || lexicon.empty())
                 return Outcome{false, "need the cli path (argv[1] or SIGNALLAB_CLI) and lexicon"};
             return criterion_determinism(cli, lexicon);
         }},
    };

    int failures = 0;
    for (const auto& row : rows) {
        Outcome out;
        try {
            out = row.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d %-26s %s  [%s]\n", row.num, row.name,
                    out.pass ? "PASS" : "FAIL", out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures;
}
