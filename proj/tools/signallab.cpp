// signallab: tweet and sales weekly-series analysis pipeline.
//
// Subcommands: synth, ingest, classify {train,predict,agreement},
// analyze {correlate,adf,granger,eventstudy}. Each run writes its reports
// plus a manifest.json describing inputs, parameters, and outputs; the
// manifest is the only emitted file carrying a timestamp, so re-runs with
// the same inputs produce byte-identical reports.

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "signallab/signallab.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace signallab;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kManifestNote = "manifest: manifest.json";

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open " + path);
    return in;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Every subcommand records what it read, what it was told, and what it
/// wrote. The timestamp lives here and only here.
void write_manifest(const fs::path& out_dir, const std::string& subcommand, const json& inputs,
                    const json& params, const std::vector<std::string>& outputs) {
    json m;
    m["tool"] = "signallab";
    m["version"] = kVersion;
    m["subcommand"] = subcommand;
    m["inputs"] = inputs;
    m["params"] = params;
    m["outputs"] = outputs;
    m["generated_at"] = utc_now();
    write_file(out_dir / "manifest.json", m.dump(2) + "\n");
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

std::string filter_file_name(const std::string& desc) {
    std::string name = "tweets_" + desc + ".csv";
    for (char& c : name)
        if (c == '/') c = '_';
    return name;
}

ingest::TweetFormat sniff_tweet_format(const std::string& path, const std::string& forced) {
    if (forced == "csv") return ingest::TweetFormat::csv;
    if (forced == "jsonl") return ingest::TweetFormat::jsonlines;
    return fs::path(path).extension() == ".csv" ? ingest::TweetFormat::csv
                                                : ingest::TweetFormat::jsonlines;
}

std::string lexicon_path_or_fail(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("SIGNALLAB_LEXICON"); env && *env) return env;
    throw parse_error("no name lexicon: pass --lexicon or set SIGNALLAB_LEXICON");
}

WeeklySeries read_series_file(const fs::path& path, const std::string& label) {
    auto in = open_input(path.string());
    try {
        return ingest::read_weekly_csv(in, label);
    } catch (const parse_error& e) {
        throw parse_error(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------- synth --

struct SynthOpts {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void run_synth(const SynthOpts& opt) {
    synth::SynthConfig cfg;
    if (!opt.config_path.empty()) {
        auto in = open_input(opt.config_path);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw parse_error(opt.config_path + ": " + e.what());
        }
        cfg = synth::config_from_json(j);
    }
    if (opt.seed) cfg.seed = *opt.seed;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw parse_error(e.what());
    }

    const synth::SynthDataset data = synth::generate_dataset(cfg);
    const auto labels =
        synth::label_sample(data.tweets, data.truth.raw_labels, cfg.rater_noise, cfg.seed + 1,
                            cfg.n_raters);

    const fs::path dir = ensure_out_dir(opt.out);
    {
        std::ostringstream os;
        ingest::write_tweets_jsonlines(os, data.tweets);
        write_file(dir / "tweets.jsonl", os.str());
    }
    {
        std::ostringstream os;
        ingest::write_sales_csv(os, data.sales);
        write_file(dir / "sales.csv", os.str());
    }
    {
        std::ostringstream os;
        ingest::write_labels_csv(os, labels);
        write_file(dir / "labels.csv", os.str());
    }
    write_file(dir / "ground_truth.json", synth::ground_truth_to_json(data.truth).dump(2) + "\n");
    write_file(dir / "config.json", synth::config_to_json(cfg).dump(2) + "\n");
    write_manifest(dir, "synth",
                   {{"config", opt.config_path.empty() ? "(defaults)" : opt.config_path}},
                   synth::config_to_json(cfg),
                   {"tweets.jsonl", "sales.csv", "labels.csv", "ground_truth.json", "config.json"});
    std::cerr << "synth: " << data.tweets.size() << " tweets over " << cfg.n_weeks << " weeks -> "
              << dir.string() << "\n";
}

// --------------------------------------------------------------- ingest --

struct IngestOpts {
    std::string tweets;
    std::string sales;
    std::string format;  // "", "jsonl", "csv"
    std::string country = "all";
    std::string lang;
    std::string capital;
    std::string from;
    std::string to;
    std::string out;
    double min_weekly = 40.0;
};

void run_ingest(const IngestOpts& opt) {
    std::vector<ingest::TweetRecord> tweets;
    {
        auto in = open_input(opt.tweets);
        try {
            tweets = ingest::parse_tweets(in, sniff_tweet_format(opt.tweets, opt.format));
        } catch (const parse_error& e) {
            throw parse_error(opt.tweets + ": " + e.what());
        }
    }
    std::vector<ingest::SalesRecord> sales;
    {
        auto in = open_input(opt.sales);
        try {
            sales = ingest::parse_sales(in);
        } catch (const parse_error& e) {
            throw parse_error(opt.sales + ": " + e.what());
        }
    }

    const std::size_t n_parsed = tweets.size();
    const bool filtered = !opt.lang.empty() || !opt.capital.empty();
    if (filtered) {
        if (opt.lang.empty() || opt.capital.empty())
            throw parse_error("country filtering needs both --lang and --capital");
        tweets = ingest::filter_country(tweets, {opt.country, opt.lang, opt.capital});
    }
    if (tweets.empty()) throw parse_error("no tweets left after filtering");
    if (sales.empty()) throw parse_error("sales file has no rows");

    std::vector<Timestamp> stamps;
    for (const auto& t : tweets) stamps.push_back(t.created_at);

    WeeklySeries tweets_weekly, sales_weekly;
    if (!opt.from.empty() || !opt.to.empty()) {
        if (opt.from.empty() || opt.to.empty())
            throw parse_error("pass both --from and --to or neither");
        const Date from = parse_date(opt.from);
        const Date to = parse_date(opt.to);
        std::size_t skipped_t = 0, skipped_s = 0;
        tweets_weekly = ingest::aggregate_weekly(stamps, from, to, &skipped_t, "tweets");
        sales_weekly = ingest::aggregate_sales(sales, from, to, &skipped_s, "sales");
        if (skipped_t + skipped_s > 0)
            std::cerr << "ingest: " << skipped_t << " tweets and " << skipped_s
                      << " sales rows outside the requested range\n";
    } else {
        const auto [t_from, t_to] = ingest::natural_range(stamps);
        const auto [s_from, s_to] = ingest::natural_range(sales);
        const WeeklySeries tw = ingest::aggregate_weekly(stamps, t_from, t_to, nullptr, "tweets");
        const WeeklySeries sw = ingest::aggregate_sales(sales, s_from, s_to, nullptr, "sales");
        try {
            std::tie(tweets_weekly, sales_weekly) = ingest::align(tw, sw);
        } catch (const alignment_error&) {
            throw alignment_error("no overlap between tweet and sales week ranges");
        }
    }

    double mean_weekly = 0.0;
    for (const auto& v : tweets_weekly.values) mean_weekly += v.value_or(0.0);
    mean_weekly /= static_cast<double>(tweets_weekly.size());
    if (mean_weekly < opt.min_weekly)
        std::cerr << "warning: mean weekly tweet count " << format_num(mean_weekly)
                  << " is below the viability threshold " << format_num(opt.min_weekly) << "\n";

    const fs::path dir = ensure_out_dir(opt.out);
    {
        std::ostringstream os;
        ingest::write_weekly_csv(os, tweets_weekly, kManifestNote);
        write_file(dir / "tweets_all.csv", os.str());
    }
    {
        std::ostringstream os;
        ingest::write_weekly_csv(os, sales_weekly, kManifestNote);
        write_file(dir / "sales.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "# " << kManifestNote << "\n";
        write_csv_row(os, {"country", "n_tweets"});
        write_csv_row(os, {"all", std::to_string(n_parsed)});
        if (filtered) write_csv_row(os, {opt.country, std::to_string(tweets.size())});
        write_file(dir / "summary.csv", os.str());
    }
    write_manifest(dir, "ingest", {{"tweets", opt.tweets}, {"sales", opt.sales}},
                   {{"country", opt.country},
                    {"lang", opt.lang},
                    {"capital", opt.capital},
                    {"from", format_date(tweets_weekly.start.monday())},
                    {"to", format_date((tweets_weekly.end() + -1).monday())},
                    {"min_weekly_tweets", opt.min_weekly}},
                   {"tweets_all.csv", "sales.csv", "summary.csv"});
    std::cerr << "ingest: " << tweets.size() << " tweets, " << tweets_weekly.size()
              << " aligned weeks -> " << dir.string() << "\n";
}

// ------------------------------------------------------------- classify --

struct ClassifyOpts {
    std::string tweets;
    std::string format;
    std::string labels;
    std::string lexicon;
    std::string model_dir;
    std::string out;
    std::string lang;
    std::string capital;
    std::string country = "all";
    std::uint64_t seed = 0;
    int max_depth = 6;
    std::size_t min_leaf = 5;
};

std::vector<ingest::TweetRecord> load_tweets(const std::string& path, const std::string& format,
                                             const std::string& lang, const std::string& capital,
                                             const std::string& country) {
    auto in = open_input(path);
    std::vector<ingest::TweetRecord> tweets;
    try {
        tweets = ingest::parse_tweets(in, sniff_tweet_format(path, format));
    } catch (const parse_error& e) {
        throw parse_error(path + ": " + e.what());
    }
    if (!lang.empty() || !capital.empty()) {
        if (lang.empty() || capital.empty())
            throw parse_error("country filtering needs both --lang and --capital");
        tweets = ingest::filter_country(tweets, {country, lang, capital});
    }
    return tweets;
}

std::set<std::string> load_lexicon_file(const std::string& path) {
    auto in = open_input(path);
    auto lex = classify::load_lexicon(in);
    if (lex.empty()) throw parse_error(path + ": lexicon has no names");
    return lex;
}

void run_classify_train(const ClassifyOpts& opt) {
    const auto tweets = load_tweets(opt.tweets, opt.format, opt.lang, opt.capital, opt.country);
    const auto lexicon = load_lexicon_file(lexicon_path_or_fail(opt.lexicon));
    std::vector<classify::LabelRecord> labels;
    {
        auto in = open_input(opt.labels);
        try {
            labels = ingest::parse_labels(in);
        } catch (const parse_error& e) {
            throw parse_error(opt.labels + ": " + e.what());
        }
    }

    std::map<std::string, const ingest::TweetRecord*> by_id;
    for (const auto& t : tweets) by_id[t.id] = &t;
    const auto groups = classify::group_by_tweet(labels);
    for (const auto& g : groups)
        if (!by_id.count(g.front().tweet_id))
            throw parse_error("label references unknown tweet id '" + g.front().tweet_id + "'");

    std::map<std::string, classify::TweetFeatures> features;
    for (const auto& g : groups)
        features.emplace(g.front().tweet_id,
                         classify::extract_features(*by_id.at(g.front().tweet_id), lexicon));

    const classify::TrainParams params{opt.max_depth, opt.min_leaf, opt.seed};
    const fs::path dir = ensure_out_dir(opt.out);
    json report;
    report["manifest"] = "manifest.json";
    std::vector<std::string> outputs;
    for (const auto dim :
         {classify::Dimension::tweet_type, classify::Dimension::user_type,
          classify::Dimension::sentiment}) {
        std::vector<classify::Example> examples;
        for (const auto& g : groups) {
            std::optional<std::string> cls;
            switch (dim) {
                case classify::Dimension::tweet_type:
                    if (auto c = classify::consensus_tweet_type(g)) cls = classify::to_string(*c);
                    break;
                case classify::Dimension::user_type:
                    if (auto c = classify::consensus_user_type(g)) cls = classify::to_string(*c);
                    break;
                case classify::Dimension::sentiment:
                    if (auto c = classify::consensus_sentiment(g)) cls = classify::to_string(*c);
                    break;
            }
            if (cls) examples.emplace_back(features.at(g.front().tweet_id), *cls);
        }
        const std::string dim_name = classify::to_string(dim);
        if (examples.size() < 2 * params.min_leaf)
            throw parse_error("too few labeled examples with consensus for " + dim_name);
        auto [tree, train_report] = classify::train_tree(examples, dim_name, params);

        const std::string model_file = "model_" + dim_name + ".json";
        write_file(dir / model_file, tree.to_json().dump(2) + "\n");
        outputs.push_back(model_file);

        json jr;
        jr["split_seed"] = train_report.split_seed;
        jr["n_examples"] = examples.size();
        jr["n_train"] = train_report.n_train;
        jr["n_test"] = train_report.n_test;
        jr["n_correct"] = train_report.n_correct;
        jr["accuracy"] = train_report.accuracy;
        jr["depth"] = tree.depth();
        jr["n_leaves"] = tree.n_leaves();
        json per;
        for (const auto& [cls, pc] : train_report.per_class)
            per[cls] = {{"correct", pc.correct}, {"total", pc.total}};
        jr["per_class"] = per;
        report[dim_name] = jr;
    }
    write_file(dir / "train_report.json", report.dump(2) + "\n");
    outputs.push_back("train_report.json");
    write_manifest(dir, "classify train",
                   {{"tweets", opt.tweets}, {"labels", opt.labels}},
                   {{"seed", opt.seed}, {"max_depth", opt.max_depth}, {"min_leaf", opt.min_leaf}},
                   outputs);
    std::cerr << "classify train: " << groups.size() << " labeled tweets -> " << dir.string()
              << "\n";
}

void run_classify_predict(const ClassifyOpts& opt) {
    const auto tweets = load_tweets(opt.tweets, opt.format, opt.lang, opt.capital, opt.country);
    if (tweets.empty()) throw parse_error("no tweets to classify");
    const auto lexicon = load_lexicon_file(lexicon_path_or_fail(opt.lexicon));

    const fs::path models(opt.model_dir);
    std::map<classify::Dimension, classify::DecisionTree> trees;
    for (const auto dim :
         {classify::Dimension::tweet_type, classify::Dimension::user_type,
          classify::Dimension::sentiment}) {
        const fs::path file = models / ("model_" + std::string(classify::to_string(dim)) + ".json");
        auto in = open_input(file.string());
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw parse_error(file.string() + ": " + e.what());
        }
        trees.emplace(dim, classify::DecisionTree::from_json(j));
    }

    std::vector<classify::Triple> predicted;
    std::vector<std::array<double, 3>> confidence;
    for (const auto& t : tweets) {
        const auto f = classify::extract_features(t, lexicon);
        const auto [tt, ct] = trees.at(classify::Dimension::tweet_type).predict(f);
        const auto [ut, cu] = trees.at(classify::Dimension::user_type).predict(f);
        const auto [st, cs] = trees.at(classify::Dimension::sentiment).predict(f);
        predicted.push_back({classify::tweet_type_from(tt), classify::user_type_from(ut),
                             classify::sentiment_from(st)});
        confidence.push_back({ct, cu, cs});
    }

    const fs::path dir = ensure_out_dir(opt.out);
    {
        std::ostringstream os;
        os << "# " << kManifestNote << "\n";
        write_csv_row(os, {"id", "tweet_type", "user_type", "sentiment", "confidence_tweet_type",
                           "confidence_user_type", "confidence_sentiment"});
        for (std::size_t i = 0; i < tweets.size(); ++i)
            write_csv_row(os, {tweets[i].id, classify::to_string(predicted[i].tweet_type),
                               classify::to_string(predicted[i].user_type),
                               classify::to_string(predicted[i].sentiment),
                               format_num(confidence[i][0]), format_num(confidence[i][1]),
                               format_num(confidence[i][2])});
        write_file(dir / "predictions.csv", os.str());
    }

    // Weekly series per report row. If the out dir already holds sales.csv
    // (from ingest), adopt its week range so everything lines up.
    Date from{}, to{};
    if (fs::exists(dir / "sales.csv")) {
        const WeeklySeries sales = read_series_file(dir / "sales.csv", "sales");
        from = sales.start.monday();
        to = (sales.end() + -1).monday();
    } else {
        std::vector<Timestamp> stamps;
        for (const auto& t : tweets) stamps.push_back(t.created_at);
        std::tie(from, to) = ingest::natural_range(stamps);
    }

    std::vector<std::string> outputs{"predictions.csv", "rows.csv"};
    {
        std::ostringstream rows_os;
        rows_os << "# " << kManifestNote << "\n";
        write_csv_row(rows_os, {"filter", "file"});
        for (const auto& filter : classify::table_row_filters()) {
            const std::string desc = filter.describe();
            const std::string file = filter_file_name(desc);
            const WeeklySeries series =
                classify::classified_weekly_counts(tweets, predicted, from, to, filter);
            std::ostringstream os;
            ingest::write_weekly_csv(os, series, kManifestNote);
            write_file(dir / file, os.str());
            write_csv_row(rows_os, {desc, file});
            outputs.push_back(file);
        }
        write_file(dir / "rows.csv", rows_os.str());
    }
    write_manifest(dir, "classify predict",
                   {{"tweets", opt.tweets}, {"models", opt.model_dir}},
                   {{"from", format_date(from)}, {"to", format_date(to)}}, outputs);
    std::cerr << "classify predict: " << tweets.size() << " tweets -> " << dir.string() << "\n";
}

void run_classify_agreement(const ClassifyOpts& opt) {
    std::vector<classify::LabelRecord> labels;
    {
        auto in = open_input(opt.labels);
        try {
            labels = ingest::parse_labels(in);
        } catch (const parse_error& e) {
            throw parse_error(opt.labels + ": " + e.what());
        }
    }
    const auto groups = classify::group_by_tweet(labels);
    json report;
    report["manifest"] = "manifest.json";
    report["n_tweets"] = groups.size();
    report["n_ratings"] = labels.size();
    for (const auto scheme : {classify::Scheme::raw, classify::Scheme::revised}) {
        const char* scheme_name = scheme == classify::Scheme::raw ? "raw" : "revised";
        for (const auto dim :
             {classify::Dimension::tweet_type, classify::Dimension::user_type,
              classify::Dimension::sentiment}) {
            const auto rep = classify::agreement_accuracy(groups, dim, scheme);
            json jd;
            jd["overall_accuracy"] = rep.overall_accuracy();
            jd["hits"] = rep.hits;
            jd["n_ratings"] = rep.n_ratings;
            json per;
            for (const auto& [cls, pc] : rep.per_class)
                per[cls] = {{"hits", pc.hits}, {"total", pc.total}, {"accuracy", pc.accuracy()}};
            jd["per_class"] = per;
            report[scheme_name][classify::to_string(dim)] = jd;
        }
    }
    const fs::path dir = ensure_out_dir(opt.out);
    write_file(dir / "agreement.json", report.dump(2) + "\n");
    write_manifest(dir, "classify agreement", {{"labels", opt.labels}}, json::object(),
                   {"agreement.json"});
    std::cerr << "classify agreement: " << groups.size() << " tweets -> " << dir.string() << "\n";
}

// -------------------------------------------------------------- analyze --

struct AnalyzeOpts {
    std::string series_dir;
    std::string out;
    std::string row = "all/all/all";
    int lags = -1;  // per-analysis default resolved later
    bool fraction = false;
    bool difference = false;
    bool sweep = false;
    double q = 0.90;
    int window = 3;
    int est_window = 6;
    bool two_sided = false;
    bool no_merge = false;
    std::string tweets;  // eventstudy reach input (optional)
    std::string format;
    std::string lang;
    std::string capital;
    std::string predictions;
};

WeeklySeries load_row_series(const AnalyzeOpts& opt, const std::string& desc) {
    const fs::path dir(opt.series_dir);
    if (desc == "all/all/all" && !fs::exists(dir / filter_file_name(desc)) &&
        fs::exists(dir / "tweets_all.csv"))
        return read_series_file(dir / "tweets_all.csv", desc);
    return read_series_file(dir / filter_file_name(desc), desc);
}

WeeklySeries apply_fraction(const AnalyzeOpts& opt, const WeeklySeries& numerator) {
    const WeeklySeries total = load_row_series(opt, "all/all/all");
    return tsa::fraction_series(numerator, total);
}

void run_analyze_correlate(const AnalyzeOpts& opt) {
    const fs::path dir(opt.series_dir);
    const WeeklySeries sales = read_series_file(dir / "sales.csv", "sales");
    const int max_lag = opt.lags < 0 ? 4 : opt.lags;

    std::vector<std::pair<std::string, WeeklySeries>> rows;
    if (fs::exists(dir / "rows.csv")) {
        auto in = open_input((dir / "rows.csv").string());
        const CsvTable table = read_csv(in);
        if (table.header != std::vector<std::string>{"filter", "file"})
            throw parse_error((dir / "rows.csv").string() + ": header must be filter,file");
        for (const auto& r : table.rows)
            rows.emplace_back(r[0], read_series_file(dir / r[1], r[0]));
    } else {
        rows.emplace_back("all/all/all", read_series_file(dir / "tweets_all.csv", "all/all/all"));
    }

    WeeklySeries sales_used = sales;
    if (opt.difference) sales_used = tsa::difference(sales_used);
    for (auto& [desc, series] : rows) {
        if (opt.difference) series = tsa::difference(series);
        tsa::require_aligned(series, sales_used);
    }

    const tsa::CorrelationMatrix table = tsa::correlation_table(rows, sales_used, -max_lag, max_lag);
    const fs::path out = ensure_out_dir(opt.out);
    {
        std::ostringstream os;
        tsa::write_correlation_csv(os, table, kManifestNote);
        write_file(out / "correlation.csv", os.str());
    }
    write_manifest(out, "analyze correlate", {{"series_dir", opt.series_dir}},
                   {{"lags", max_lag}, {"difference", opt.difference}, {"n_rows", rows.size()}},
                   {"correlation.csv"});
    std::cerr << "analyze correlate: " << rows.size() << " rows x " << (2 * max_lag + 1)
              << " lags -> " << out.string() << "\n";
}

json adf_to_json(const tsa::AdfResult& r, const std::string& warning) {
    json j;
    j["statistic"] = r.statistic;
    j["lag_order"] = r.lag_order;
    j["n_obs"] = r.n_obs;
    j["reject_1pct"] = r.reject_1pct;
    j["reject_5pct"] = r.reject_5pct;
    j["reject_10pct"] = r.reject_10pct;
    j["critical_values"] = {{"1pct", tsa::kAdfCrit1pct},
                            {"5pct", tsa::kAdfCrit5pct},
                            {"10pct", tsa::kAdfCrit10pct}};
    if (!warning.empty()) j["warning"] = warning;
    return j;
}

void run_analyze_adf(const AnalyzeOpts& opt) {
    const fs::path dir(opt.series_dir);
    const int p = opt.lags < 0 ? 1 : opt.lags;
    WeeklySeries tweets = load_row_series(opt, opt.row);
    WeeklySeries sales = read_series_file(dir / "sales.csv", "sales");
    if (opt.fraction) tweets = apply_fraction(opt, tweets);
    if (opt.difference) {
        tweets = tsa::difference(tweets);
        sales = tsa::difference(sales);
    }
    std::string warn_t, warn_s;
    const tsa::AdfResult res_t = tsa::adf_test(tweets, p, &warn_t);
    const tsa::AdfResult res_s = tsa::adf_test(sales, p, &warn_s);
    for (const auto& w : {warn_t, warn_s})
        if (!w.empty()) std::cerr << "warning: " << w << "\n";

    json j;
    j["manifest"] = "manifest.json";
    j["transform"] = {{"row", opt.row},
                      {"fraction", opt.fraction},
                      {"difference", opt.difference},
                      {"lag_order", p}};
    j["tweets"] = adf_to_json(res_t, warn_t);
    j["sales"] = adf_to_json(res_s, warn_s);
    const fs::path out = ensure_out_dir(opt.out);
    write_file(out / "adf.json", j.dump(2) + "\n");
    write_manifest(out, "analyze adf", {{"series_dir", opt.series_dir}}, j["transform"],
                   {"adf.json"});
    std::cerr << "analyze adf: tweets stat " << format_num(res_t.statistic) << ", sales stat "
              << format_num(res_s.statistic) << " -> " << out.string() << "\n";
}

void run_analyze_granger(const AnalyzeOpts& opt) {
    WeeklySeries tweets = load_row_series(opt, opt.row);
    const fs::path dir(opt.series_dir);
    WeeklySeries sales = read_series_file(dir / "sales.csv", "sales");
    if (opt.fraction) tweets = apply_fraction(opt, tweets);
    tsa::require_aligned(tweets, sales);

    int k_min = 1, k_max = 1;
    if (opt.sweep) {
        k_min = 1;
        k_max = opt.lags < 0 ? 8 : opt.lags;
    } else {
        k_min = k_max = opt.lags < 0 ? 4 : opt.lags;
    }
    const auto cells = tsa::granger_sweep(tweets, sales, k_min, k_max, opt.difference);

    const fs::path out = ensure_out_dir(opt.out);
    {
        std::ostringstream os;
        tsa::write_granger_csv(os, cells, kManifestNote);
        write_file(out / "granger.csv", os.str());
    }
    write_manifest(out, "analyze granger", {{"series_dir", opt.series_dir}},
                   {{"row", opt.row},
                    {"fraction", opt.fraction},
                    {"difference", opt.difference},
                    {"k_min", k_min},
                    {"k_max", k_max}},
                   {"granger.csv"});
    std::size_t n_sig = 0;
    for (const auto& c : cells)
        if (c.result && !c.result->degenerate && c.result->p_value < 0.05) ++n_sig;
    std::cerr << "analyze granger: " << cells.size() << " depths, " << n_sig
              << " significant -> " << out.string() << "\n";
}

void run_analyze_eventstudy(const AnalyzeOpts& opt) {
    WeeklySeries tweets = load_row_series(opt, opt.row);
    const fs::path dir(opt.series_dir);
    const WeeklySeries sales = read_series_file(dir / "sales.csv", "sales");
    tsa::require_aligned(tweets, sales);

    events::EventStudyConfig cfg;
    cfg.q = opt.q;
    cfg.w = opt.window;
    cfg.L = opt.est_window;
    cfg.merge_adjacent = !opt.no_merge;
    cfg.one_sided = !opt.two_sided;

    const auto peak_events = events::detect_peak_weeks(tweets, cfg.q, cfg.merge_adjacent);
    const auto result = events::event_study(sales, peak_events, cfg);
    json report = events::event_study_report(result, cfg, "manifest.json");
    report["row"] = opt.row;

    if (!opt.tweets.empty()) {
        auto raw = load_tweets(opt.tweets, opt.format, opt.lang, opt.capital, "reach");
        if (!opt.predictions.empty()) {
            const classify::TripleFilter filter = classify::filter_from_string(opt.row);
            auto in = open_input(opt.predictions);
            const CsvTable table = read_csv(in);
            const int c_id = table.column("id");
            const int c_tt = table.column("tweet_type");
            const int c_ut = table.column("user_type");
            const int c_st = table.column("sentiment");
            if (c_id < 0 || c_tt < 0 || c_ut < 0 || c_st < 0)
                throw parse_error(opt.predictions + ": need columns id,tweet_type,user_type,sentiment");
            std::map<std::string, classify::Triple> by_id;
            for (std::size_t r = 0; r < table.rows.size(); ++r) {
                const auto& row = table.rows[r];
                try {
                    by_id.emplace(row[static_cast<std::size_t>(c_id)],
                                  classify::Triple{
                                      classify::tweet_type_from(row[static_cast<std::size_t>(c_tt)]),
                                      classify::user_type_from(row[static_cast<std::size_t>(c_ut)]),
                                      classify::sentiment_from(row[static_cast<std::size_t>(c_st)])});
                } catch (const parse_error& e) {
                    throw parse_error(opt.predictions + ": " + e.what());
                }
            }
            std::vector<ingest::TweetRecord> kept;
            for (const auto& t : raw) {
                const auto it = by_id.find(t.id);
                if (it != by_id.end() && filter.matches(it->second)) kept.push_back(t);
            }
            raw = std::move(kept);
        }
        const auto unmerged = events::detect_peak_weeks(tweets, cfg.q, false);
        std::vector<std::size_t> peak_weeks;
        for (const auto& e : unmerged) peak_weeks.push_back(e.week);
        const auto reach = events::reach_stats(raw, tweets.start.monday(),
                                               (tweets.end() + -1).monday(), peak_weeks);
        json jr;
        jr["mean_followers_peak_weeks"] = reach.mean_followers_peak;
        jr["mean_followers_average_weeks"] = reach.mean_followers_normal;
        if (reach.ratio)
            jr["ratio"] = *reach.ratio;
        else
            jr["ratio"] = nullptr;
        jr["n_tweets"] = raw.size();
        report["reach"] = jr;
    }

    const fs::path out = ensure_out_dir(opt.out);
    write_file(out / "eventstudy.json", report.dump(2) + "\n");
    std::vector<std::string> outputs{"eventstudy.json"};
    if (opt.sweep) {
        const auto grid = events::robustness_sweep(tweets, sales, {0.80, 0.85, 0.90, 0.95}, 0, 5, 1,
                                                   10, cfg.merge_adjacent, cfg.one_sided);
        std::ostringstream os;
        events::write_robustness_csv(os, grid, kManifestNote);
        write_file(out / "robustness.csv", os.str());
        outputs.push_back("robustness.csv");
    }
    write_manifest(out, "analyze eventstudy", {{"series_dir", opt.series_dir}},
                   {{"row", opt.row},
                    {"q", cfg.q},
                    {"window", cfg.w},
                    {"est_window", cfg.L},
                    {"merge_adjacent", cfg.merge_adjacent},
                    {"one_sided", cfg.one_sided},
                    {"sweep", opt.sweep}},
                   outputs);
    std::cerr << "analyze eventstudy: " << result.n_usable << " usable events -> " << out.string()
              << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tweet and sales weekly-series analysis pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    SynthOpts synth_opt;
    auto* c_synth = app.add_subcommand("synth", "generate a synthetic dataset");
    c_synth->add_option("--config", synth_opt.config_path, "config JSON (defaults when omitted)");
    std::uint64_t synth_seed = 0;
    auto* synth_seed_opt = c_synth->add_option("--seed", synth_seed, "override the config seed");
    c_synth->add_option("--out", synth_opt.out, "output directory")->required();
    c_synth->callback([&] {
        if (*synth_seed_opt) synth_opt.seed = synth_seed;
        run_synth(synth_opt);
    });

    IngestOpts ingest_opt;
    auto* c_ingest = app.add_subcommand("ingest", "build aligned weekly series");
    c_ingest->add_option("--tweets", ingest_opt.tweets, "tweet file (JSON lines or CSV)")->required();
    c_ingest->add_option("--sales", ingest_opt.sales, "weekly sales CSV")->required();
    c_ingest->add_option("--format", ingest_opt.format, "tweet file format: jsonl or csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    c_ingest->add_option("--country", ingest_opt.country, "country name for the summary");
    c_ingest->add_option("--lang", ingest_opt.lang, "language code filter");
    c_ingest->add_option("--capital", ingest_opt.capital, "time-zone capital filter");
    c_ingest->add_option("--from", ingest_opt.from, "range start, YYYY-MM-DD Monday");
    c_ingest->add_option("--to", ingest_opt.to, "range end, YYYY-MM-DD Monday");
    c_ingest->add_option("--min-weekly-tweets", ingest_opt.min_weekly,
                         "warn when mean weekly tweets fall below this");
    c_ingest->add_option("--out", ingest_opt.out, "output directory")->required();
    c_ingest->callback([&] { run_ingest(ingest_opt); });

    ClassifyOpts classify_opt;
    auto* c_classify = app.add_subcommand("classify", "train, predict, or score agreement");
    c_classify->require_subcommand(1);
    auto add_tweet_flags = [&](CLI::App* cmd) {
        cmd->add_option("--tweets", classify_opt.tweets, "tweet file")->required();
        cmd->add_option("--format", classify_opt.format, "tweet file format: jsonl or csv")
            ->check(CLI::IsMember({"jsonl", "csv"}));
        cmd->add_option("--lang", classify_opt.lang, "language code filter");
        cmd->add_option("--capital", classify_opt.capital, "time-zone capital filter");
        cmd->add_option("--lexicon", classify_opt.lexicon,
                        "first-name lexicon (default: $SIGNALLAB_LEXICON)");
    };
    auto* c_train = c_classify->add_subcommand("train", "train the three decision trees");
    add_tweet_flags(c_train);
    c_train->add_option("--labels", classify_opt.labels, "labels CSV")->required();
    c_train->add_option("--seed", classify_opt.seed, "train/test split seed");
    c_train->add_option("--max-depth", classify_opt.max_depth, "tree depth limit");
    c_train->add_option("--min-leaf", classify_opt.min_leaf, "minimum examples per leaf");
    c_train->add_option("--out", classify_opt.out, "output directory")->required();
    c_train->callback([&] { run_classify_train(classify_opt); });

    auto* c_predict = c_classify->add_subcommand("predict", "classify tweets with trained models");
    add_tweet_flags(c_predict);
    c_predict->add_option("--model-dir", classify_opt.model_dir, "directory with model_*.json")
        ->required();
    c_predict->add_option("--out", classify_opt.out, "output directory")->required();
    c_predict->callback([&] { run_classify_predict(classify_opt); });

    auto* c_agreement = c_classify->add_subcommand("agreement", "inter-rater agreement report");
    c_agreement->add_option("--labels", classify_opt.labels, "labels CSV")->required();
    c_agreement->add_option("--out", classify_opt.out, "output directory")->required();
    c_agreement->callback([&] { run_classify_agreement(classify_opt); });

    AnalyzeOpts analyze_opt;
    auto* c_analyze = app.add_subcommand("analyze", "correlation, stationarity, causality, events");
    c_analyze->require_subcommand(1);
    auto add_series_flags = [&](CLI::App* cmd, bool with_row) {
        cmd->add_option("--series-dir", analyze_opt.series_dir,
                        "directory with sales.csv and tweets_*.csv")
            ->required();
        cmd->add_option("--out", analyze_opt.out, "output directory")->required();
        if (with_row)
            cmd->add_option("--row", analyze_opt.row,
                            "tweet series row as user/tweet/sentiment, 'all' wildcards");
    };
    auto* c_corr = c_analyze->add_subcommand("correlate", "lagged correlation table");
    add_series_flags(c_corr, false);
    c_corr->add_option("--lags", analyze_opt.lags, "maximum |lag| (default 4)");
    c_corr->add_flag("--difference", analyze_opt.difference, "first-difference both series");
    c_corr->callback([&] { run_analyze_correlate(analyze_opt); });

    auto* c_adf = c_analyze->add_subcommand("adf", "unit-root test on tweets and sales");
    add_series_flags(c_adf, true);
    c_adf->add_option("--lags", analyze_opt.lags, "augmentation lag order (default 1)");
    c_adf->add_flag("--fraction", analyze_opt.fraction, "divide the row by total tweets");
    c_adf->add_flag("--difference", analyze_opt.difference, "first-difference both series");
    c_adf->callback([&] { run_analyze_adf(analyze_opt); });

    auto* c_granger = c_analyze->add_subcommand("granger", "Granger causality tweets -> sales");
    add_series_flags(c_granger, true);
    c_granger->add_option("--lags", analyze_opt.lags,
                          "lag depth (default 4; with --sweep, the sweep's upper bound, default 8)");
    c_granger->add_flag("--fraction", analyze_opt.fraction, "divide the row by total tweets");
    c_granger->add_flag("--difference", analyze_opt.difference, "first-difference both series");
    c_granger->add_flag("--sweep", analyze_opt.sweep, "sweep lag depths 1..max");
    c_granger->callback([&] { run_analyze_granger(analyze_opt); });

    auto* c_events = c_analyze->add_subcommand("eventstudy", "peak-week abnormal sales study");
    add_series_flags(c_events, true);
    c_events->add_option("--q", analyze_opt.q, "peak quantile (default 0.90)");
    c_events->add_option("--window", analyze_opt.window, "event window weeks after the peak");
    c_events->add_option("--est-window", analyze_opt.est_window, "normal-sales estimation weeks");
    c_events->add_flag("--two-sided", analyze_opt.two_sided, "two-sided test");
    c_events->add_flag("--no-merge", analyze_opt.no_merge, "keep adjacent peak weeks separate");
    c_events->add_flag("--sweep", analyze_opt.sweep, "emit the q/w/L robustness grid");
    c_events->add_option("--tweets", analyze_opt.tweets, "raw tweet file for follower reach");
    c_events->add_option("--format", analyze_opt.format, "tweet file format: jsonl or csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    c_events->add_option("--lang", analyze_opt.lang, "language code filter for reach");
    c_events->add_option("--capital", analyze_opt.capital, "time-zone capital filter for reach");
    c_events->add_option("--predictions", analyze_opt.predictions,
                         "predictions.csv to restrict reach to the chosen row");
    c_events->callback([&] { run_analyze_eventstudy(analyze_opt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const alignment_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const degenerate_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
