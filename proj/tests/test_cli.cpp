// End-to-end checks of the command line tool. Each test drives the real
// binary (path from SIGNALLAB_CLI) against files in a temp directory.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "signallab/core/format.hpp"

#include "helpers.hpp"

namespace fs = std::filesystem;
using namespace testutil;
using Catch::Approx;
using nlohmann::json;

namespace {

std::string cli() { return cli_path(); }

int count_data_rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    int rows = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        ++rows;
    }
    return rows;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

std::string tweet_json(const std::string& id, const std::string& stamp,
                       const std::string& lang = "nl", const std::string& tz = "Amsterdam") {
    json j = {{"id", id},
              {"text", "hello there"},
              {"created_at", stamp},
              {"user_name", "Anna Jansen"},
              {"user_screen_name", "anna_1"},
              {"followers", 10},
              {"friends", 5},
              {"statuses_count", 100},
              {"retweet_count", 0},
              {"is_retweet", false},
              {"user_timezone", tz},
              {"language", lang}};
    return j.dump() + "\n";
}

/// Weekly series CSV in the pipeline's own format.
std::string weekly_csv(const std::vector<double>& values, const std::string& start = "2012-01-02") {
    using namespace signallab;
    std::ostringstream os;
    os << "week_start,value\n";
    Week w = Week::of_date(parse_date(start));
    for (double v : values) {
        os << format_date(w.monday()) << "," << format_num(v) << "\n";
        w = w + 1;
    }
    return os.str();
}

const std::vector<std::string> kSynthOutputs = {"tweets.jsonl", "sales.csv", "labels.csv",
                                                "ground_truth.json", "config.json",
                                                "manifest.json"};

} // namespace

TEST_CASE("cli help and version") {
    CHECK(run_cmd(cli() + " --help").code == 0);
    const auto version = run_cmd(cli() + " --version");
    CHECK(version.code == 0);
    CHECK(version.output.find("0.1.0") != std::string::npos);
    const auto help = run_cmd(cli() + " --help");
    CHECK(help.output.find("synth") != std::string::npos);
    CHECK(help.output.find("analyze") != std::string::npos);
    CHECK(run_cmd(cli() + " analyze --help").code == 0);
}

TEST_CASE("cli usage errors exit with code two") {
    TempDir tmp;
    CHECK(run_cmd(cli()).code == 2);                       // missing subcommand
    CHECK(run_cmd(cli() + " --no-such-flag").code == 2);   // unknown flag
    CHECK(run_cmd(cli() + " synth").code == 2);            // missing --out
    CHECK(run_cmd(cli() + " ingest --tweets " + (tmp / "none.jsonl") + " --sales " +
                  (tmp / "none.csv") + " --out " + (tmp / "out"))
              .code == 2);                                 // unreadable inputs
}

TEST_CASE("cli synth writes a deterministic dataset bundle") {
    TempDir tmp;
    const std::string a = tmp / "a";
    const std::string b = tmp / "b";
    const auto first = run_cmd(cli() + " synth --out " + a);
    REQUIRE(first.code == 0);
    for (const auto& f : kSynthOutputs) {
        INFO(f);
        CHECK(fs::exists(fs::path(a) / f));
    }

    const std::string sales = read_file(a + "/sales.csv");
    CHECK(count_data_rows(sales) == 91);
    const int n_tweets = count_lines(read_file(a + "/tweets.jsonl"));
    CHECK(n_tweets > 5000);
    CHECK(count_data_rows(read_file(a + "/labels.csv")) == 3 * n_tweets);

    const json cfg = json::parse(read_file(a + "/config.json"));
    CHECK(cfg["seed"] == 42);
    CHECK(cfg["n_weeks"] == 91);
    const json truth = json::parse(read_file(a + "/ground_truth.json"));
    CHECK(truth["noiseless_sales"].size() == 91);

    const json manifest = json::parse(read_file(a + "/manifest.json"));
    CHECK(manifest["subcommand"] == "synth");
    CHECK(manifest["tool"] == "signallab");
    CHECK(manifest.contains("generated_at"));

    SECTION("a second run reproduces every report byte for byte") {
        REQUIRE(run_cmd(cli() + " synth --out " + b).code == 0);
        for (const auto& f : kSynthOutputs) {
            if (f == "manifest.json") continue;  // carries the timestamp
            INFO(f);
            CHECK(read_file(a + "/" + f) == read_file(b + "/" + f));
        }
    }
    SECTION("--seed moves the data") {
        REQUIRE(run_cmd(cli() + " synth --seed 7 --out " + b).code == 0);
        CHECK(read_file(a + "/sales.csv") != read_file(b + "/sales.csv"));
        CHECK(json::parse(read_file(b + "/config.json"))["seed"] == 7);
    }
}

TEST_CASE("cli synth rejects broken configs") {
    TempDir tmp;
    write_file(tmp / "short.json", "{\"n_weeks\": 5}\n");
    const auto too_short = run_cmd(cli() + " synth --config " + (tmp / "short.json") + " --out " +
                                   (tmp / "out"));
    CHECK(too_short.code == 2);
    CHECK(too_short.output.find("error:") != std::string::npos);

    write_file(tmp / "typo.json", "{\"n_weekz\": 40}\n");
    const auto typo = run_cmd(cli() + " synth --config " + (tmp / "typo.json") + " --out " +
                              (tmp / "out"));
    CHECK(typo.code == 2);
    CHECK(typo.output.find("unknown synth config key") != std::string::npos);

    CHECK(run_cmd(cli() + " synth --config " + (tmp / "missing.json") + " --out " + (tmp / "out"))
              .code == 2);
}

TEST_CASE("cli ingest aligns tweet and sales weeks") {
    TempDir tmp;
    const std::string raw = tmp / "raw";
    REQUIRE(run_cmd(cli() + " synth --out " + raw).code == 0);

    const std::string out = tmp / "weekly";
    const auto res = run_cmd(cli() + " ingest --tweets " + raw + "/tweets.jsonl --sales " + raw +
                             "/sales.csv --lang nl --capital Amsterdam --country Netherlands" +
                             " --out " + out);
    REQUIRE(res.code == 0);
    CHECK(res.output.find("aligned weeks") != std::string::npos);
    CHECK(res.output.find("warning") == std::string::npos);  // ~95 tweets per week

    const std::string tweets_all = read_file(out + "/tweets_all.csv");
    CHECK(count_data_rows(tweets_all) == 91);
    CHECK(count_data_rows(read_file(out + "/sales.csv")) == 91);

    // every generated tweet carries the configured country markers
    const std::string summary = read_file(out + "/summary.csv");
    const int n_tweets = count_lines(read_file(raw + "/tweets.jsonl"));
    CHECK(summary.find("all," + std::to_string(n_tweets)) != std::string::npos);
    CHECK(summary.find("Netherlands," + std::to_string(n_tweets)) != std::string::npos);

    SECTION("a filter nothing survives is an input error") {
        CHECK(run_cmd(cli() + " ingest --tweets " + raw + "/tweets.jsonl --sales " + raw +
                      "/sales.csv --lang xx --capital Nowhere --out " + (tmp / "empty"))
                  .code == 2);
    }
    SECTION("a lone --lang is rejected") {
        CHECK(run_cmd(cli() + " ingest --tweets " + raw + "/tweets.jsonl --sales " + raw +
                      "/sales.csv --lang nl --out " + (tmp / "half"))
                  .code == 2);
    }
}

TEST_CASE("cli ingest reports disjoint ranges as an alignment error") {
    TempDir tmp;
    std::string tweets;
    tweets += tweet_json("t1", "2012-01-02T10:00:00Z");
    tweets += tweet_json("t2", "2012-01-09T10:00:00Z");
    write_file(tmp / "tweets.jsonl", tweets);
    write_file(tmp / "sales.csv",
               "week_start,country,units\n2015-01-05,NL,10\n2015-01-12,NL,12\n");
    const auto res = run_cmd(cli() + " ingest --tweets " + (tmp / "tweets.jsonl") + " --sales " +
                             (tmp / "sales.csv") + " --out " + (tmp / "out"));
    CHECK(res.code == 3);
    CHECK(res.output.find("no overlap") != std::string::npos);
}

TEST_CASE("cli classify pipeline over a small synthetic dataset") {
    TempDir tmp;
    write_file(tmp / "cfg.json", "{\"n_weeks\": 30}\n");
    const std::string raw = tmp / "raw";
    REQUIRE(run_cmd(cli() + " synth --config " + (tmp / "cfg.json") + " --out " + raw).code == 0);

    const std::string models = tmp / "models";
    const auto train = run_cmd(cli() + " classify train --tweets " + raw +
                               "/tweets.jsonl --labels " + raw + "/labels.csv --out " + models);
    REQUIRE(train.code == 0);
    for (const char* f : {"model_tweet_type.json", "model_user_type.json",
                          "model_sentiment.json", "train_report.json"}) {
        INFO(f);
        CHECK(fs::exists(fs::path(models) / f));
    }
    const json report = json::parse(read_file(models + "/train_report.json"));
    for (const char* dim : {"tweet_type", "user_type", "sentiment"}) {
        INFO(dim);
        CHECK(report[dim]["accuracy"].get<double>() >= 0.9);
        CHECK(report[dim]["n_test"].get<int>() > 0);
    }

    // weekly series dir: ingest first so predict adopts the sales week range
    const std::string series = tmp / "series";
    REQUIRE(run_cmd(cli() + " ingest --tweets " + raw + "/tweets.jsonl --sales " + raw +
                    "/sales.csv --out " + series)
                .code == 0);
    const auto predict = run_cmd(cli() + " classify predict --tweets " + raw +
                                 "/tweets.jsonl --model-dir " + models + " --out " + series);
    REQUIRE(predict.code == 0);
    const int n_tweets = count_lines(read_file(raw + "/tweets.jsonl"));
    CHECK(count_data_rows(read_file(series + "/predictions.csv")) == n_tweets);
    CHECK(count_data_rows(read_file(series + "/rows.csv")) == 12);
    CHECK(count_data_rows(read_file(series + "/tweets_all_all_all.csv")) == 30);
    CHECK(count_data_rows(read_file(series + "/tweets_person_all_positive.csv")) == 30);

    SECTION("correlate consumes the predicted rows") {
        const std::string corr = tmp / "corr";
        const auto res = run_cmd(cli() + " analyze correlate --series-dir " + series + " --out " +
                                 corr);
        REQUIRE(res.code == 0);
        const std::string table = read_file(corr + "/correlation.csv");
        CHECK(table.find("# manifest: manifest.json") != std::string::npos);
        CHECK(table.find("filter,lag_-4") != std::string::npos);
        CHECK(count_data_rows(table) == 12);

        const std::string corr2 = tmp / "corr2";
        REQUIRE(run_cmd(cli() + " analyze correlate --series-dir " + series + " --out " + corr2)
                    .code == 0);
        CHECK(read_file(corr + "/correlation.csv") == read_file(corr2 + "/correlation.csv"));
    }
    SECTION("adf and granger run on a chosen row") {
        const std::string adf = tmp / "adf";
        REQUIRE(run_cmd(cli() + " analyze adf --series-dir " + series + " --out " + adf).code == 0);
        const json aj = json::parse(read_file(adf + "/adf.json"));
        CHECK(aj["tweets"]["statistic"].is_number());
        CHECK(aj["sales"]["n_obs"].get<int>() == 28);  // 30 weeks, lag order 1
        CHECK(aj["transform"]["row"] == "all/all/all");

        const std::string gr = tmp / "granger";
        REQUIRE(run_cmd(cli() + " analyze granger --series-dir " + series + " --out " + gr).code ==
                0);
        CHECK(count_data_rows(read_file(gr + "/granger.csv")) == 1);  // single depth, default 4

        const std::string sweep = tmp / "granger_sweep";
        REQUIRE(run_cmd(cli() + " analyze granger --sweep --series-dir " + series + " --out " +
                        sweep)
                    .code == 0);
        CHECK(count_data_rows(read_file(sweep + "/granger.csv")) == 8);

        const std::string frac = tmp / "granger_frac";
        const auto fres = run_cmd(cli() + " analyze granger --fraction --row person/all/all" +
                                  " --series-dir " + series + " --out " + frac);
        REQUIRE(fres.code == 0);
        CHECK(count_data_rows(read_file(frac + "/granger.csv")) == 1);
    }
    SECTION("a missing model directory is an input error") {
        const std::string empty = tmp / "no_models";
        fs::create_directories(empty);
        CHECK(run_cmd(cli() + " classify predict --tweets " + raw + "/tweets.jsonl --model-dir " +
                      empty + " --out " + (tmp / "pred"))
                  .code == 2);
    }
}

TEST_CASE("cli agreement reproduces noise-free labels perfectly") {
    TempDir tmp;
    write_file(tmp / "cfg.json", "{\"n_weeks\": 25, \"rater_noise\": 0.0}\n");
    const std::string raw = tmp / "raw";
    REQUIRE(run_cmd(cli() + " synth --config " + (tmp / "cfg.json") + " --out " + raw).code == 0);

    const std::string out = tmp / "agreement";
    REQUIRE(run_cmd(cli() + " classify agreement --labels " + raw + "/labels.csv --out " + out)
                .code == 0);
    const json j = json::parse(read_file(out + "/agreement.json"));
    CHECK(j["n_ratings"].get<int>() == 3 * j["n_tweets"].get<int>());
    for (const char* scheme : {"raw", "revised"})
        for (const char* dim : {"tweet_type", "user_type", "sentiment"}) {
            INFO(scheme << "/" << dim);
            CHECK(j[scheme][dim]["overall_accuracy"].get<double>() == 1.0);
        }
}

TEST_CASE("cli eventstudy on a crafted series directory") {
    TempDir tmp;
    const std::string series = tmp / "series";
    fs::create_directories(series);

    // tweet spikes in weeks 10 and 25, sales bumps right after each
    std::vector<double> tweets(40, 10.0), sales(40, 50.0);
    tweets[10] = 80.0;
    tweets[25] = 85.0;
    for (int k = 0; k < 3; ++k) {
        sales[11 + k] += 20.0;
        sales[26 + k] += 19.0;
    }
    write_file(series + "/tweets_all.csv", weekly_csv(tweets));
    write_file(series + "/sales.csv", weekly_csv(sales));

    const std::string out = tmp / "events";
    const auto res = run_cmd(cli() + " analyze eventstudy --series-dir " + series + " --q 0.95" +
                             " --out " + out);
    REQUIRE(res.code == 0);
    const json j = json::parse(read_file(out + "/eventstudy.json"));
    CHECK(j["n_usable"].get<int>() == 2);
    CHECK(j["mean_car"].get<double>() > 0.0);
    CHECK(j["config"]["q"].get<double>() == 0.95);

    SECTION("--sweep adds the robustness grid") {
        const std::string sw = tmp / "events_sweep";
        REQUIRE(run_cmd(cli() + " analyze eventstudy --sweep --series-dir " + series + " --out " +
                        sw)
                    .code == 0);
        const std::string grid = read_file(sw + "/robustness.csv");
        CHECK(count_data_rows(grid) == 4 * 6 * 10);  // q x window x estimation grid
        CHECK(grid.find("q,w,L,") != std::string::npos);
    }
    SECTION("follower reach is reported when raw tweets are provided") {
        std::string raw;
        raw += tweet_json("r1", "2012-03-12T09:00:00Z");  // week 10, the first peak
        raw += tweet_json("r2", "2012-01-16T09:00:00Z");
        raw += tweet_json("r3", "2012-02-06T12:00:00Z");
        write_file(tmp / "raw.jsonl", raw);
        const std::string rout = tmp / "events_reach";
        REQUIRE(run_cmd(cli() + " analyze eventstudy --series-dir " + series + " --q 0.95" +
                        " --tweets " + (tmp / "raw.jsonl") + " --out " + rout)
                    .code == 0);
        const json rj = json::parse(read_file(rout + "/eventstudy.json"));
        REQUIRE(rj.contains("reach"));
        CHECK(rj["reach"]["n_tweets"].get<int>() == 3);
        // peaks are weeks 10 and 25; only week 10 has a tweet -> (10 + 0) / 2
        CHECK(rj["reach"]["mean_followers_peak_weeks"].get<double>() == 5.0);
    }
    SECTION("a flat tweet series has no peaks to study") {
        const std::string flat = tmp / "flat";
        fs::create_directories(flat);
        write_file(flat + "/tweets_all.csv", weekly_csv(std::vector<double>(40, 10.0)));
        write_file(flat + "/sales.csv", weekly_csv(sales));
        const auto fres = run_cmd(cli() + " analyze eventstudy --series-dir " + flat + " --out " +
                                  (tmp / "flat_out"));
        CHECK(fres.code == 4);
        CHECK(fres.output.find("no peaks distinguishable") != std::string::npos);
    }
    SECTION("misaligned series directories are an alignment error") {
        const std::string bad = tmp / "bad";
        fs::create_directories(bad);
        write_file(bad + "/tweets_all.csv", weekly_csv(tweets, "2013-01-07"));
        write_file(bad + "/sales.csv", weekly_csv(sales));
        CHECK(run_cmd(cli() + " analyze eventstudy --series-dir " + bad + " --out " +
                      (tmp / "bad_out"))
                  .code == 3);
    }
}
