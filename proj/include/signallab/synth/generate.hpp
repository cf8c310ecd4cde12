#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "signallab/classify/labels.hpp"
#include "signallab/core/date.hpp"
#include "signallab/core/error.hpp"
#include "signallab/core/rng.hpp"
#include "signallab/ingest/records.hpp"

namespace signallab::synth {

/// Name pools for generated users. First names drive the
/// username_has_first_name feature, so surnames and organization names must
/// not contain any of them as an alphabetic run.
constexpr std::array<const char*, 12> kFirstNames = {"anna", "tom",   "lisa",  "jan",
                                                     "maria", "peter", "sophie", "david",
                                                     "emma",  "lucas", "nora",  "finn"};
constexpr std::array<const char*, 5> kSurnames = {"jansen", "devries", "bakker", "visser",
                                                  "smit"};
constexpr std::array<const char*, 5> kOrgNames = {"PrintCorp", "Deals4You", "VacatureBank",
                                                  "Drukwerk NL", "OfficeSupplies"};
constexpr std::array<const char*, 5> kOrgScreens = {"printcorp", "deals4you", "vacaturebank",
                                                    "drukwerk_nl", "officesupplies"};

inline std::set<std::string> synth_name_lexicon() {
    return {kFirstNames.begin(), kFirstNames.end()};
}

inline std::string triple_key(const classify::Triple& t) {
    std::string s = classify::to_string(t.tweet_type);
    s += '|';
    s += classify::to_string(t.user_type);
    s += '|';
    s += classify::to_string(t.sentiment);
    return s;
}

inline classify::Triple triple_from_key(const std::string& key) {
    const auto a = key.find('|');
    const auto b = key.rfind('|');
    if (a == std::string::npos || b == a)
        throw parse_error("bad class key '" + key + "', expected tweet|user|sentiment");
    return {classify::tweet_type_from(key.substr(0, a)),
            classify::user_type_from(key.substr(a + 1, b - a - 1)),
            classify::sentiment_from(key.substr(b + 1))};
}

inline std::string raw_triple_key(const classify::RawTriple& t) {
    std::string s = classify::to_string(t.tweet_type);
    s += '|';
    s += classify::to_string(t.user_type);
    s += '|';
    s += classify::to_string(t.sentiment);
    return s;
}

inline classify::RawTriple raw_triple_from_key(const std::string& key) {
    const auto a = key.find('|');
    const auto b = key.rfind('|');
    if (a == std::string::npos || b == a)
        throw parse_error("bad class key '" + key + "', expected tweet|user|sentiment");
    return {classify::raw_tweet_type_from(key.substr(0, a)),
            classify::raw_user_type_from(key.substr(a + 1, b - a - 1)),
            classify::raw_sentiment_from(key.substr(b + 1))};
}

struct SynthEffect {
    classify::Triple source{classify::TweetType::personal, classify::UserType::person,
                            classify::Sentiment::positive};
    std::vector<int> lags{3, 4};
    double coefficient = 3.0;
};

struct SpamSpike {
    int week = 0;
    classify::Triple cls;
    long magnitude = 0;  // extra tweets of that class in that week
};

struct SynthConfig {
    std::uint64_t seed = 42;
    int n_weeks = 91;
    Date start = Date{std::chrono::year{2012}, std::chrono::month{1}, std::chrono::day{2}};
    double base_sales = 100.0;
    double summer_dip = 0.8;
    double december_peak = 1.5;
    double noise_sd = 5.0;
    std::map<classify::Triple, double> class_rates = default_rates();
    SynthEffect effect;
    std::vector<SpamSpike> spam_spikes;
    double rater_noise = 0.1;
    int n_raters = 30;
    std::string country = "Netherlands";
    std::string language = "nl";
    std::string timezone = "Amsterdam";

    static std::map<classify::Triple, double> default_rates() {
        using classify::Sentiment;
        using classify::Triple;
        using classify::TweetType;
        using classify::UserType;
        return {
            {{TweetType::personal, UserType::person, Sentiment::positive}, 20.0},
            {{TweetType::personal, UserType::person, Sentiment::not_positive}, 30.0},
            {{TweetType::other, UserType::person, Sentiment::not_positive}, 10.0},
            {{TweetType::other, UserType::organization, Sentiment::not_positive}, 15.0},
            {{TweetType::product_advert, UserType::organization, Sentiment::not_positive}, 12.0},
            {{TweetType::job_advert, UserType::organization, Sentiment::not_positive}, 8.0},
        };
    }

    void validate() const {
        if (n_weeks < 20) throw std::invalid_argument("synth config: n_weeks must be >= 20");
        if (!is_monday(start)) throw std::invalid_argument("synth config: start must be a Monday");
        if (!(base_sales > 0.0)) throw std::invalid_argument("synth config: base_sales must be positive");
        if (!(summer_dip > 0.0) || !(december_peak > 0.0))
            throw std::invalid_argument("synth config: seasonal factors must be positive");
        if (!(noise_sd > 0.0)) throw std::invalid_argument("synth config: noise_sd must be positive");
        for (const auto& [t, rate] : class_rates)
            if (!(rate >= 0.0))
                throw std::invalid_argument("synth config: negative rate for " + triple_key(t));
        if (effect.lags.empty()) throw std::invalid_argument("synth config: effect lags empty");
        for (int l : effect.lags)
            if (l < 1 || l > 8)
                throw std::invalid_argument("synth config: effect lags must lie in [1, 8]");
        for (const auto& s : spam_spikes) {
            if (s.week < 0 || s.week >= n_weeks)
                throw std::invalid_argument("synth config: spam spike week out of range");
            if (s.magnitude < 0) throw std::invalid_argument("synth config: negative spike magnitude");
        }
        if (!(rater_noise >= 0.0 && rater_noise < 1.0))
            throw std::invalid_argument("synth config: rater_noise must lie in [0, 1)");
        if (n_raters < 3) throw std::invalid_argument("synth config: need at least 3 raters");
    }
};

inline nlohmann::json config_to_json(const SynthConfig& cfg) {
    nlohmann::json rates;
    for (const auto& [t, rate] : cfg.class_rates) rates[triple_key(t)] = rate;
    nlohmann::json spikes = nlohmann::json::array();
    for (const auto& s : cfg.spam_spikes)
        spikes.push_back({{"week", s.week}, {"class", triple_key(s.cls)}, {"magnitude", s.magnitude}});
    return {{"seed", cfg.seed},
            {"n_weeks", cfg.n_weeks},
            {"start", format_date(cfg.start)},
            {"base_sales", cfg.base_sales},
            {"summer_dip", cfg.summer_dip},
            {"december_peak", cfg.december_peak},
            {"noise_sd", cfg.noise_sd},
            {"class_rates", rates},
            {"effect",
             {{"source", triple_key(cfg.effect.source)},
              {"lags", cfg.effect.lags},
              {"coefficient", cfg.effect.coefficient}}},
            {"spam_spikes", spikes},
            {"rater_noise", cfg.rater_noise},
            {"n_raters", cfg.n_raters},
            {"country", cfg.country},
            {"language", cfg.language},
            {"timezone", cfg.timezone}};
}

/// Parses a config, starting from defaults; unknown keys are rejected so
/// typos do not silently fall back.
inline SynthConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw parse_error("synth config must be a JSON object");
    static const std::set<std::string> known = {
        "seed",        "n_weeks",     "start",       "base_sales", "summer_dip",
        "december_peak", "noise_sd",  "class_rates", "effect",     "spam_spikes",
        "rater_noise", "n_raters",    "country",     "language",   "timezone"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) throw parse_error("unknown synth config key '" + key + "'");
    }
    SynthConfig cfg;
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("n_weeks")) cfg.n_weeks = j["n_weeks"].get<int>();
    if (j.contains("start")) cfg.start = parse_date(j["start"].get<std::string>());
    if (j.contains("base_sales")) cfg.base_sales = j["base_sales"].get<double>();
    if (j.contains("summer_dip")) cfg.summer_dip = j["summer_dip"].get<double>();
    if (j.contains("december_peak")) cfg.december_peak = j["december_peak"].get<double>();
    if (j.contains("noise_sd")) cfg.noise_sd = j["noise_sd"].get<double>();
    if (j.contains("class_rates")) {
        cfg.class_rates.clear();
        for (const auto& [key, rate] : j["class_rates"].items())
            cfg.class_rates[triple_from_key(key)] = rate.get<double>();
    }
    if (j.contains("effect")) {
        const auto& e = j["effect"];
        if (e.contains("source")) cfg.effect.source = triple_from_key(e["source"].get<std::string>());
        if (e.contains("lags")) cfg.effect.lags = e["lags"].get<std::vector<int>>();
        if (e.contains("coefficient")) cfg.effect.coefficient = e["coefficient"].get<double>();
    }
    if (j.contains("spam_spikes")) {
        cfg.spam_spikes.clear();
        for (const auto& s : j["spam_spikes"])
            cfg.spam_spikes.push_back({s.at("week").get<int>(),
                                       triple_from_key(s.at("class").get<std::string>()),
                                       s.at("magnitude").get<long>()});
    }
    if (j.contains("rater_noise")) cfg.rater_noise = j["rater_noise"].get<double>();
    if (j.contains("n_raters")) cfg.n_raters = j["n_raters"].get<int>();
    if (j.contains("country")) cfg.country = j["country"].get<std::string>();
    if (j.contains("language")) cfg.language = j["language"].get<std::string>();
    if (j.contains("timezone")) cfg.timezone = j["timezone"].get<std::string>();
    return cfg;
}

struct GroundTruth {
    std::map<classify::Triple, std::vector<long>> weekly_counts;  // realized, spikes included
    SynthEffect effect;
    std::vector<double> noiseless_sales;        // everything but the Gaussian term
    std::vector<classify::RawTriple> raw_labels;  // true raw class per generated tweet
};

struct SynthDataset {
    std::vector<ingest::TweetRecord> tweets;
    std::vector<ingest::SalesRecord> sales;
    GroundTruth truth;
};

namespace detail {

/// Multiplicative season on a 52-week cycle relative to the series start:
/// weeks 26..34 dip, 48..52 peak (1-based within the cycle).
inline double season_factor(const SynthConfig& cfg, int t) {
    const int wk = t % 52 + 1;
    if (wk >= 26 && wk <= 34) return cfg.summer_dip;
    if (wk >= 48 && wk <= 52) return cfg.december_peak;
    return 1.0;
}

inline const std::array<const char*, 10>& filler_words() {
    static const std::array<const char*, 10> words = {
        "nieuwe", "posters", "vandaag", "mooi", "snel", "goed", "week", "print", "bestel", "kaarten"};
    return words;
}

/// Raw classes that aggregate to the given revised class, used to pick a
/// concrete true label per tweet.
inline std::vector<classify::RawTweetType> raw_preimage(classify::TweetType t) {
    using classify::RawTweetType;
    switch (t) {
        case classify::TweetType::job_advert: return {RawTweetType::job_advert};
        case classify::TweetType::product_advert: return {RawTweetType::product_advert};
        case classify::TweetType::personal:
            return {RawTweetType::customer_experience, RawTweetType::response_to_experience,
                    RawTweetType::chatter, RawTweetType::what_was_bought,
                    RawTweetType::information_request, RawTweetType::advice};
        case classify::TweetType::other: return {RawTweetType::news, RawTweetType::other};
    }
    throw std::invalid_argument("raw_preimage: bad tweet type");
}

inline std::vector<classify::RawUserType> raw_preimage(classify::UserType u) {
    using classify::RawUserType;
    if (u == classify::UserType::person) return {RawUserType::person};
    return {RawUserType::company, RawUserType::other_organizations};
}

inline std::vector<classify::RawSentiment> raw_preimage(classify::Sentiment s) {
    using classify::RawSentiment;
    if (s == classify::Sentiment::positive) return {RawSentiment::positive};
    return {RawSentiment::neutral, RawSentiment::negative};
}

/// Builds one tweet whose surface features encode its class: first-name
/// usernames for persons, high statuses_count plus hyperlinks for adverts
/// (two links marks a product advert), a mention for personal
/// communication, exclamation marks for positive sentiment.
inline ingest::TweetRecord make_tweet(Xoshiro256& rng, const classify::Triple& cls,
                                      const SynthConfig& cfg, std::int64_t week_start_day,
                                      std::size_t serial) {
    using classify::Sentiment;
    using classify::TweetType;
    using classify::UserType;
    ingest::TweetRecord t;
    t.id = "t" + std::to_string(serial);
    t.created_at = Timestamp{week_start_day * 86400 + static_cast<std::int64_t>(rng.below(604800))};
    t.language = cfg.language;
    t.user_timezone = cfg.timezone;

    if (cls.user_type == UserType::person) {
        const std::string first = kFirstNames[rng.below(kFirstNames.size())];
        const std::string last = kSurnames[rng.below(kSurnames.size())];
        std::string cap = first;
        cap[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(cap[0])));
        t.user_name = cap + " " + last;
        t.user_screen_name = first + "_" + std::to_string(rng.below(100));
    } else {
        const std::size_t org = rng.below(kOrgNames.size());
        t.user_name = kOrgNames[org];
        t.user_screen_name = kOrgScreens[org];
    }

    const bool advert =
        cls.tweet_type == TweetType::job_advert || cls.tweet_type == TweetType::product_advert;
    t.statuses_count = advert ? 5000 + static_cast<std::int64_t>(rng.below(15001))
                              : 50 + static_cast<std::int64_t>(rng.below(501));
    t.followers = 100 + static_cast<std::int64_t>(rng.below(2901));
    t.friends = static_cast<std::int64_t>(rng.below(1000));
    t.retweet_count = rng.poisson(0.5);
    t.is_retweet = rng.bernoulli(0.05);

    std::string text;
    const std::size_t n_words = 3 + rng.below(4);
    for (std::size_t i = 0; i < n_words; ++i) {
        if (!text.empty()) text += ' ';
        text += filler_words()[rng.below(filler_words().size())];
    }
    switch (cls.tweet_type) {
        case TweetType::job_advert:
            text += " vacature http://sx.example/j" + std::to_string(rng.below(1000));
            break;
        case TweetType::product_advert:
            text += " aanbieding http://sx.example/p" + std::to_string(rng.below(1000)) +
                    " http://sx.example/q" + std::to_string(rng.below(1000));
            break;
        case TweetType::personal:
            text += " @" + std::string(kFirstNames[rng.below(kFirstNames.size())]);
            break;
        case TweetType::other: break;
    }
    if (rng.bernoulli(0.3)) text += " #sx";
    if (cls.sentiment == Sentiment::positive) {
        text += ' ';
        text.append(1 + rng.below(3), '!');
        if (rng.bernoulli(0.3)) text += " :)";
    } else if (rng.bernoulli(0.2)) {
        text += " :(";
    }
    t.text = text;
    return t;
}

} // namespace detail

/// Deterministic dataset draw. The PRNG stream is consumed in a fixed
/// order: weeks outermost, classes in sorted-triple order, tweets within a
/// class in draw order, then the weekly sales noise.
inline SynthDataset generate_dataset(const SynthConfig& cfg) {
    cfg.validate();
    Xoshiro256 rng(cfg.seed);
    SynthDataset out;
    const std::int64_t start_day = days_since_epoch(cfg.start);

    for (const auto& [cls, rate] : cfg.class_rates) {
        (void)rate;
        out.truth.weekly_counts[cls];
    }
    for (const auto& s : cfg.spam_spikes) out.truth.weekly_counts[s.cls];
    for (auto& [cls, counts] : out.truth.weekly_counts)
        counts.assign(static_cast<std::size_t>(cfg.n_weeks), 0);

    std::size_t serial = 0;
    for (int t = 0; t < cfg.n_weeks; ++t) {
        const std::int64_t week_day = start_day + static_cast<std::int64_t>(t) * 7;
        for (auto& [cls, counts] : out.truth.weekly_counts) {
            long n = 0;
            const auto rate_it = cfg.class_rates.find(cls);
            if (rate_it != cfg.class_rates.end() && rate_it->second > 0.0)
                n = rng.poisson(rate_it->second);
            for (const auto& s : cfg.spam_spikes)
                if (s.week == t && s.cls == cls) n += s.magnitude;
            counts[static_cast<std::size_t>(t)] = n;
            for (long i = 0; i < n; ++i) {
                out.tweets.push_back(detail::make_tweet(rng, cls, cfg, week_day, serial++));
                const auto tt = detail::raw_preimage(cls.tweet_type);
                const auto uu = detail::raw_preimage(cls.user_type);
                const auto ss = detail::raw_preimage(cls.sentiment);
                out.truth.raw_labels.push_back({tt[rng.below(tt.size())], uu[rng.below(uu.size())],
                                                ss[rng.below(ss.size())]});
            }
        }
    }

    out.truth.effect = cfg.effect;
    const auto src_it = out.truth.weekly_counts.find(cfg.effect.source);
    out.truth.noiseless_sales.resize(static_cast<std::size_t>(cfg.n_weeks));
    for (int t = 0; t < cfg.n_weeks; ++t) {
        double v = cfg.base_sales * detail::season_factor(cfg, t);
        if (src_it != out.truth.weekly_counts.end())
            for (int l : cfg.effect.lags)
                if (t - l >= 0)
                    v += cfg.effect.coefficient *
                         static_cast<double>(src_it->second[static_cast<std::size_t>(t - l)]);
        out.truth.noiseless_sales[static_cast<std::size_t>(t)] = v;
    }
    for (int t = 0; t < cfg.n_weeks; ++t) {
        const double units = std::max(
            0.0, out.truth.noiseless_sales[static_cast<std::size_t>(t)] + cfg.noise_sd * rng.gaussian());
        out.sales.push_back({date_from_days(start_day + static_cast<std::int64_t>(t) * 7),
                             cfg.country, units});
    }
    return out;
}

/// Three ratings per tweet from a pool of n_raters distinct raters; each
/// dimension independently flips to a uniformly random other raw class
/// with probability rater_noise.
inline std::vector<classify::LabelRecord> label_sample(
    const std::vector<ingest::TweetRecord>& tweets,
    const std::vector<classify::RawTriple>& truth, double rater_noise, std::uint64_t seed,
    int n_raters = 30) {
    if (tweets.size() != truth.size())
        throw std::invalid_argument("label_sample: one true label required per tweet");
    if (!(rater_noise >= 0.0 && rater_noise < 1.0))
        throw std::invalid_argument("label_sample: rater_noise must lie in [0, 1)");
    if (n_raters < 3) throw std::invalid_argument("label_sample: need at least 3 raters");

    Xoshiro256 rng(seed);
    const auto flip_to_other = [&rng](int current, std::size_t n_classes) {
        std::size_t pick = rng.below(n_classes - 1);
        if (pick >= static_cast<std::size_t>(current)) ++pick;
        return static_cast<int>(pick);
    };

    std::vector<classify::LabelRecord> out;
    for (std::size_t i = 0; i < tweets.size(); ++i) {
        std::array<std::size_t, 3> raters{};
        raters[0] = rng.below(static_cast<std::size_t>(n_raters));
        raters[1] = rng.below(static_cast<std::size_t>(n_raters) - 1);
        if (raters[1] >= raters[0]) ++raters[1];
        raters[2] = rng.below(static_cast<std::size_t>(n_raters) - 2);
        for (std::size_t r : {std::min(raters[0], raters[1]), std::max(raters[0], raters[1])})
            if (raters[2] >= r) ++raters[2];

        for (std::size_t r = 0; r < 3; ++r) {
            classify::RawTriple label = truth[i];
            if (rng.bernoulli(rater_noise))
                label.tweet_type = static_cast<classify::RawTweetType>(flip_to_other(
                    static_cast<int>(label.tweet_type), classify::kRawTweetTypeNames.size()));
            if (rng.bernoulli(rater_noise))
                label.user_type = static_cast<classify::RawUserType>(flip_to_other(
                    static_cast<int>(label.user_type), classify::kRawUserTypeNames.size()));
            if (rng.bernoulli(rater_noise))
                label.sentiment = static_cast<classify::RawSentiment>(flip_to_other(
                    static_cast<int>(label.sentiment), classify::kRawSentimentNames.size()));
            out.push_back({tweets[i].id, "r" + std::to_string(raters[r] + 1), label});
        }
    }
    return out;
}

inline nlohmann::json ground_truth_to_json(const GroundTruth& truth) {
    nlohmann::json counts;
    for (const auto& [cls, weekly] : truth.weekly_counts) counts[triple_key(cls)] = weekly;
    nlohmann::json raw = nlohmann::json::array();
    for (const auto& r : truth.raw_labels) raw.push_back(raw_triple_key(r));
    return {{"weekly_counts", counts},
            {"effect",
             {{"source", triple_key(truth.effect.source)},
              {"lags", truth.effect.lags},
              {"coefficient", truth.effect.coefficient}}},
            {"noiseless_sales", truth.noiseless_sales},
            {"raw_labels", raw}};
}

} // namespace signallab::synth
