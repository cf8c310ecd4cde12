#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "signallab/classify/labels.hpp"
#include "signallab/core/csv.hpp"
#include "signallab/core/date.hpp"
#include "signallab/core/error.hpp"

namespace signallab::ingest {

/// One collected tweet with the user metadata recorded alongside it.
struct TweetRecord {
    std::string id;
    std::string text;
    Timestamp created_at;
    std::string user_name;
    std::string user_screen_name;
    std::int64_t followers = 0;
    std::int64_t friends = 0;
    std::int64_t statuses_count = 0;
    std::int64_t retweet_count = 0;
    bool is_retweet = false;
    std::string user_timezone; // capital-city label
    std::string language;      // ISO-639-1
};

struct CountrySpec {
    std::string name;
    std::string language;
    std::string capital;
};

struct SalesRecord {
    Date week_start; // always a Monday
    std::string country;
    double units = 0.0;
};

enum class TweetFormat { jsonlines, csv };

inline constexpr const char* kTweetFields[] = {
    "id",      "text",          "created_at",    "user_name", "user_screen_name", "followers",
    "friends", "statuses_count", "retweet_count", "is_retweet", "user_timezone",   "language"};

namespace detail {

inline std::int64_t nonneg_count(const nlohmann::json& v, const char* field, std::size_t line) {
    if (!v.is_number_integer())
        throw parse_error(line, std::string("field ") + field + " must be an integer");
    std::int64_t n = v.get<std::int64_t>();
    if (n < 0) throw parse_error(line, std::string("negative ") + field);
    return n;
}

inline std::int64_t parse_count_str(const std::string& s, const char* field, std::size_t line) {
    try {
        std::size_t pos = 0;
        long long n = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        if (n < 0) throw parse_error(line, std::string("negative ") + field);
        return n;
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception&) {
        throw parse_error(line, std::string("field ") + field + " must be an integer");
    }
}

inline bool parse_bool_str(const std::string& s, const char* field, std::size_t line) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw parse_error(line, std::string("field ") + field + " must be true or false");
}

inline void check_tweet(TweetRecord& rec, std::unordered_set<std::string>& seen,
                        std::size_t line) {
    if (rec.id.empty()) throw parse_error(line, "empty id");
    if (!seen.insert(rec.id).second) throw parse_error(line, "duplicate id '" + rec.id + "'");
}

} // namespace detail

inline TweetRecord tweet_from_json(const nlohmann::json& obj, std::size_t line) {
    if (!obj.is_object()) throw parse_error(line, "expected a JSON object");
    for (const char* field : kTweetFields)
        if (!obj.contains(field)) throw parse_error(line, std::string("missing field ") + field);
    TweetRecord rec;
    auto str = [&](const char* field) -> std::string {
        const auto& v = obj.at(field);
        if (!v.is_string()) throw parse_error(line, std::string("field ") + field + " must be a string");
        return v.get<std::string>();
    };
    rec.id = str("id");
    rec.text = str("text");
    try {
        rec.created_at = parse_timestamp(str("created_at"));
    } catch (const parse_error& e) {
        throw parse_error(line, e.what());
    }
    rec.user_name = str("user_name");
    rec.user_screen_name = str("user_screen_name");
    rec.followers = detail::nonneg_count(obj.at("followers"), "followers", line);
    rec.friends = detail::nonneg_count(obj.at("friends"), "friends", line);
    rec.statuses_count = detail::nonneg_count(obj.at("statuses_count"), "statuses_count", line);
    rec.retweet_count = detail::nonneg_count(obj.at("retweet_count"), "retweet_count", line);
    if (!obj.at("is_retweet").is_boolean())
        throw parse_error(line, "field is_retweet must be a boolean");
    rec.is_retweet = obj.at("is_retweet").get<bool>();
    rec.user_timezone = str("user_timezone");
    rec.language = str("language");
    return rec;
}

inline std::vector<TweetRecord> parse_tweets_jsonlines(std::istream& in) {
    std::vector<TweetRecord> out;
    std::unordered_set<std::string> seen;
    std::string linebuf;
    std::size_t lineno = 0;
    while (std::getline(in, linebuf)) {
        ++lineno;
        if (linebuf.empty() || linebuf == "\r") continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(linebuf);
        } catch (const nlohmann::json::parse_error& e) {
            throw parse_error(lineno, std::string("malformed JSON: ") + e.what());
        }
        TweetRecord rec = tweet_from_json(obj, lineno);
        detail::check_tweet(rec, seen, lineno);
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<TweetRecord> parse_tweets_csv(std::istream& in) {
    CsvTable table = read_csv(in);
    int col[12];
    for (int i = 0; i < 12; ++i) {
        col[i] = table.column(kTweetFields[i]);
        if (col[i] < 0) throw parse_error(1, std::string("missing column ") + kTweetFields[i]);
    }
    std::vector<TweetRecord> out;
    std::unordered_set<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::size_t line = table.row_lines[r];
        TweetRecord rec;
        rec.id = row[col[0]];
        rec.text = row[col[1]];
        try {
            rec.created_at = parse_timestamp(row[col[2]]);
        } catch (const parse_error& e) {
            throw parse_error(line, e.what());
        }
        rec.user_name = row[col[3]];
        rec.user_screen_name = row[col[4]];
        rec.followers = detail::parse_count_str(row[col[5]], "followers", line);
        rec.friends = detail::parse_count_str(row[col[6]], "friends", line);
        rec.statuses_count = detail::parse_count_str(row[col[7]], "statuses_count", line);
        rec.retweet_count = detail::parse_count_str(row[col[8]], "retweet_count", line);
        rec.is_retweet = detail::parse_bool_str(row[col[9]], "is_retweet", line);
        rec.user_timezone = row[col[10]];
        rec.language = row[col[11]];
        detail::check_tweet(rec, seen, line);
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<TweetRecord> parse_tweets(std::istream& in, TweetFormat format) {
    return format == TweetFormat::jsonlines ? parse_tweets_jsonlines(in) : parse_tweets_csv(in);
}

inline std::vector<SalesRecord> parse_sales(std::istream& in) {
    CsvTable table = read_csv(in);
    if (table.header != std::vector<std::string>{"week_start", "country", "units"})
        throw parse_error(1, "sales header must be week_start,country,units");
    std::vector<SalesRecord> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::size_t line = table.row_lines[r];
        SalesRecord rec;
        try {
            rec.week_start = parse_date(table.rows[r][0]);
        } catch (const parse_error& e) {
            throw parse_error(line, e.what());
        }
        if (!is_monday(rec.week_start))
            throw parse_error(line, "week_start " + table.rows[r][0] + " is not a Monday");
        rec.country = table.rows[r][1];
        try {
            std::size_t pos = 0;
            rec.units = std::stod(table.rows[r][2], &pos);
            if (pos != table.rows[r][2].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw parse_error(line, "invalid units '" + table.rows[r][2] + "'");
        }
        if (rec.units < 0) throw parse_error(line, "negative units");
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<classify::LabelRecord> parse_labels(std::istream& in) {
    CsvTable table = read_csv(in);
    if (table.header !=
        std::vector<std::string>{"tweet_id", "rater_id", "tweet_type", "user_type", "sentiment"})
        throw parse_error(1, "labels header must be tweet_id,rater_id,tweet_type,user_type,sentiment");
    std::vector<classify::LabelRecord> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::size_t line = table.row_lines[r];
        classify::LabelRecord rec;
        rec.tweet_id = table.rows[r][0];
        rec.rater_id = table.rows[r][1];
        if (rec.tweet_id.empty()) throw parse_error(line, "empty tweet_id");
        try {
            rec.label.tweet_type = classify::raw_tweet_type_from(table.rows[r][2]);
            rec.label.user_type = classify::raw_user_type_from(table.rows[r][3]);
            rec.label.sentiment = classify::raw_sentiment_from(table.rows[r][4]);
        } catch (const parse_error& e) {
            throw parse_error(line, e.what());
        }
        out.push_back(std::move(rec));
    }
    return out;
}

inline nlohmann::json tweet_to_json(const TweetRecord& rec) {
    return nlohmann::json{{"id", rec.id},
                          {"text", rec.text},
                          {"created_at", format_timestamp(rec.created_at)},
                          {"user_name", rec.user_name},
                          {"user_screen_name", rec.user_screen_name},
                          {"followers", rec.followers},
                          {"friends", rec.friends},
                          {"statuses_count", rec.statuses_count},
                          {"retweet_count", rec.retweet_count},
                          {"is_retweet", rec.is_retweet},
                          {"user_timezone", rec.user_timezone},
                          {"language", rec.language}};
}

inline void write_tweets_jsonlines(std::ostream& os, const std::vector<TweetRecord>& tweets) {
    for (const auto& rec : tweets) os << tweet_to_json(rec).dump() << '\n';
}

inline void write_sales_csv(std::ostream& os, const std::vector<SalesRecord>& sales,
                            int digits = 10) {
    os << "week_start,country,units\n";
    for (const auto& rec : sales) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*g", digits, rec.units);
        write_csv_row(os, {format_date(rec.week_start), rec.country, buf});
    }
}

inline void write_labels_csv(std::ostream& os, const std::vector<classify::LabelRecord>& labels) {
    os << "tweet_id,rater_id,tweet_type,user_type,sentiment\n";
    for (const auto& rec : labels)
        write_csv_row(os, {rec.tweet_id, rec.rater_id, classify::to_string(rec.label.tweet_type),
                           classify::to_string(rec.label.user_type),
                           classify::to_string(rec.label.sentiment)});
}

} // namespace signallab::ingest
