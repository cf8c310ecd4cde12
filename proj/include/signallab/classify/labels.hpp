#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "signallab/core/error.hpp"

namespace signallab::classify {

// Raw label scheme: the classes used for manual rating.
enum class RawTweetType {
    job_advert,
    product_advert,
    customer_experience,
    response_to_experience,
    chatter,
    what_was_bought,
    information_request,
    advice,
    news,
    other,
};
enum class RawUserType { person, company, other_organizations };
enum class RawSentiment { positive, neutral, negative };

// Revised scheme: coarser classes used for training and analysis.
enum class TweetType { job_advert, product_advert, personal, other };
enum class UserType { person, organization };
enum class Sentiment { positive, not_positive };

enum class Dimension { tweet_type, user_type, sentiment };

inline constexpr std::array kRawTweetTypeNames = {
    "job_advert",       "product_advert", "customer_experience", "response_to_experience",
    "chatter",          "what_was_bought", "information_request", "advice",
    "news",             "other"};
inline constexpr std::array kRawUserTypeNames = {"person", "company", "other_organizations"};
inline constexpr std::array kRawSentimentNames = {"positive", "neutral", "negative"};

inline constexpr std::array kTweetTypeNames = {"job_advert", "product_advert", "personal", "other"};
inline constexpr std::array kUserTypeNames = {"person", "organization"};
inline constexpr std::array kSentimentNames = {"positive", "not_positive"};

inline constexpr std::array kDimensionNames = {"tweet_type", "user_type", "sentiment"};

namespace detail {

template <typename Enum, std::size_t N>
Enum enum_from_name(const std::array<const char*, N>& names, const std::string& s,
                    const char* what) {
    for (std::size_t i = 0; i < N; ++i)
        if (s == names[i]) return static_cast<Enum>(i);
    throw parse_error(std::string("unknown ") + what + " class '" + s + "'");
}

} // namespace detail

inline const char* to_string(RawTweetType v) { return kRawTweetTypeNames[static_cast<int>(v)]; }
inline const char* to_string(RawUserType v) { return kRawUserTypeNames[static_cast<int>(v)]; }
inline const char* to_string(RawSentiment v) { return kRawSentimentNames[static_cast<int>(v)]; }
inline const char* to_string(TweetType v) { return kTweetTypeNames[static_cast<int>(v)]; }
inline const char* to_string(UserType v) { return kUserTypeNames[static_cast<int>(v)]; }
inline const char* to_string(Sentiment v) { return kSentimentNames[static_cast<int>(v)]; }
inline const char* to_string(Dimension v) { return kDimensionNames[static_cast<int>(v)]; }

inline RawTweetType raw_tweet_type_from(const std::string& s) {
    return detail::enum_from_name<RawTweetType>(kRawTweetTypeNames, s, "tweet_type");
}
inline RawUserType raw_user_type_from(const std::string& s) {
    return detail::enum_from_name<RawUserType>(kRawUserTypeNames, s, "user_type");
}
inline RawSentiment raw_sentiment_from(const std::string& s) {
    return detail::enum_from_name<RawSentiment>(kRawSentimentNames, s, "sentiment");
}
inline TweetType tweet_type_from(const std::string& s) {
    return detail::enum_from_name<TweetType>(kTweetTypeNames, s, "tweet_type");
}
inline UserType user_type_from(const std::string& s) {
    return detail::enum_from_name<UserType>(kUserTypeNames, s, "user_type");
}
inline Sentiment sentiment_from(const std::string& s) {
    return detail::enum_from_name<Sentiment>(kSentimentNames, s, "sentiment");
}
inline Dimension dimension_from(const std::string& s) {
    return detail::enum_from_name<Dimension>(kDimensionNames, s, "dimension");
}

struct RawTriple {
    RawTweetType tweet_type{};
    RawUserType user_type{};
    RawSentiment sentiment{};
    auto operator<=>(const RawTriple&) const = default;
};

struct Triple {
    TweetType tweet_type{};
    UserType user_type{};
    Sentiment sentiment{};
    auto operator<=>(const Triple&) const = default;
};

/// Collapses a raw triple into the revised scheme: the six personal-
/// communication classes merge into `personal`, news joins `other`, the two
/// non-person user classes merge, and neutral joins negative.
inline TweetType aggregate_tweet_type(RawTweetType t) {
    switch (t) {
        case RawTweetType::job_advert: return TweetType::job_advert;
        case RawTweetType::product_advert: return TweetType::product_advert;
        case RawTweetType::customer_experience:
        case RawTweetType::response_to_experience:
        case RawTweetType::chatter:
        case RawTweetType::what_was_bought:
        case RawTweetType::information_request:
        case RawTweetType::advice: return TweetType::personal;
        case RawTweetType::news:
        case RawTweetType::other: return TweetType::other;
    }
    throw parse_error("unknown raw tweet_type value");
}

inline UserType aggregate_user_type(RawUserType u) {
    return u == RawUserType::person ? UserType::person : UserType::organization;
}

inline Sentiment aggregate_sentiment(RawSentiment s) {
    return s == RawSentiment::positive ? Sentiment::positive : Sentiment::not_positive;
}

inline Triple aggregate_classes(const RawTriple& raw) {
    return Triple{aggregate_tweet_type(raw.tweet_type), aggregate_user_type(raw.user_type),
                  aggregate_sentiment(raw.sentiment)};
}

/// One manual rating of one tweet.
struct LabelRecord {
    std::string tweet_id;
    std::string rater_id;
    RawTriple label;
};

namespace detail {

template <typename T>
std::optional<T> majority3(T a, T b, T c) {
    if (a == b || a == c) return a;
    if (b == c) return b;
    return std::nullopt;
}

inline void require_three(std::span<const LabelRecord> ratings) {
    if (ratings.size() != 3)
        throw parse_error("expected exactly 3 ratings per tweet, found " +
                          std::to_string(ratings.size()) +
                          (ratings.empty() ? "" : " for tweet '" + ratings[0].tweet_id + "'"));
    if (ratings[0].tweet_id != ratings[1].tweet_id || ratings[0].tweet_id != ratings[2].tweet_id)
        throw parse_error("ratings for different tweets grouped together");
}

} // namespace detail

/// Majority class (at least 2 of 3 raters) in one dimension of the raw
/// scheme, or nullopt when all three disagree.
inline std::optional<RawTweetType> consensus_raw_tweet_type(std::span<const LabelRecord> r) {
    detail::require_three(r);
    return detail::majority3(r[0].label.tweet_type, r[1].label.tweet_type, r[2].label.tweet_type);
}
inline std::optional<RawUserType> consensus_raw_user_type(std::span<const LabelRecord> r) {
    detail::require_three(r);
    return detail::majority3(r[0].label.user_type, r[1].label.user_type, r[2].label.user_type);
}
inline std::optional<RawSentiment> consensus_raw_sentiment(std::span<const LabelRecord> r) {
    detail::require_three(r);
    return detail::majority3(r[0].label.sentiment, r[1].label.sentiment, r[2].label.sentiment);
}

/// Consensus in the revised scheme: each rating is aggregated first, so
/// raters who disagree on a personal sub-class still agree on `personal`.
inline std::optional<TweetType> consensus_tweet_type(std::span<const LabelRecord> r) {
    detail::require_three(r);
    return detail::majority3(aggregate_tweet_type(r[0].label.tweet_type),
                             aggregate_tweet_type(r[1].label.tweet_type),
                             aggregate_tweet_type(r[2].label.tweet_type));
}
inline std::optional<UserType> consensus_user_type(std::span<const LabelRecord> r) {
    detail::require_three(r);
    return detail::majority3(aggregate_user_type(r[0].label.user_type),
                             aggregate_user_type(r[1].label.user_type),
                             aggregate_user_type(r[2].label.user_type));
}
inline std::optional<Sentiment> consensus_sentiment(std::span<const LabelRecord> r) {
    detail::require_three(r);
    return detail::majority3(aggregate_sentiment(r[0].label.sentiment),
                             aggregate_sentiment(r[1].label.sentiment),
                             aggregate_sentiment(r[2].label.sentiment));
}

enum class Scheme { raw, revised };

/// Hit/miss agreement over grouped ratings. A rating is a hit when at least
/// one of the other two raters of the same tweet chose the same class.
struct AgreementReport {
    struct PerClass {
        std::size_t hits = 0;
        std::size_t total = 0;
        double accuracy() const { return total ? static_cast<double>(hits) / total : 0.0; }
    };
    std::map<std::string, PerClass> per_class;
    std::size_t hits = 0;
    std::size_t n_ratings = 0;
    double overall_accuracy() const { return n_ratings ? static_cast<double>(hits) / n_ratings : 0.0; }
};

inline AgreementReport agreement_accuracy(const std::vector<std::vector<LabelRecord>>& groups,
                                          Dimension dim, Scheme scheme) {
    AgreementReport report;
    auto class_of = [&](const LabelRecord& rec) -> std::string {
        switch (dim) {
            case Dimension::tweet_type:
                return scheme == Scheme::raw ? to_string(rec.label.tweet_type)
                                             : to_string(aggregate_tweet_type(rec.label.tweet_type));
            case Dimension::user_type:
                return scheme == Scheme::raw ? to_string(rec.label.user_type)
                                             : to_string(aggregate_user_type(rec.label.user_type));
            case Dimension::sentiment:
                return scheme == Scheme::raw ? to_string(rec.label.sentiment)
                                             : to_string(aggregate_sentiment(rec.label.sentiment));
        }
        return {};
    };
    for (const auto& group : groups) {
        detail::require_three(std::span<const LabelRecord>{group});
        std::array<std::string, 3> cls = {class_of(group[0]), class_of(group[1]),
                                          class_of(group[2])};
        for (int i = 0; i < 3; ++i) {
            bool hit = cls[i] == cls[(i + 1) % 3] || cls[i] == cls[(i + 2) % 3];
            auto& pc = report.per_class[cls[i]];
            ++pc.total;
            ++report.n_ratings;
            if (hit) {
                ++pc.hits;
                ++report.hits;
            }
        }
    }
    return report;
}

/// Groups a flat rating list by tweet id, preserving first-seen order.
inline std::vector<std::vector<LabelRecord>> group_by_tweet(const std::vector<LabelRecord>& all) {
    std::vector<std::vector<LabelRecord>> groups;
    std::map<std::string, std::size_t> index;
    for (const auto& rec : all) {
        auto [it, inserted] = index.try_emplace(rec.tweet_id, groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(rec);
    }
    return groups;
}

} // namespace signallab::classify
