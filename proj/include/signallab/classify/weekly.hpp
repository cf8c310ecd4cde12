#pragma once

#include <optional>
#include <string>
#include <vector>

#include "signallab/classify/labels.hpp"
#include "signallab/ingest/ingest.hpp"

namespace signallab::classify {

/// Conjunction of per-dimension constraints; an unset dimension matches any
/// class. The empty filter matches every tweet.
struct TripleFilter {
    std::optional<TweetType> tweet_type;
    std::optional<UserType> user_type;
    std::optional<Sentiment> sentiment;

    bool matches(const Triple& t) const {
        if (tweet_type && *tweet_type != t.tweet_type) return false;
        if (user_type && *user_type != t.user_type) return false;
        if (sentiment && *sentiment != t.sentiment) return false;
        return true;
    }

    /// Short tag used in report rows, e.g. "person/product_advert/positive"
    /// with "all" for unset dimensions (user, tweet, sentiment order).
    std::string describe() const {
        std::string s = user_type ? to_string(*user_type) : "all";
        s += '/';
        s += tweet_type ? to_string(*tweet_type) : "all";
        s += '/';
        s += sentiment ? to_string(*sentiment) : "all";
        return s;
    }

    bool operator==(const TripleFilter&) const = default;
};

/// Weekly counts of tweets whose predicted triple passes the filter.
/// Weeks without matches hold zero, like the unfiltered aggregation.
inline WeeklySeries classified_weekly_counts(const std::vector<ingest::TweetRecord>& tweets,
                                             const std::vector<Triple>& predicted, Date from,
                                             Date to, const TripleFilter& filter,
                                             std::size_t* n_outside = nullptr) {
    if (tweets.size() != predicted.size())
        throw std::invalid_argument("one predicted triple required per tweet");
    std::vector<Timestamp> kept;
    for (std::size_t i = 0; i < tweets.size(); ++i)
        if (filter.matches(predicted[i])) kept.push_back(tweets[i].created_at);
    return ingest::aggregate_weekly(kept, from, to, n_outside, filter.describe());
}

/// Inverse of describe(): parses "user/tweet/sentiment" with "all" for an
/// unset dimension.
inline TripleFilter filter_from_string(const std::string& desc) {
    const auto a = desc.find('/');
    const auto b = desc.rfind('/');
    if (a == std::string::npos || b == a)
        throw parse_error("bad filter '" + desc + "', expected user/tweet/sentiment");
    const std::string u = desc.substr(0, a);
    const std::string t = desc.substr(a + 1, b - a - 1);
    const std::string s = desc.substr(b + 1);
    TripleFilter f;
    if (u != "all") f.user_type = user_type_from(u);
    if (t != "all") f.tweet_type = tweet_type_from(t);
    if (s != "all") f.sentiment = sentiment_from(s);
    return f;
}

/// The filter grid the correlation report iterates over: every user-type
/// group crossed with the tweet-type and sentiment cuts that make sense for
/// it (adverts come from organizations, personal communication from people).
inline std::vector<TripleFilter> table_row_filters() {
    TripleFilter all;
    TripleFilter pos{.tweet_type = std::nullopt, .user_type = std::nullopt,
                     .sentiment = Sentiment::positive};
    TripleFilter ad{.tweet_type = TweetType::product_advert, .user_type = std::nullopt,
                    .sentiment = std::nullopt};
    TripleFilter pc{.tweet_type = TweetType::personal, .user_type = std::nullopt,
                    .sentiment = std::nullopt};
    TripleFilter pc_pos{.tweet_type = TweetType::personal, .user_type = std::nullopt,
                        .sentiment = Sentiment::positive};

    std::vector<TripleFilter> rows;
    auto with_user = [](TripleFilter f, std::optional<UserType> u) {
        f.user_type = u;
        return f;
    };
    for (auto f : {all, pos, ad, pc, pc_pos}) rows.push_back(with_user(f, std::nullopt));
    for (auto f : {all, pos, pc, pc_pos}) rows.push_back(with_user(f, UserType::person));
    for (auto f : {all, pos, ad}) rows.push_back(with_user(f, UserType::organization));
    return rows;
}

} // namespace signallab::classify
