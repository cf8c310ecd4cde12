#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <istream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "signallab/core/error.hpp"
#include "signallab/ingest/records.hpp"

namespace signallab::classify {

constexpr std::size_t kNumFeatures = 12;

/// Order is part of the model format; stored trees index into it.
constexpr std::array<const char*, kNumFeatures> kFeatureNames = {
    "retweet_count",       "is_retweet",          "n_hyperlinks", "n_hashtags",
    "n_mentions",          "has_emoticon",        "n_question_marks",
    "n_exclamation_marks", "followers",           "friends",
    "statuses_count",      "username_has_first_name",
};

struct TweetFeatures {
    std::array<double, kNumFeatures> values{};

    double operator[](std::size_t i) const { return values[i]; }
    auto begin() const { return values.begin(); }
    auto end() const { return values.end(); }
    bool operator==(const TweetFeatures&) const = default;
};

inline const std::set<std::string>& default_emoticons() {
    static const std::set<std::string> set = {":)", ":-)", ":(",  ":-(", ":D", ";)",
                                              ";-)", ":P",  ":p", "=)",  "=("};
    return set;
}

/// First names used for the username feature, one per line, lowercase.
/// Lines starting with '#' are comments.
inline std::set<std::string> load_lexicon(std::istream& in) {
    std::set<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t a = line.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        std::size_t b = line.find_last_not_of(" \t");
        std::string word = line.substr(a, b - a + 1);
        if (word.empty() || word[0] == '#') continue;
        for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        names.insert(word);
    }
    return names;
}

namespace detail {

/// Counts non-overlapping occurrences of needle in haystack.
inline int count_substr(const std::string& haystack, const std::string& needle) {
    if (needle.empty()) return 0;
    int n = 0;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

/// A hashtag is '#' immediately followed by a letter or digit; a mention is
/// '@' immediately followed by a letter, digit, or underscore.
inline int count_markers(const std::string& text, char marker, bool allow_underscore) {
    int n = 0;
    for (std::size_t i = 0; i + 1 < text.size(); ++i) {
        if (text[i] != marker) continue;
        const char next = text[i + 1];
        if (std::isalnum(static_cast<unsigned char>(next)) || (allow_underscore && next == '_'))
            ++n;
    }
    return n;
}

inline bool contains_emoticon(const std::string& text, const std::set<std::string>& emoticons) {
    for (const auto& e : emoticons)
        if (text.find(e) != std::string::npos) return true;
    return false;
}

/// True when any maximal alphabetic run, case-folded, is in the lexicon:
/// "Anna_k93" matches "anna".
inline bool any_name_run(const std::string& s, const std::set<std::string>& lexicon) {
    std::string token;
    auto flush = [&]() {
        bool hit = !token.empty() && lexicon.count(token) > 0;
        token.clear();
        return hit;
    };
    for (char c : s) {
        if (std::isalpha(static_cast<unsigned char>(c)))
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else if (flush())
            return true;
    }
    return flush();
}

} // namespace detail

/// Maps one tweet onto the fixed feature vector. Only surface counts and
/// profile numbers; nothing here depends on the tweet's language.
inline TweetFeatures extract_features(const ingest::TweetRecord& t,
                                      const std::set<std::string>& name_lexicon,
                                      const std::set<std::string>& emoticons = default_emoticons()) {
    if (name_lexicon.empty()) throw std::invalid_argument("empty name lexicon");
    if (emoticons.empty()) throw std::invalid_argument("empty emoticon set");
    TweetFeatures f;
    f.values[0] = static_cast<double>(t.retweet_count);
    f.values[1] = t.is_retweet ? 1.0 : 0.0;
    f.values[2] = detail::count_substr(t.text, "http://") + detail::count_substr(t.text, "https://");
    f.values[3] = detail::count_markers(t.text, '#', false);
    f.values[4] = detail::count_markers(t.text, '@', true);
    f.values[5] = detail::contains_emoticon(t.text, emoticons) ? 1.0 : 0.0;
    f.values[6] = static_cast<double>(std::count(t.text.begin(), t.text.end(), '?'));
    f.values[7] = static_cast<double>(std::count(t.text.begin(), t.text.end(), '!'));
    f.values[8] = static_cast<double>(t.followers);
    f.values[9] = static_cast<double>(t.friends);
    f.values[10] = static_cast<double>(t.statuses_count);
    f.values[11] = (detail::any_name_run(t.user_screen_name, name_lexicon) ||
                    detail::any_name_run(t.user_name, name_lexicon))
                       ? 1.0
                       : 0.0;
    return f;
}

} // namespace signallab::classify
