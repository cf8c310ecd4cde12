#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "signallab/classify/features.hpp"
#include "signallab/core/error.hpp"
#include "signallab/core/rng.hpp"

namespace signallab::classify {

struct TrainParams {
    int max_depth = 6;
    std::size_t min_leaf = 5;
    std::uint64_t split_seed = 0;
};

/// Children always have larger indices than their parent, so node 0 is the
/// root and the array is cycle-free by construction.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int cls = -1;                        // leaf: majority class index
    std::vector<std::size_t> histogram;  // leaf: training counts per class

    bool is_leaf() const { return feature < 0; }
};

class DecisionTree {
public:
    std::string target;
    std::vector<std::string> class_names;
    std::vector<TreeNode> nodes;

    /// Routes left when value <= threshold. Confidence is the leaf's
    /// training frequency of the returned class.
    std::pair<std::string, double> predict(const TweetFeatures& f) const {
        const TreeNode* node = &nodes.at(0);
        while (!node->is_leaf())
            node = &nodes[static_cast<std::size_t>(f[static_cast<std::size_t>(node->feature)] <=
                                                           node->threshold
                                                       ? node->left
                                                       : node->right)];
        std::size_t total = 0;
        for (std::size_t c : node->histogram) total += c;
        const double conf =
            total == 0 ? 0.0
                       : static_cast<double>(node->histogram[static_cast<std::size_t>(node->cls)]) /
                             static_cast<double>(total);
        return {class_names[static_cast<std::size_t>(node->cls)], conf};
    }

    std::size_t depth() const {
        std::vector<std::size_t> d(nodes.size(), 0);
        std::size_t max_d = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].is_leaf()) continue;
            d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
            max_d = std::max(max_d, d[i] + 1);
        }
        return max_d;
    }

    std::size_t n_leaves() const {
        std::size_t n = 0;
        for (const auto& node : nodes) n += node.is_leaf();
        return n;
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& node : nodes) {
            if (node.is_leaf()) {
                nlohmann::json hist;
                for (std::size_t c = 0; c < node.histogram.size(); ++c)
                    if (node.histogram[c] > 0) hist[class_names[c]] = node.histogram[c];
                arr.push_back({{"class", class_names[static_cast<std::size_t>(node.cls)]},
                               {"histogram", hist}});
            } else {
                arr.push_back({{"feature", node.feature},
                               {"threshold", node.threshold},
                               {"left", node.left},
                               {"right", node.right}});
            }
        }
        return {{"target", target}, {"nodes", arr}};
    }

    static DecisionTree from_json(const nlohmann::json& j) {
        auto bad = [](const std::string& what) { return parse_error("tree json: " + what); };
        if (!j.is_object() || !j.contains("target") || !j.contains("nodes"))
            throw bad("expected object with target and nodes");
        if (!j["target"].is_string() || !j["nodes"].is_array() || j["nodes"].empty())
            throw bad("malformed target or nodes");

        DecisionTree tree;
        tree.target = j["target"].get<std::string>();
        std::set<std::string> names;
        for (const auto& n : j["nodes"]) {
            if (!n.contains("class")) continue;
            names.insert(n["class"].get<std::string>());
            for (const auto& [name, count] : n["histogram"].items()) {
                (void)count;
                names.insert(name);
            }
        }
        tree.class_names.assign(names.begin(), names.end());
        auto class_index = [&](const std::string& name) {
            auto it = std::lower_bound(tree.class_names.begin(), tree.class_names.end(), name);
            return static_cast<int>(it - tree.class_names.begin());
        };

        const int n_nodes = static_cast<int>(j["nodes"].size());
        for (int i = 0; i < n_nodes; ++i) {
            const auto& n = j["nodes"][static_cast<std::size_t>(i)];
            TreeNode node;
            if (n.contains("class")) {
                if (!n.contains("histogram") || !n["histogram"].is_object())
                    throw bad("leaf without histogram");
                node.cls = class_index(n["class"].get<std::string>());
                node.histogram.assign(tree.class_names.size(), 0);
                for (const auto& [name, count] : n["histogram"].items()) {
                    if (!count.is_number_unsigned()) throw bad("histogram count must be a non-negative integer");
                    node.histogram[static_cast<std::size_t>(class_index(name))] =
                        count.get<std::size_t>();
                }
                if (node.histogram[static_cast<std::size_t>(node.cls)] == 0)
                    throw bad("leaf class absent from histogram");
            } else {
                if (!n.contains("feature") || !n.contains("threshold") || !n.contains("left") ||
                    !n.contains("right"))
                    throw bad("internal node missing field");
                node.feature = n["feature"].get<int>();
                node.threshold = n["threshold"].get<double>();
                node.left = n["left"].get<int>();
                node.right = n["right"].get<int>();
                if (node.feature < 0 || node.feature >= static_cast<int>(kNumFeatures))
                    throw bad("feature index out of range");
                if (!std::isfinite(node.threshold)) throw bad("non-finite threshold");
                if (node.left <= i || node.left >= n_nodes || node.right <= i ||
                    node.right >= n_nodes)
                    throw bad("child index must point forward");
            }
            tree.nodes.push_back(std::move(node));
        }
        return tree;
    }
};

struct TrainReport {
    std::uint64_t split_seed = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::size_t n_correct = 0;
    double accuracy = std::numeric_limits<double>::quiet_NaN();
    struct PerClass {
        std::size_t correct = 0;
        std::size_t total = 0;
    };
    std::map<std::string, PerClass> per_class;  // held-out, keyed by true class
};

using Example = std::pair<TweetFeatures, std::string>;

namespace detail {

inline double gini(const std::vector<std::size_t>& counts, std::size_t n) {
    if (n == 0) return 0.0;
    double sum_sq = 0.0;
    for (std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(n);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

struct TreeBuilder {
    const std::vector<TweetFeatures>& xs;
    const std::vector<int>& ys;
    std::size_t n_classes;
    TrainParams params;
    std::vector<TreeNode> nodes;

    int build(std::vector<std::size_t>& idx, int depth) {
        std::vector<std::size_t> counts(n_classes, 0);
        for (std::size_t i : idx) ++counts[static_cast<std::size_t>(ys[i])];
        const std::size_t n = idx.size();

        int majority = 0;
        for (std::size_t c = 1; c < n_classes; ++c)
            if (counts[c] > counts[static_cast<std::size_t>(majority)])
                majority = static_cast<int>(c);
        const bool pure = counts[static_cast<std::size_t>(majority)] == n;

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_gini = std::numeric_limits<double>::infinity();
        if (!pure && depth < params.max_depth && n >= 2 * params.min_leaf) {
            std::vector<std::pair<double, int>> col(n);
            for (std::size_t f = 0; f < kNumFeatures; ++f) {
                for (std::size_t i = 0; i < n; ++i) col[i] = {xs[idx[i]][f], ys[idx[i]]};
                std::sort(col.begin(), col.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
                std::vector<std::size_t> left(n_classes, 0);
                std::vector<std::size_t> right = counts;
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    ++left[static_cast<std::size_t>(col[i].second)];
                    --right[static_cast<std::size_t>(col[i].second)];
                    if (col[i].first == col[i + 1].first) continue;
                    const std::size_t n_left = i + 1;
                    if (n_left < params.min_leaf || n - n_left < params.min_leaf) continue;
                    const double w =
                        (static_cast<double>(n_left) * gini(left, n_left) +
                         static_cast<double>(n - n_left) * gini(right, n - n_left)) /
                        static_cast<double>(n);
                    // Ascending (feature, threshold) iteration plus strict <
                    // yields the lowest-feature, lowest-threshold tie-break.
                    if (w < best_gini) {
                        best_gini = w;
                        best_feature = static_cast<int>(f);
                        best_threshold = (col[i].first + col[i + 1].first) / 2.0;
                    }
                }
            }
        }

        const int me = static_cast<int>(nodes.size());
        nodes.emplace_back();
        if (best_feature < 0) {
            nodes[static_cast<std::size_t>(me)].cls = majority;
            nodes[static_cast<std::size_t>(me)].histogram = std::move(counts);
            return me;
        }

        std::vector<std::size_t> left_idx, right_idx;
        for (std::size_t i : idx)
            (xs[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left_idx : right_idx)
                .push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        nodes[static_cast<std::size_t>(me)].feature = best_feature;
        nodes[static_cast<std::size_t>(me)].threshold = best_threshold;
        const int l = build(left_idx, depth + 1);
        nodes[static_cast<std::size_t>(me)].left = l;
        const int r = build(right_idx, depth + 1);
        nodes[static_cast<std::size_t>(me)].right = r;
        return me;
    }
};

} // namespace detail

/// CART with an 80/20 seeded-shuffle holdout. Classes are the sorted unique
/// labels; the report scores the held-out fifth.
inline std::pair<DecisionTree, TrainReport> train_tree(const std::vector<Example>& examples,
                                                       const std::string& target,
                                                       TrainParams params = {}) {
    if (examples.empty()) throw std::invalid_argument("train_tree: no examples");
    if (params.min_leaf == 0) throw std::invalid_argument("train_tree: min_leaf must be positive");
    if (examples.size() < 2 * params.min_leaf)
        throw std::invalid_argument("train_tree: need at least 2*min_leaf examples");

    DecisionTree tree;
    tree.target = target;
    std::set<std::string> names;
    for (const auto& [f, label] : examples) {
        (void)f;
        names.insert(label);
    }
    tree.class_names.assign(names.begin(), names.end());

    std::vector<TweetFeatures> xs(examples.size());
    std::vector<int> ys(examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
        xs[i] = examples[i].first;
        auto it = std::lower_bound(tree.class_names.begin(), tree.class_names.end(),
                                   examples[i].second);
        ys[i] = static_cast<int>(it - tree.class_names.begin());
    }

    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Xoshiro256 rng(params.split_seed);
    rng.shuffle(order);
    const std::size_t n_test = examples.size() / 5;
    const std::size_t n_train = examples.size() - n_test;
    std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));

    detail::TreeBuilder builder{xs, ys, tree.class_names.size(), params, {}};
    builder.build(train_idx, 0);
    tree.nodes = std::move(builder.nodes);

    TrainReport report;
    report.split_seed = params.split_seed;
    report.n_train = n_train;
    report.n_test = n_test;
    for (std::size_t i = n_train; i < order.size(); ++i) {
        const std::size_t k = order[i];
        const std::string& truth = tree.class_names[static_cast<std::size_t>(ys[k])];
        auto& pc = report.per_class[truth];
        ++pc.total;
        if (tree.predict(xs[k]).first == truth) {
            ++pc.correct;
            ++report.n_correct;
        }
    }
    if (n_test > 0)
        report.accuracy = static_cast<double>(report.n_correct) / static_cast<double>(n_test);
    return {std::move(tree), report};
}

} // namespace signallab::classify
