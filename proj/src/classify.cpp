#include "classify.hpp"

#include "cvss.hpp"
#include "errors.hpp"
#include "util.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <numeric>
#include <set>

namespace lucid {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_row(std::span<const double> row) {
    if (row.size() != Dataset::kFeatureCount) {
        throw InvalidArgument("feature row has " + std::to_string(row.size()) + " columns, want 10");
    }
}

int argmax_scores(const std::array<double, 5>& scores) {
    int best = 0;
    for (int c = 1; c < 5; ++c) {
        if (scores[c] > scores[best]) best = c; // strict: ties keep the lower code
    }
    return best;
}

// ---- Decision tree (also the forest member) ----

struct TreeNode {
    int feature = -1; // -1: leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::array<double, 5> class_shares{};
};

struct TreeConfig {
    int max_depth = -1; // -1: unlimited
    int max_features = Dataset::kFeatureCount;
};

class DecisionTree {
public:
    void fit(const std::vector<std::array<double, 10>>& x, const std::vector<int>& y,
             const std::vector<std::size_t>& rows, const TreeConfig& cfg, Rng& rng) {
        x_ = &x;
        y_ = &y;
        cfg_ = cfg;
        nodes_.clear();
        std::vector<std::size_t> work(rows);
        build(work, 0, rng);
        x_ = nullptr;
        y_ = nullptr;
    }

    Prediction predict(std::span<const double> row) const {
        int node = 0;
        while (nodes_[static_cast<std::size_t>(node)].feature >= 0) {
            const auto& n = nodes_[static_cast<std::size_t>(node)];
            node = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        Prediction out;
        out.scores = nodes_[static_cast<std::size_t>(node)].class_shares;
        out.label = argmax_scores(out.scores);
        return out;
    }

private:
    static double gini(const std::array<std::size_t, 5>& counts, std::size_t total) {
        double g = 1.0;
        for (std::size_t c : counts) {
            double p = static_cast<double>(c) / static_cast<double>(total);
            g -= p * p;
        }
        return g;
    }

    int build(std::vector<std::size_t>& rows, int depth, Rng& rng) {
        std::array<std::size_t, 5> counts{};
        for (std::size_t r : rows) counts[static_cast<std::size_t>((*y_)[r])] += 1;

        int node_index = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        {
            auto& node = nodes_.back();
            for (int c = 0; c < 5; ++c) {
                node.class_shares[static_cast<std::size_t>(c)] =
                    static_cast<double>(counts[static_cast<std::size_t>(c)]) /
                    static_cast<double>(rows.size());
            }
        }

        bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
        bool depth_capped = cfg_.max_depth >= 0 && depth >= cfg_.max_depth;
        if (pure || depth_capped || rows.size() < 2) return node_index;

        // Candidate features: all of them when max_features covers the space,
        // otherwise a seeded sample without replacement.
        std::array<int, Dataset::kFeatureCount> features;
        std::iota(features.begin(), features.end(), 0);
        int n_candidates = Dataset::kFeatureCount;
        if (cfg_.max_features < Dataset::kFeatureCount) {
            n_candidates = std::max(1, cfg_.max_features);
            for (int i = 0; i < n_candidates; ++i) {
                int j = i + static_cast<int>(rng.next_below(
                                static_cast<std::uint64_t>(Dataset::kFeatureCount - i)));
                std::swap(features[static_cast<std::size_t>(i)], features[static_cast<std::size_t>(j)]);
            }
            std::sort(features.begin(), features.begin() + n_candidates);
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = gini(counts, rows.size());
        std::vector<std::pair<double, int>> column(rows.size());
        for (int fi = 0; fi < n_candidates; ++fi) {
            int f = features[static_cast<std::size_t>(fi)];
            for (std::size_t i = 0; i < rows.size(); ++i) {
                column[i] = {(*x_)[rows[i]][static_cast<std::size_t>(f)], (*y_)[rows[i]]};
            }
            std::sort(column.begin(), column.end());
            std::array<std::size_t, 5> left{};
            std::size_t n_left = 0;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                left[static_cast<std::size_t>(column[i].second)] += 1;
                ++n_left;
                if (column[i].first == column[i + 1].first) continue;
                std::array<std::size_t, 5> right{};
                for (int c = 0; c < 5; ++c) {
                    right[static_cast<std::size_t>(c)] =
                        counts[static_cast<std::size_t>(c)] - left[static_cast<std::size_t>(c)];
                }
                std::size_t n_right = rows.size() - n_left;
                double score = (static_cast<double>(n_left) * gini(left, n_left) +
                                static_cast<double>(n_right) * gini(right, n_right)) /
                               static_cast<double>(rows.size());
                if (score + 1e-12 < best_score) {
                    best_score = score;
                    best_feature = f;
                    best_threshold = (column[i].first + column[i + 1].first) / 2.0;
                }
            }
        }
        if (best_feature < 0) return node_index;

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            if ((*x_)[r][static_cast<std::size_t>(best_feature)] <= best_threshold) left_rows.push_back(r);
            else right_rows.push_back(r);
        }
        if (left_rows.empty() || right_rows.empty()) return node_index;

        rows.clear();
        rows.shrink_to_fit();
        int left = build(left_rows, depth + 1, rng);
        int right = build(right_rows, depth + 1, rng);
        nodes_[static_cast<std::size_t>(node_index)].feature = best_feature;
        nodes_[static_cast<std::size_t>(node_index)].threshold = best_threshold;
        nodes_[static_cast<std::size_t>(node_index)].left = left;
        nodes_[static_cast<std::size_t>(node_index)].right = right;
        return node_index;
    }

    const std::vector<std::array<double, 10>>* x_ = nullptr;
    const std::vector<int>* y_ = nullptr;
    TreeConfig cfg_;
    std::vector<TreeNode> nodes_;
};

class TreeModel final : public Model {
public:
    TreeModel(const TrainerParams& params, const Dataset& ds, std::uint64_t seed) {
        TreeConfig cfg;
        cfg.max_depth = params.tree.max_depth.value_or(-1);
        cfg.max_features = std::min(params.tree.max_features, Dataset::kFeatureCount);
        std::vector<std::size_t> rows(ds.size());
        std::iota(rows.begin(), rows.end(), 0);
        Rng rng(child_seed(seed, 0));
        tree_.fit(ds.features, ds.labels, rows, cfg, rng);
    }

    Prediction predict(std::span<const double> row) const override {
        check_row(row);
        return tree_.predict(row);
    }

private:
    DecisionTree tree_;
};

class ForestModel final : public Model {
public:
    ForestModel(const TrainerParams& params, const Dataset& ds, std::uint64_t seed, int threads) {
        int n = std::max(1, params.forest.n_estimators);
        trees_.resize(static_cast<std::size_t>(n));
        TreeConfig cfg;
        cfg.max_depth = params.forest.max_depth;
        cfg.max_features = static_cast<int>(std::sqrt(static_cast<double>(Dataset::kFeatureCount)));

        auto fit_tree = [&](int t) {
            // One child generator per tree: identical output at any thread count.
            Rng rng(child_seed(seed, static_cast<std::uint64_t>(t) + 1));
            std::vector<std::size_t> rows(ds.size());
            for (auto& r : rows) r = static_cast<std::size_t>(rng.next_below(ds.size()));
            std::sort(rows.begin(), rows.end());
            trees_[static_cast<std::size_t>(t)].fit(ds.features, ds.labels, rows, cfg, rng);
        };

        if (threads > 1) {
            std::vector<std::future<void>> tasks;
            int per = (n + threads - 1) / threads;
            for (int start = 0; start < n; start += per) {
                int end = std::min(n, start + per);
                tasks.push_back(std::async(std::launch::async, [&, start, end] {
                    for (int t = start; t < end; ++t) fit_tree(t);
                }));
            }
            for (auto& task : tasks) task.get();
        } else {
            for (int t = 0; t < n; ++t) fit_tree(t);
        }
    }

    Prediction predict(std::span<const double> row) const override {
        check_row(row);
        Prediction out;
        for (const auto& tree : trees_) {
            out.scores[static_cast<std::size_t>(tree.predict(row).label)] += 1.0;
        }
        for (auto& s : out.scores) s /= static_cast<double>(trees_.size());
        out.label = argmax_scores(out.scores);
        return out;
    }

private:
    std::vector<DecisionTree> trees_;
};

class KnnModel final : public Model {
public:
    KnnModel(const TrainerParams& params, const Dataset& ds)
        : k_(params.knn.k), p_(params.knn.minkowski_p), x_(ds.features), y_(ds.labels) {
        if (k_ <= 0) throw InvalidArgument("kNN needs k >= 1");
        if (static_cast<std::size_t>(k_) > ds.size()) {
            throw InvalidArgument("kNN k=" + std::to_string(k_) + " exceeds training size " +
                                  std::to_string(ds.size()));
        }
    }

    Prediction predict(std::span<const double> row) const override {
        check_row(row);
        std::vector<std::pair<double, std::size_t>> dist(x_.size());
        for (std::size_t i = 0; i < x_.size(); ++i) {
            double d = 0.0;
            for (int f = 0; f < Dataset::kFeatureCount; ++f) {
                double delta = std::fabs(row[static_cast<std::size_t>(f)] -
                                         x_[i][static_cast<std::size_t>(f)]);
                d += p_ == 2 ? delta * delta : std::pow(delta, static_cast<double>(p_));
            }
            dist[i] = {d, i}; // monotone in the Minkowski distance; the root is not needed
        }
        std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());
        Prediction out;
        for (int i = 0; i < k_; ++i) {
            out.scores[static_cast<std::size_t>(y_[dist[static_cast<std::size_t>(i)].second])] += 1.0;
        }
        for (auto& s : out.scores) s /= static_cast<double>(k_);
        out.label = argmax_scores(out.scores);
        return out;
    }

private:
    int k_;
    int p_;
    std::vector<std::array<double, 10>> x_;
    std::vector<int> y_;
};

class GnbModel final : public Model {
public:
    GnbModel(const TrainerParams& params, const Dataset& ds) {
        // Per-feature global variance for the smoothing floor.
        double max_var = 0.0;
        for (int f = 0; f < Dataset::kFeatureCount; ++f) {
            double mean = 0.0;
            for (const auto& row : ds.features) mean += row[static_cast<std::size_t>(f)];
            mean /= static_cast<double>(ds.size());
            double var = 0.0;
            for (const auto& row : ds.features) {
                double d = row[static_cast<std::size_t>(f)] - mean;
                var += d * d;
            }
            max_var = std::max(max_var, var / static_cast<double>(ds.size()));
        }
        double epsilon = params.gnb.variance_smoothing * max_var;
        if (epsilon <= 0.0) epsilon = 1e-12;

        for (std::size_t i = 0; i < ds.size(); ++i) {
            auto& cls = classes_[static_cast<std::size_t>(ds.labels[i])];
            cls.count += 1;
            for (int f = 0; f < Dataset::kFeatureCount; ++f) {
                cls.mean[static_cast<std::size_t>(f)] += ds.features[i][static_cast<std::size_t>(f)];
            }
        }
        for (auto& cls : classes_) {
            if (cls.count == 0) continue;
            for (auto& m : cls.mean) m /= static_cast<double>(cls.count);
        }
        for (std::size_t i = 0; i < ds.size(); ++i) {
            auto& cls = classes_[static_cast<std::size_t>(ds.labels[i])];
            for (int f = 0; f < Dataset::kFeatureCount; ++f) {
                double d = ds.features[i][static_cast<std::size_t>(f)] - cls.mean[static_cast<std::size_t>(f)];
                cls.var[static_cast<std::size_t>(f)] += d * d;
            }
        }
        for (auto& cls : classes_) {
            if (cls.count == 0) continue;
            cls.prior = static_cast<double>(cls.count) / static_cast<double>(ds.size());
            for (auto& v : cls.var) v = v / static_cast<double>(cls.count) + epsilon;
        }
    }

    Prediction predict(std::span<const double> row) const override {
        check_row(row);
        std::array<double, 5> log_post;
        log_post.fill(-std::numeric_limits<double>::infinity());
        for (int c = 0; c < 5; ++c) {
            const auto& cls = classes_[static_cast<std::size_t>(c)];
            if (cls.count == 0) continue;
            double ll = std::log(cls.prior);
            for (int f = 0; f < Dataset::kFeatureCount; ++f) {
                double v = cls.var[static_cast<std::size_t>(f)];
                double d = row[static_cast<std::size_t>(f)] - cls.mean[static_cast<std::size_t>(f)];
                ll += -0.5 * std::log(2.0 * kPi * v) - d * d / (2.0 * v);
            }
            log_post[static_cast<std::size_t>(c)] = ll;
        }
        double max_ll = *std::max_element(log_post.begin(), log_post.end());
        Prediction out;
        double total = 0.0;
        for (int c = 0; c < 5; ++c) {
            double w = std::isinf(log_post[static_cast<std::size_t>(c)])
                           ? 0.0
                           : std::exp(log_post[static_cast<std::size_t>(c)] - max_ll);
            out.scores[static_cast<std::size_t>(c)] = w;
            total += w;
        }
        for (auto& s : out.scores) s /= total;
        out.label = argmax_scores(out.scores);
        return out;
    }

private:
    struct ClassStats {
        std::size_t count = 0;
        double prior = 0.0;
        std::array<double, 10> mean{};
        std::array<double, 10> var{};
    };
    std::array<ClassStats, 5> classes_{};
};

std::size_t distinct_label_count(const Dataset& ds) {
    std::set<int> labels(ds.labels.begin(), ds.labels.end());
    return labels.size();
}

} // namespace

Dataset assemble_dataset(const std::vector<AdvisoryRecord>& advisories,
                         std::vector<std::string>* warnings) {
    std::vector<const AdvisoryRecord*> usable;
    for (const auto& a : advisories) {
        if (a.cvss) {
            usable.push_back(&a);
        } else if (warnings) {
            warnings->push_back("advisory " + a.cve_identifier + " has no CVSS vector; skipped");
        }
    }
    if (usable.empty()) throw InvalidArgument("no advisories with CVSS vectors; dataset is empty");

    Dataset ds;
    for (int col = 0; col < Dataset::kCategoricalCount; ++col) {
        std::set<std::string> tokens;
        for (const auto* a : usable) tokens.insert(std::string(cvss_metric_token(col, *a->cvss)));
        ds.encoders[static_cast<std::size_t>(col)].assign(tokens.begin(), tokens.end());
    }
    auto code_of = [&ds](int col, std::string_view token) {
        const auto& table = ds.encoders[static_cast<std::size_t>(col)];
        auto it = std::lower_bound(table.begin(), table.end(), token);
        return static_cast<double>(it - table.begin());
    };
    for (const auto* a : usable) {
        ScoredVector scored = base_score(*a->cvss);
        std::array<double, 10> row{};
        for (int col = 0; col < Dataset::kCategoricalCount; ++col) {
            row[static_cast<std::size_t>(col)] = code_of(col, cvss_metric_token(col, *a->cvss));
        }
        row[8] = scored.exploitability_score;
        row[9] = scored.impact_score;
        ds.features.push_back(row);
        ds.labels.push_back(static_cast<int>(severity_band(scored.base_score)));
    }
    return ds;
}

std::string_view algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::DecisionTree: return "decision_tree";
        case Algorithm::RandomForest: return "random_forest";
        case Algorithm::KNearest: return "knn";
        case Algorithm::GaussianNB: return "gaussian_nb";
    }
    return "decision_tree";
}

std::optional<Algorithm> algorithm_from_name(std::string_view name) {
    std::string t = fold_token(name);
    if (t == "decisiontree" || t == "dt" || t == "tree") return Algorithm::DecisionTree;
    if (t == "randomforest" || t == "rf" || t == "forest") return Algorithm::RandomForest;
    if (t == "knearest" || t == "knn" || t == "knearestneighbor") return Algorithm::KNearest;
    if (t == "gaussiannb" || t == "gnb" || t == "naivebayes") return Algorithm::GaussianNB;
    return std::nullopt;
}

std::unique_ptr<Model> train(const TrainerParams& params, const Dataset& ds, std::uint64_t seed,
                             int threads) {
    if (ds.size() == 0) throw InvalidArgument("cannot train on an empty dataset");
    if (ds.features.size() != ds.labels.size()) {
        throw InvalidArgument("dataset features/labels length mismatch");
    }
    bool needs_two_classes = params.algorithm == Algorithm::DecisionTree ||
                             params.algorithm == Algorithm::RandomForest ||
                             params.algorithm == Algorithm::GaussianNB;
    if (needs_two_classes && distinct_label_count(ds) < 2) {
        throw InvalidArgument("training requires at least two classes");
    }
    switch (params.algorithm) {
        case Algorithm::DecisionTree: return std::make_unique<TreeModel>(params, ds, seed);
        case Algorithm::RandomForest: return std::make_unique<ForestModel>(params, ds, seed, threads);
        case Algorithm::KNearest: return std::make_unique<KnnModel>(params, ds);
        case Algorithm::GaussianNB: return std::make_unique<GnbModel>(params, ds);
    }
    throw InvalidArgument("unknown algorithm");
}

MacroMetrics macro_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                           std::span<const int> classes, std::vector<std::string>* warnings) {
    if (y_true.size() != y_pred.size()) throw InvalidArgument("macro_metrics: length mismatch");
    if (y_true.empty()) throw InvalidArgument("macro_metrics: empty input");
    static constexpr int kCanonical[] = {0, 1, 2, 3, 4};
    if (classes.empty()) classes = kCanonical;

    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] < 0 || y_true[i] > 4 || y_pred[i] < 0 || y_pred[i] > 4) {
            throw InvalidArgument("macro_metrics: class codes must be in 0..4");
        }
    }

    MacroMetrics out;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) correct += y_true[i] == y_pred[i];
    out.accuracy = static_cast<double>(correct) / static_cast<double>(y_true.size());

    for (int c : classes) {
        std::size_t tp = 0, fp = 0, fn = 0, support = 0;
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            support += y_true[i] == c;
            tp += y_true[i] == c && y_pred[i] == c;
            fp += y_true[i] != c && y_pred[i] == c;
            fn += y_true[i] == c && y_pred[i] != c;
        }
        if (support == 0 && warnings) {
            warnings->push_back("class " + std::to_string(c) + " absent from y_true; contributes 0");
        }
        double p = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        double r = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        if (tp + fp == 0 && support > 0 && warnings) {
            warnings->push_back("class " + std::to_string(c) + " never predicted; precision set to 0");
        }
        double f1 = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
        out.precision += p;
        out.recall += r;
        out.f1 += f1;
    }
    double n = static_cast<double>(classes.size());
    out.precision /= n;
    out.recall /= n;
    out.f1 /= n;
    return out;
}

Confusion confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size()) throw InvalidArgument("confusion_matrix: length mismatch");
    Confusion m{};
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] < 0 || y_true[i] > 4 || y_pred[i] < 0 || y_pred[i] > 4) {
            throw InvalidArgument("confusion_matrix: class codes must be in 0..4");
        }
        m[static_cast<std::size_t>(y_true[i])][static_cast<std::size_t>(y_pred[i])] += 1;
    }
    return m;
}

std::array<std::optional<double>, 5> roc_auc_ovr(std::span<const int> y_true,
                                                 const std::vector<std::array<double, 5>>& scores) {
    if (y_true.size() != scores.size()) throw InvalidArgument("roc_auc_ovr: length mismatch");
    for (const auto& row : scores) {
        double total = 0.0;
        for (double s : row) total += s;
        if (std::fabs(total - 1.0) > 1e-9) {
            throw InvalidArgument("roc_auc_ovr: score rows must sum to 1");
        }
    }
    std::array<std::optional<double>, 5> out{};
    const std::size_t n = y_true.size();
    for (int c = 0; c < 5; ++c) {
        std::size_t positives = 0;
        for (std::size_t i = 0; i < n; ++i) positives += y_true[i] == c;
        if (positives == 0 || positives == n) continue; // AUC undefined

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return scores[a][static_cast<std::size_t>(c)] < scores[b][static_cast<std::size_t>(c)];
        });
        // Average ranks across ties, then the Mann-Whitney statistic.
        double rank_sum_pos = 0.0;
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && scores[order[j + 1]][static_cast<std::size_t>(c)] ==
                                    scores[order[i]][static_cast<std::size_t>(c)]) {
                ++j;
            }
            double avg_rank = static_cast<double>(i + j) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) {
                if (y_true[order[k]] == c) rank_sum_pos += avg_rank;
            }
            i = j + 1;
        }
        double p = static_cast<double>(positives);
        double q = static_cast<double>(n - positives);
        out[static_cast<std::size_t>(c)] = (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * q);
    }
    return out;
}

std::vector<RocPoint> roc_points(std::span<const int> y_true,
                                 const std::vector<std::array<double, 5>>& scores, int cls) {
    if (y_true.size() != scores.size()) throw InvalidArgument("roc_points: length mismatch");
    std::size_t positives = 0;
    for (int t : y_true) positives += t == cls;
    std::size_t negatives = y_true.size() - positives;
    if (positives == 0 || negatives == 0) return {};

    std::vector<std::size_t> order(y_true.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a][static_cast<std::size_t>(cls)] > scores[b][static_cast<std::size_t>(cls)];
    });

    std::vector<RocPoint> points{{0.0, 0.0}};
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]][static_cast<std::size_t>(cls)] ==
                                           scores[order[i]][static_cast<std::size_t>(cls)]) {
            ++j;
        }
        for (std::size_t k = i; k <= j; ++k) {
            if (y_true[order[k]] == cls) ++tp;
            else ++fp;
        }
        points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                          static_cast<double>(tp) / static_cast<double>(positives)});
        i = j + 1;
    }
    return points;
}

EvalReport cross_validate(const TrainerParams& params, const Dataset& ds, int k,
                          std::uint64_t seed, int threads) {
    if (k < 2) throw InvalidArgument("cross_validate: k must be >= 2");
    if (ds.size() < static_cast<std::size_t>(k)) {
        throw InvalidArgument("cross_validate: fewer samples than folds");
    }

    EvalReport report;

    // Stratified fold assignment: per class, shuffle members under a class
    // child seed and deal them round-robin.
    std::vector<int> fold_of(ds.size(), 0);
    for (int c = 0; c < Dataset::kClassCount; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.labels[i] == c) members.push_back(i);
        }
        if (members.empty()) continue;
        if (members.size() < static_cast<std::size_t>(k)) {
            report.warnings.push_back("class " + std::to_string(c) + " has fewer members (" +
                                      std::to_string(members.size()) + ") than folds");
        }
        Rng rng(child_seed(seed, 0xC1A55ULL + static_cast<std::uint64_t>(c)));
        rng.shuffle(members);
        for (std::size_t i = 0; i < members.size(); ++i) {
            fold_of[members[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
        }
    }

    report.predictions.assign(ds.size(), 0);
    report.scores.assign(ds.size(), {});
    for (int f = 0; f < k; ++f) {
        Dataset train_ds;
        train_ds.encoders = ds.encoders;
        std::vector<std::size_t> test_rows;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (fold_of[i] == f) {
                test_rows.push_back(i);
            } else {
                train_ds.features.push_back(ds.features[i]);
                train_ds.labels.push_back(ds.labels[i]);
            }
        }
        if (test_rows.empty()) continue;
        auto model = train(params, train_ds, child_seed(seed, 0xF01D5ULL + static_cast<std::uint64_t>(f)),
                           threads);
        std::vector<int> fold_true, fold_pred;
        std::vector<std::array<double, 5>> fold_scores;
        for (std::size_t i : test_rows) {
            Prediction p = model->predict(ds.features[i]);
            report.predictions[i] = p.label;
            report.scores[i] = p.scores;
            fold_true.push_back(ds.labels[i]);
            fold_pred.push_back(p.label);
            fold_scores.push_back(p.scores);
        }
        EvalReport fold_report;
        fold_report.metrics = macro_metrics(fold_true, fold_pred, {}, &fold_report.warnings);
        fold_report.confusion = confusion_matrix(fold_true, fold_pred);
        fold_report.auc = roc_auc_ovr(fold_true, fold_scores);
        report.per_fold.push_back(std::move(fold_report));
    }

    report.metrics = macro_metrics(ds.labels, report.predictions, {}, &report.warnings);
    report.confusion = confusion_matrix(ds.labels, report.predictions);
    report.auc = roc_auc_ovr(ds.labels, report.scores);
    return report;
}

} // namespace lucid
