#pragma once

#include "records.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lucid {

// Feature/label table for severity classification. Ten feature columns in fixed
// order: the eight base metrics (label-encoded) plus the two numeric sub-scores.
// Labels are severity class codes 0..4 derived from the base score alone.
struct Dataset {
    static constexpr int kFeatureCount = 10;
    static constexpr int kCategoricalCount = 8;
    static constexpr int kClassCount = 5;
    static constexpr std::array<std::string_view, 10> kColumns = {
        "attack_vector",     "attack_complexity", "privileges_required", "user_interaction",
        "scope",             "confidentiality_impact", "integrity_impact", "availability_impact",
        "exploitability_score", "impact_score"};

    std::vector<std::array<double, 10>> features;
    std::vector<int> labels;
    // Per categorical column: token list in code order (lexicographic over the
    // tokens present in the data, LabelEncoder style).
    std::array<std::vector<std::string>, 8> encoders;

    std::size_t size() const { return features.size(); }
};

// Builds the dataset from advisories that carry a CVSS vector; advisories
// without one are skipped with a warning. Throws InvalidArgument when no row
// remains.
Dataset assemble_dataset(const std::vector<AdvisoryRecord>& advisories,
                         std::vector<std::string>* warnings = nullptr);

enum class Algorithm { DecisionTree, RandomForest, KNearest, GaussianNB };

std::string_view algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(std::string_view name);

struct TrainerParams {
    Algorithm algorithm = Algorithm::DecisionTree;
    struct Tree {
        std::optional<int> max_depth;  // absent: unlimited
        int max_features = 200;        // capped at the feature count
    } tree;
    struct Forest {
        int n_estimators = 200;
        int max_depth = 32;
    } forest;
    struct Knn {
        int k = 5;
        int minkowski_p = 2;
    } knn;
    struct Gnb {
        // Multiplier on the largest feature variance (sklearn-style var_smoothing).
        double variance_smoothing = 1e-9;
    } gnb;
};

struct Prediction {
    int label = 0;
    std::array<double, 5> scores{}; // sums to 1; label == argmax (lowest code wins ties)
};

class Model {
public:
    virtual ~Model() = default;
    // Throws InvalidArgument unless row.size() == 10.
    virtual Prediction predict(std::span<const double> row) const = 0;
};

// Deterministic for fixed (params, dataset, seed), regardless of `threads`
// (forest trees draw from per-tree child generators).
std::unique_ptr<Model> train(const TrainerParams& params, const Dataset& ds, std::uint64_t seed,
                             int threads = 1);

struct MacroMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Per-class precision/recall/F1 averaged unweighted over `classes` (default:
// all five canonical classes; absent classes contribute 0 with a warning).
// Zero denominators also score 0 with a warning.
MacroMetrics macro_metrics(std::span<const int> y_true, std::span<const int> y_pred,
                           std::span<const int> classes = {},
                           std::vector<std::string>* warnings = nullptr);

using Confusion = std::array<std::array<std::int64_t, 5>, 5>; // [true][predicted]

Confusion confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred);

// One-vs-rest AUC per class via the rank (Mann-Whitney) statistic with averaged
// ties. Classes absent from y_true (or covering all of it) report no value.
// Score rows must sum to 1 within 1e-9.
std::array<std::optional<double>, 5> roc_auc_ovr(std::span<const int> y_true,
                                                 const std::vector<std::array<double, 5>>& scores);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

// ROC step points for one class, sorted by descending score threshold.
std::vector<RocPoint> roc_points(std::span<const int> y_true,
                                 const std::vector<std::array<double, 5>>& scores, int cls);

struct EvalReport {
    MacroMetrics metrics;
    Confusion confusion{};
    std::array<std::optional<double>, 5> auc{};
    std::vector<EvalReport> per_fold;
    // Pooled predictions in dataset row order (empty on per-fold entries).
    std::vector<int> predictions;
    std::vector<std::array<double, 5>> scores;
    std::vector<std::string> warnings;
};

// Stratified k-fold cross-validation with deterministic fold assignment under
// `seed`; reports pooled metrics plus one report per fold.
EvalReport cross_validate(const TrainerParams& params, const Dataset& ds, int k,
                          std::uint64_t seed, int threads = 1);

} // namespace lucid
