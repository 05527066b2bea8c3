#include "orderlens/svm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "orderlens/auc.hpp"
#include "orderlens/errors.hpp"
#include "orderlens/importance.hpp"
#include "orderlens/rng.hpp"

namespace orderlens {

using json = nlohmann::json;

bool SplitSpec::is_train(const std::string& patient_id) const {
    return std::binary_search(train_patient_ids.begin(), train_patient_ids.end(), patient_id);
}

SplitSpec split_by_patient(std::vector<std::string> patient_ids,
                           std::optional<size_t> train_count,
                           std::optional<double> train_fraction, std::uint64_t seed) {
    std::sort(patient_ids.begin(), patient_ids.end());
    patient_ids.erase(std::unique(patient_ids.begin(), patient_ids.end()), patient_ids.end());
    const size_t n = patient_ids.size();
    if (n < 2) throw ConfigError("split requires at least 2 patients");
    if (train_count.has_value() == train_fraction.has_value())
        throw ConfigError("specify exactly one of train count / train fraction");

    size_t k = train_count ? *train_count
                           : static_cast<size_t>(std::llround(*train_fraction *
                                                              static_cast<double>(n)));
    if (k == 0) throw ConfigError("train split would be empty");
    if (k >= n)
        throw ConfigError("train count " + std::to_string(k) + " must be below the " +
                          std::to_string(n) + " available patients");

    Rng rng(seed);
    rng.shuffle(patient_ids);
    SplitSpec split;
    split.seed = seed;
    split.train_patient_ids.assign(patient_ids.begin(), patient_ids.begin() + k);
    split.test_patient_ids.assign(patient_ids.begin() + k, patient_ids.end());
    std::sort(split.train_patient_ids.begin(), split.train_patient_ids.end());
    std::sort(split.test_patient_ids.begin(), split.test_patient_ids.end());
    return split;
}

std::vector<size_t> rows_for_split(std::span<const PatientStateInstance> instances,
                                   const SplitSpec& split, bool train) {
    std::vector<size_t> rows;
    for (size_t i = 0; i < instances.size(); ++i)
        if (split.is_train(instances[i].patient_id) == train) rows.push_back(i);
    return rows;
}

std::vector<std::string> select_top_k(const FeatureMatrix& matrix,
                                      std::span<const std::uint8_t> labels,
                                      std::span<const size_t> train_rows,
                                      const DecisionId& decision, size_t k) {
    auto ranked = rank_features(matrix, labels, train_rows, decision, {Scope::all_features});
    std::vector<std::string> selected;
    selected.reserve(std::min(k, ranked.size()));
    for (size_t i = 0; i < ranked.size() && i < k; ++i)
        selected.push_back(ranked[i].feature_id);
    return selected;
}

namespace {

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return (values[mid - 1] + values[mid]) / 2.0;
}

}  // namespace

LinearModel train_linear_svm(const FeatureMatrix& matrix,
                             std::span<const std::uint8_t> labels,
                             std::span<const size_t> train_rows,
                             const DecisionId& decision, int k,
                             std::span<const std::string> selected_features,
                             const SolverConfig& config) {
    const size_t n = train_rows.size();
    if (n == 0) throw std::invalid_argument("train_linear_svm: no training rows");
    size_t n_pos = 0;
    for (size_t r : train_rows) n_pos += labels[r] ? 1 : 0;
    if (n_pos == 0 || n_pos == n)
        throw std::invalid_argument("train_linear_svm: single-class training labels");

    LinearModel model;
    model.decision = decision;
    model.k = k;
    model.config = config;

    // Median-impute, then standardize; constant columns are dropped.
    std::vector<std::vector<double>> columns;
    for (const auto& fid : selected_features) {
        size_t c = matrix.column_index(fid);
        if (c == static_cast<size_t>(-1))
            throw Error("selected feature '" + fid + "' not in matrix");
        std::vector<double> observed;
        std::vector<double> column(n);
        for (size_t i = 0; i < n; ++i) {
            column[i] = matrix.at(train_rows[i], c);
            if (!is_missing(column[i])) observed.push_back(column[i]);
        }
        double med = median_of(std::move(observed));
        for (auto& v : column)
            if (is_missing(v)) v = med;
        double mean = 0.0;
        for (double v : column) mean += v;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : column) ss += (v - mean) * (v - mean);
        double std_dev = std::sqrt(ss / static_cast<double>(n));
        if (std_dev == 0.0) {
            model.dropped_constant.push_back(fid);
            continue;
        }
        for (auto& v : column) v = (v - mean) / std_dev;
        model.selected_features.push_back(fid);
        model.means.push_back(mean);
        model.stds.push_back(std_dev);
        model.medians.push_back(med);
        columns.push_back(std::move(column));
    }

    const size_t d = columns.size();
    std::vector<double> x(n * d);  // row-major standardized design
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < d; ++j) x[i * d + j] = columns[j][i];
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) y[i] = labels[train_rows[i]] ? 1.0 : -1.0;

    // Per-sample hinge costs; sum(cost) takes the regularizer's place in the
    // step schedule, so lambda = 1 / sum(cost).
    std::vector<double> cost(n, config.C);
    if (config.balance) {
        double np = static_cast<double>(n_pos), nn = static_cast<double>(n - n_pos);
        for (size_t i = 0; i < n; ++i)
            cost[i] = config.C * static_cast<double>(n) / (2.0 * (y[i] > 0 ? np : nn));
    }
    double cost_sum = 0.0;
    for (double c : cost) cost_sum += c;
    const double lambda = 1.0 / cost_sum;
    const double scale = static_cast<double>(n) * lambda;  // n / sum(cost)

    std::vector<double> w(d, 0.0);
    double b = 0.0;
    std::vector<double> w_sum(d, 0.0);
    double b_sum = 0.0;
    size_t avg_count = 0;
    const int avg_start = config.epochs -
                          std::max(1, static_cast<int>(std::ceil(
                                          config.averaging_fraction * config.epochs)));

    Rng rng(config.shuffle_seed);
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;

    std::int64_t t = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        for (size_t idx : order) {
            ++t;
            const double eta = 1.0 / (lambda * static_cast<double>(t + 1));
            const double* xi = &x[idx * d];
            double margin = b;
            for (size_t j = 0; j < d; ++j) margin += w[j] * xi[j];
            margin *= y[idx];
            const double decay = 1.0 - eta * lambda;
            for (size_t j = 0; j < d; ++j) w[j] *= decay;
            if (margin < 1.0) {
                const double step = eta * scale * cost[idx] * y[idx];
                for (size_t j = 0; j < d; ++j) w[j] += step * xi[j];
                b += std::min(eta, 1.0) * scale * cost[idx] * y[idx];
            }
        }
        if (epoch >= avg_start) {
            for (size_t j = 0; j < d; ++j) w_sum[j] += w[j];
            b_sum += b;
            ++avg_count;
        }
    }
    model.weights.resize(d);
    for (size_t j = 0; j < d; ++j)
        model.weights[j] = w_sum[j] / static_cast<double>(avg_count);
    model.bias = b_sum / static_cast<double>(avg_count);
    return model;
}

double model_score(const LinearModel& model, const FeatureMatrix& matrix, size_t row) {
    double score = model.bias;
    for (size_t j = 0; j < model.selected_features.size(); ++j) {
        size_t c = matrix.column_index(model.selected_features[j]);
        if (c == static_cast<size_t>(-1))
            throw Error("model feature '" + model.selected_features[j] + "' not in matrix");
        double v = matrix.at(row, c);
        if (is_missing(v)) v = model.medians[j];
        score += model.weights[j] * (v - model.means[j]) / model.stds[j];
    }
    return score;
}

EvalResult evaluate_model(const LinearModel& model, const FeatureMatrix& matrix,
                          std::span<const std::uint8_t> labels,
                          std::span<const size_t> test_rows) {
    // Resolve columns once; model_score per row would re-search.
    std::vector<size_t> cols(model.selected_features.size());
    for (size_t j = 0; j < cols.size(); ++j) {
        cols[j] = matrix.column_index(model.selected_features[j]);
        if (cols[j] == static_cast<size_t>(-1))
            throw Error("model feature '" + model.selected_features[j] + "' not in matrix");
    }
    std::vector<double> scores(test_rows.size());
    std::vector<std::uint8_t> row_labels(test_rows.size());
    for (size_t i = 0; i < test_rows.size(); ++i) {
        double score = model.bias;
        for (size_t j = 0; j < cols.size(); ++j) {
            double v = matrix.at(test_rows[i], cols[j]);
            if (is_missing(v)) v = model.medians[j];
            score += model.weights[j] * (v - model.means[j]) / model.stds[j];
        }
        scores[i] = score;
        row_labels[i] = labels[test_rows[i]];
    }
    EvalResult result;
    result.decision = model.decision;
    result.k = model.k;
    result.auc = auc_midrank(scores, row_labels);
    for (auto l : row_labels) (l ? result.n_pos : result.n_neg) += 1;
    return result;
}

std::string model_to_json(const LinearModel& model, const SplitSpec& split) {
    json j;
    j["decision"] = model.decision.to_string();
    j["k"] = model.k;
    j["selected_features"] = model.selected_features;
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["standardization"] = {{"means", model.means}, {"stds", model.stds}};
    j["imputation"] = {{"medians", model.medians}};
    j["dropped_constant"] = model.dropped_constant;
    j["commission"] = model.commission;
    j["solver"] = {{"C", model.config.C},
                   {"epochs", model.config.epochs},
                   {"shuffle_seed", model.config.shuffle_seed},
                   {"balance", model.config.balance},
                   {"averaging_fraction", model.config.averaging_fraction}};
    j["split"] = {{"seed", split.seed},
                  {"train_patient_ids", split.train_patient_ids},
                  {"test_patient_ids", split.test_patient_ids}};
    return j.dump(2) + "\n";
}

LinearModel model_from_json(const std::string& text, SplitSpec* split) {
    json j = json::parse(text);
    LinearModel model;
    auto decision = DecisionId::parse(j.at("decision").get<std::string>());
    if (!decision) throw ParseError("bad decision id in model file");
    model.decision = *decision;
    model.k = j.at("k").get<int>();
    model.selected_features = j.at("selected_features").get<std::vector<std::string>>();
    model.weights = j.at("weights").get<std::vector<double>>();
    model.bias = j.at("bias").get<double>();
    model.means = j.at("standardization").at("means").get<std::vector<double>>();
    model.stds = j.at("standardization").at("stds").get<std::vector<double>>();
    model.medians = j.at("imputation").at("medians").get<std::vector<double>>();
    model.dropped_constant = j.at("dropped_constant").get<std::vector<std::string>>();
    model.commission = j.value("commission", false);
    model.config.C = j.at("solver").at("C").get<double>();
    model.config.epochs = j.at("solver").at("epochs").get<int>();
    model.config.shuffle_seed = j.at("solver").at("shuffle_seed").get<std::uint64_t>();
    model.config.balance = j.at("solver").at("balance").get<bool>();
    model.config.averaging_fraction = j.at("solver").at("averaging_fraction").get<double>();
    if (split) {
        split->seed = j.at("split").at("seed").get<std::uint64_t>();
        split->train_patient_ids =
            j.at("split").at("train_patient_ids").get<std::vector<std::string>>();
        split->test_patient_ids =
            j.at("split").at("test_patient_ids").get<std::vector<std::string>>();
    }
    return model;
}

}
