#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "orderlens/auc.hpp"
#include "orderlens/errors.hpp"
#include "orderlens/rng.hpp"
#include "orderlens/svm.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace orderlens;

namespace {

FeatureMatrix toy_matrix(const std::vector<std::string>& feature_ids,
                         const std::vector<std::vector<double>>& columns) {
    std::vector<std::string> rows;
    for (size_t r = 0; r < columns[0].size(); ++r) rows.push_back("P" + std::to_string(r) + ":1");
    std::vector<FeatureDescriptor> desc;
    for (const auto& fid : feature_ids)
        desc.push_back({fid, ClinicalCategory::lab, "F01", fid.substr(0, fid.find('.'))});
    FeatureMatrix m(rows, desc);
    for (size_t c = 0; c < columns.size(); ++c)
        for (size_t r = 0; r < columns[c].size(); ++r) m.set(r, c, columns[c][r]);
    return m;
}

std::vector<size_t> iota_rows(size_t n) {
    std::vector<size_t> rows(n);
    for (size_t i = 0; i < n; ++i) rows[i] = i;
    return rows;
}

// Standardizes exactly like the trainer so the oracle solves the same data.
struct Standardized {
    std::vector<std::vector<double>> x;  // row-major
    std::vector<double> y;
};

Standardized standardize_like_model(const LinearModel& model, const FeatureMatrix& m,
                                    std::span<const std::uint8_t> labels,
                                    std::span<const size_t> rows) {
    Standardized s;
    s.x.assign(rows.size(), std::vector<double>(model.selected_features.size()));
    s.y.resize(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        for (size_t j = 0; j < model.selected_features.size(); ++j) {
            size_t c = m.column_index(model.selected_features[j]);
            double v = m.at(rows[i], c);
            if (is_missing(v)) v = model.medians[j];
            s.x[i][j] = (v - model.means[j]) / model.stds[j];
        }
        s.y[i] = labels[rows[i]] ? 1.0 : -1.0;
    }
    return s;
}

}  // namespace

TEST_CASE("patient split is deterministic with requested sizes") {
    std::vector<std::string> ids;
    for (int i = 0; i < 10; ++i) ids.push_back("P" + std::to_string(i));
    auto a = split_by_patient(ids, 6, std::nullopt, 7);
    auto b = split_by_patient(ids, 6, std::nullopt, 7);
    CHECK(a.train_patient_ids == b.train_patient_ids);
    CHECK(a.train_patient_ids.size() == 6);
    CHECK(a.test_patient_ids.size() == 4);

    auto c = split_by_patient(ids, 6, std::nullopt, 8);
    CHECK(c.train_patient_ids.size() == 6);
    CHECK(a.train_patient_ids != c.train_patient_ids);  // overwhelmingly likely
}

TEST_CASE("split rejects degenerate requests") {
    std::vector<std::string> ids = {"A", "B", "C"};
    CHECK_THROWS_AS(split_by_patient(ids, 3, std::nullopt, 1), ConfigError);
    CHECK_THROWS_AS(split_by_patient(ids, 5, std::nullopt, 1), ConfigError);
    CHECK_THROWS_AS(split_by_patient({"A"}, std::nullopt, 0.5, 1), ConfigError);
}

TEST_CASE("splits never leak patients across sides") {
    std::vector<std::string> ids;
    for (int i = 0; i < 37; ++i) ids.push_back("P" + std::to_string(i));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto split = split_by_patient(ids, std::nullopt, 0.65, seed);
        std::vector<std::string> intersection;
        std::set_intersection(split.train_patient_ids.begin(), split.train_patient_ids.end(),
                              split.test_patient_ids.begin(), split.test_patient_ids.end(),
                              std::back_inserter(intersection));
        CHECK(intersection.empty());
        CHECK(split.train_patient_ids.size() + split.test_patient_ids.size() == ids.size());
    }
}

TEST_CASE("top-k selection nests and truncates") {
    Rng rng(3);
    std::vector<std::vector<double>> cols;
    std::vector<std::string> fids;
    std::vector<std::uint8_t> labels;
    for (size_t i = 0; i < 40; ++i) labels.push_back(i % 2);
    for (size_t c = 0; c < 8; ++c) {
        std::vector<double> col;
        for (size_t i = 0; i < 40; ++i)
            col.push_back((labels[i] ? 1.0 : -1.0) * rng.uniform(0.0, c + 0.5) +
                          rng.normal(0.0, 1.0));
        cols.push_back(col);
        fids.push_back("L" + std::to_string(c) + ".F01");
    }
    auto m = toy_matrix(fids, cols);
    auto rows = iota_rows(40);
    DecisionId d{DecisionId::Kind::lab_order, "L0"};
    auto top3 = select_top_k(m, labels, rows, d, 3);
    auto top30 = select_top_k(m, labels, rows, d, 30);
    REQUIRE(top3.size() == 3);
    CHECK(top30.size() == 8);  // k larger than the feature count takes them all
    CHECK(std::equal(top3.begin(), top3.end(), top30.begin()));
}

TEST_CASE("separable toy problem reaches training accuracy 1") {
    auto m = toy_matrix({"A.F01", "B.F01"},
                        {{2.0, 1.5, -1.6, -2.2}, {1.0, 2.2, -1.1, -2.0}});
    std::vector<std::uint8_t> labels = {1, 1, 0, 0};
    auto rows = iota_rows(4);
    SolverConfig config;
    config.epochs = 500;
    auto model = train_linear_svm(m, labels, rows, {DecisionId::Kind::lab_order, "A"}, 2,
                                  std::vector<std::string>{"A.F01", "B.F01"}, config);
    for (size_t i = 0; i < 4; ++i) {
        double score = model_score(model, m, i);
        CHECK((score > 0) == (labels[i] == 1));
    }
}

TEST_CASE("training is deterministic bit for bit") {
    auto m = toy_matrix({"A.F01", "B.F01"},
                        {{2.0, 1.5, -1.6, -2.2, 0.3, 0.1}, {1.0, 2.2, -1.1, -2.0, -0.4, 0.6}});
    std::vector<std::uint8_t> labels = {1, 1, 0, 0, 1, 0};
    auto rows = iota_rows(6);
    SolverConfig config;
    config.epochs = 300;
    auto m1 = train_linear_svm(m, labels, rows, {DecisionId::Kind::lab_order, "A"}, 2,
                               std::vector<std::string>{"A.F01", "B.F01"}, config);
    auto m2 = train_linear_svm(m, labels, rows, {DecisionId::Kind::lab_order, "A"}, 2,
                               std::vector<std::string>{"A.F01", "B.F01"}, config);
    CHECK(m1.weights == m2.weights);
    CHECK(m1.bias == m2.bias);
}

TEST_CASE("planted positive association gives a positive weight") {
    Rng rng(9);
    std::vector<double> col;
    std::vector<std::uint8_t> labels;
    for (size_t i = 0; i < 60; ++i) {
        bool pos = i % 2 == 0;
        labels.push_back(pos ? 1 : 0);
        col.push_back((pos ? 2.0 : -2.0) + rng.normal(0.0, 0.5));
    }
    auto m = toy_matrix({"A.F01"}, {col});
    auto rows = iota_rows(60);
    SolverConfig config;
    config.epochs = 300;
    auto model = train_linear_svm(m, labels, rows, {DecisionId::Kind::lab_order, "A"}, 1,
                                  std::vector<std::string>{"A.F01"}, config);
    REQUIRE(model.weights.size() == 1);
    CHECK(model.weights[0] > 0.0);
}

TEST_CASE("constant selected features are dropped") {
    auto m = toy_matrix({"A.F01", "B.F01"}, {{1.0, 1.0, 1.0, 1.0}, {0.5, 1.8, -0.7, -1.2}});
    std::vector<std::uint8_t> labels = {1, 1, 0, 0};
    auto rows = iota_rows(4);
    SolverConfig config;
    config.epochs = 200;
    auto model = train_linear_svm(m, labels, rows, {DecisionId::Kind::lab_order, "A"}, 2,
                                  std::vector<std::string>{"A.F01", "B.F01"}, config);
    CHECK(model.selected_features == std::vector<std::string>{"B.F01"});
    CHECK(model.dropped_constant == std::vector<std::string>{"A.F01"});
}

TEST_CASE("missing values impute to the training median") {
    auto m = toy_matrix({"A.F01"}, {{1.0, kMissing, 3.0, 5.0, kMissing, 2.0}});
    std::vector<std::uint8_t> labels = {1, 1, 0, 0, 1, 0};
    auto rows = iota_rows(6);
    SolverConfig config;
    config.epochs = 50;
    auto model = train_linear_svm(m, labels, rows, {DecisionId::Kind::lab_order, "A"}, 1,
                                  std::vector<std::string>{"A.F01"}, config);
    REQUIRE(model.medians.size() == 1);
    CHECK(model.medians[0] == 2.5);  // median of {1, 2, 3, 5}
}

TEST_CASE("subgradient objective is within 1e-3 relative of the dual reference") {
    Rng rng(77);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const size_t n = 20, d = 4;
        std::vector<std::vector<double>> cols(d, std::vector<double>(n));
        std::vector<double> direction(d);
        for (auto& v : direction) v = rng.normal(0.0, 0.7);
        std::vector<std::uint8_t> labels(n);
        for (size_t i = 0; i < n; ++i) labels[i] = rng.bernoulli(0.5) ? 1 : 0;
        bool has_pos = false, has_neg = false;
        for (auto l : labels) (l ? has_pos : has_neg) = true;
        if (!has_pos || !has_neg) continue;
        for (size_t j = 0; j < d; ++j)
            for (size_t i = 0; i < n; ++i)
                cols[j][i] = rng.normal(0.0, 1.0) + (labels[i] ? 1.0 : -1.0) * direction[j];

        std::vector<std::string> fids;
        for (size_t j = 0; j < d; ++j) fids.push_back("L" + std::to_string(j) + ".F01");
        auto m = toy_matrix(fids, cols);
        auto rows = iota_rows(n);

        SolverConfig config;
        config.C = 1.0;
        config.epochs = 4000;
        auto model = train_linear_svm(m, labels, rows, {DecisionId::Kind::lab_order, "L0"},
                                      static_cast<int>(d), fids, config);
        REQUIRE(model.selected_features.size() == d);

        auto s = standardize_like_model(model, m, labels, rows);
        double ours = oracle::primal_objective(model.weights, model.bias, s.x, s.y, config.C);
        auto ref = oracle::smo_reference(s.x, s.y, config.C);
        double best = oracle::primal_objective(ref.w, ref.bias, s.x, s.y, config.C);
        double gap = std::abs(ours - best) / std::max(std::abs(best), 1e-12);
        worst = std::max(worst, gap);
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("k=1 model with positive weight scores the same test AUC as its feature") {
    Rng rng(5);
    const size_t n = 80;
    std::vector<double> col(n);
    std::vector<std::uint8_t> labels(n);
    for (size_t i = 0; i < n; ++i) {
        labels[i] = rng.bernoulli(0.5) ? 1 : 0;
        col[i] = (labels[i] ? 1.0 : -1.0) * rng.uniform(0.2, 1.5) + rng.normal(0.0, 0.7);
    }
    auto m = toy_matrix({"A.F01"}, {col});
    auto train_rows = iota_rows(n / 2);
    std::vector<size_t> test_rows;
    for (size_t i = n / 2; i < n; ++i) test_rows.push_back(i);

    SolverConfig config;
    config.epochs = 500;
    auto model = train_linear_svm(m, labels, train_rows, {DecisionId::Kind::lab_order, "A"}, 1,
                                  std::vector<std::string>{"A.F01"}, config);
    REQUIRE(model.weights.size() == 1);
    REQUIRE(model.weights[0] > 0.0);

    auto result = evaluate_model(model, m, labels, test_rows);
    std::vector<double> feature_col;
    std::vector<std::uint8_t> feature_labels;
    for (size_t r : test_rows) {
        feature_col.push_back(m.at(r, 0));
        feature_labels.push_back(labels[r]);
    }
    double raw = auc_midrank(feature_col, feature_labels);
    CHECK(std::abs(result.auc - raw) <= 1e-9);
}

TEST_CASE("random labels score near 0.5") {
    Rng rng(13);
    const size_t n = 600;
    std::vector<double> col(n);
    std::vector<std::uint8_t> labels(n);
    for (size_t i = 0; i < n; ++i) {
        labels[i] = rng.bernoulli(0.5) ? 1 : 0;
        col[i] = rng.normal(0.0, 1.0);
    }
    auto m = toy_matrix({"A.F01"}, {col});
    auto train_rows = iota_rows(n / 2);
    std::vector<size_t> test_rows;
    for (size_t i = n / 2; i < n; ++i) test_rows.push_back(i);
    SolverConfig config;
    config.epochs = 100;
    auto model = train_linear_svm(m, labels, train_rows, {DecisionId::Kind::lab_order, "A"}, 1,
                                  std::vector<std::string>{"A.F01"}, config);
    auto result = evaluate_model(model, m, labels, test_rows);
    CHECK(result.auc > 0.4);
    CHECK(result.auc < 0.6);
}

TEST_CASE("scaling a raw column does not change test AUC") {
    Rng rng(31);
    const size_t n = 100;
    std::vector<double> col(n), col2(n);
    std::vector<std::uint8_t> labels(n);
    for (size_t i = 0; i < n; ++i) {
        labels[i] = rng.bernoulli(0.5) ? 1 : 0;
        col[i] = (labels[i] ? 0.8 : -0.8) + rng.normal(0.0, 1.0);
        col2[i] = rng.normal(0.0, 1.0);
    }
    std::vector<double> scaled(n);
    for (size_t i = 0; i < n; ++i) scaled[i] = col[i] * 1000.0;

    auto train_rows = iota_rows(n / 2);
    std::vector<size_t> test_rows;
    for (size_t i = n / 2; i < n; ++i) test_rows.push_back(i);
    SolverConfig config;
    config.epochs = 400;

    auto m1 = toy_matrix({"A.F01", "B.F01"}, {col, col2});
    auto m2 = toy_matrix({"A.F01", "B.F01"}, {scaled, col2});
    std::vector<std::string> fids = {"A.F01", "B.F01"};
    auto model1 = train_linear_svm(m1, labels, train_rows, {DecisionId::Kind::lab_order, "A"}, 2,
                                   fids, config);
    auto model2 = train_linear_svm(m2, labels, train_rows, {DecisionId::Kind::lab_order, "A"}, 2,
                                   fids, config);
    auto r1 = evaluate_model(model1, m1, labels, test_rows);
    auto r2 = evaluate_model(model2, m2, labels, test_rows);
    CHECK(std::abs(r1.auc - r2.auc) <= 1e-6);
}

TEST_CASE("model json round-trips") {
    auto m = toy_matrix({"A.F01", "B.F01"},
                        {{2.0, 1.5, -1.6, -2.2}, {1.0, 2.2, -1.1, -2.0}});
    std::vector<std::uint8_t> labels = {1, 1, 0, 0};
    auto rows = iota_rows(4);
    SolverConfig config;
    config.epochs = 120;
    auto model = train_linear_svm(m, labels, rows, {DecisionId::Kind::med_order, "HEP"}, 2,
                                  std::vector<std::string>{"A.F01", "B.F01"}, config);
    model.commission = true;
    SplitSpec split;
    split.seed = 5;
    split.train_patient_ids = {"P0:1", "P1:1"};
    split.test_patient_ids = {"P2:1", "P3:1"};

    SplitSpec split_back;
    auto text = model_to_json(model, split);
    auto back = model_from_json(text, &split_back);
    CHECK(back.decision == model.decision);
    CHECK(back.weights == model.weights);
    CHECK(back.bias == model.bias);
    CHECK(back.means == model.means);
    CHECK(back.stds == model.stds);
    CHECK(back.medians == model.medians);
    CHECK(back.commission == model.commission);
    CHECK(back.config.epochs == model.config.epochs);
    CHECK(split_back.train_patient_ids == split.train_patient_ids);
}

TEST_CASE("single-class training is an error; evaluation consistency holds") {
    auto m = toy_matrix({"A.F01"}, {{1.0, 2.0, 3.0}});
    std::vector<std::uint8_t> labels = {1, 1, 1};
    auto rows = iota_rows(3);
    CHECK_THROWS_AS(train_linear_svm(m, labels, rows, {DecisionId::Kind::lab_order, "A"}, 1,
                                     std::vector<std::string>{"A.F01"}, {}),
                    std::invalid_argument);
}

TEST_CASE("three planted signals: k=3 is not worse than k=1 beyond tolerance") {
    Rng rng(2718);
    const size_t n = 400, noise_features = 27;
    std::vector<std::uint8_t> labels(n);
    for (auto& l : labels) l = rng.bernoulli(0.5) ? 1 : 0;

    std::vector<std::vector<double>> cols;
    std::vector<std::string> fids;
    const double strengths[3] = {1.0, 0.8, 0.6};
    for (size_t s = 0; s < 3; ++s) {
        std::vector<double> col(n);
        for (size_t i = 0; i < n; ++i)
            col[i] = (labels[i] ? 1.0 : -1.0) * strengths[s] + rng.normal(0.0, 1.0);
        cols.push_back(std::move(col));
        fids.push_back("SIG" + std::to_string(s) + ".F01");
    }
    for (size_t s = 0; s < noise_features; ++s) {
        std::vector<double> col(n);
        for (auto& v : col) v = rng.normal(0.0, 1.0);
        cols.push_back(std::move(col));
        fids.push_back("NOISE" + std::to_string(s) + ".F01");
    }
    auto m = toy_matrix(fids, cols);
    std::vector<size_t> train_rows, test_rows;
    for (size_t i = 0; i < n; ++i) (i < n / 2 ? train_rows : test_rows).push_back(i);

    DecisionId d{DecisionId::Kind::lab_order, "SIG0"};
    SolverConfig config;
    config.epochs = 300;
    auto selected = select_top_k(m, labels, train_rows, d, 30);
    double auc_by_k[2];
    int idx = 0;
    for (int k : {1, 3}) {
        std::span<const std::string> prefix(selected.data(),
                                            std::min<size_t>(selected.size(), k));
        auto model = train_linear_svm(m, labels, train_rows, d, k, prefix, config);
        auc_by_k[idx++] = evaluate_model(model, m, labels, test_rows).auc;
    }
    CHECK(auc_by_k[1] >= auc_by_k[0] - 0.02);
}

TEST_CASE("reference-scale split sizes: 2900 of 4486") {
    std::vector<std::string> ids;
    for (int i = 0; i < 4486; ++i) ids.push_back("P" + std::to_string(i));
    auto split = split_by_patient(ids, 2900, std::nullopt, 42);
    CHECK(split.train_patient_ids.size() == 2900);
    CHECK(split.test_patient_ids.size() == 1586);
}

TEST_CASE("all-constant features degrade to a constant model") {
    auto m = toy_matrix({"A.F01", "B.F01"},
                        {{2.0, 2.0, 2.0, 2.0}, {-1.0, -1.0, -1.0, -1.0}});
    std::vector<std::uint8_t> labels = {1, 0, 1, 0};
    auto rows = iota_rows(4);
    SolverConfig config;
    config.epochs = 50;
    auto model = train_linear_svm(m, labels, rows, {DecisionId::Kind::lab_order, "A"}, 2,
                                  std::vector<std::string>{"A.F01", "B.F01"}, config);
    CHECK(model.selected_features.empty());
    CHECK(model.dropped_constant.size() == 2);
    // Every row scores the bias.
    CHECK(model_score(model, m, 0) == model_score(model, m, 3));
}
