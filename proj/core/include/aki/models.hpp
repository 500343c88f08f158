#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aki/dataset.hpp"
#include "aki/lasso.hpp"

namespace aki {

enum class ModelFamily { Gbdt, Logistic, GaussianNb, ShallowNn };

std::string family_name(ModelFamily f);
ModelFamily family_from_name(const std::string& name);

struct GbdtNode {
    int feature = -1; // -1 = leaf
    double threshold = 0.0; // x <= threshold goes left
    int left = -1;
    int right = -1;
    double value = 0.0; // leaf contribution (already learning-rate scaled)
};

struct GbdtTree {
    std::vector<GbdtNode> nodes; // node 0 is the root
};

struct GbdtParams {
    double base_score = 0.0; // log-odds of training prevalence
    std::vector<GbdtTree> trees;
    std::vector<double> train_loss_trace; // baseline log-loss, then one entry per round
};

struct LogisticParams {
    double intercept = 0.0;
    std::vector<double> weights;
};

struct NbParams {
    double log_prior[2] = {0, 0};
    std::vector<double> mean[2];
    std::vector<double> var[2];
};

struct NnParams {
    int hidden = 0;
    std::vector<double> w1; // hidden x p
    std::vector<double> b1; // hidden
    std::vector<double> w2; // hidden
    double b2 = 0.0;
};

using Hyperparams = std::map<std::string, double>;

struct TrainedModel {
    ModelFamily family = ModelFamily::Logistic;
    Hyperparams hyperparams;
    std::vector<std::string> feature_names;
    std::string manifest_hash;

    GbdtParams gbdt;
    LogisticParams logistic;
    NbParams nb;
    NnParams nn;

    double score_one(const double* x) const;
    // Rejects on feature name/order mismatch.
    std::vector<double> score(const Dataset& rows) const;

    std::string to_json() const;
    static TrainedModel from_json(const std::string& text);
};

// All fits read the train-tagged rows of `train` (all rows if untagged).
TrainedModel fit_gbdt(const Dataset& train, const Hyperparams& hp);
TrainedModel fit_logistic(const Dataset& train, const Hyperparams& hp);
TrainedModel fit_gaussian_nb(const Dataset& train);
TrainedModel fit_shallow_nn(const Dataset& train, const Hyperparams& hp);

TrainedModel fit_family(const Dataset& train, ModelFamily family, const Hyperparams& hp);

Hyperparams default_hyperparams(ModelFamily family);

// Shallow-net loss/gradient on a design; exposed for gradient checking.
double nn_loss(const NnParams& params, const LogisticDesign& d, double l2);
NnParams nn_gradient(const NnParams& params, const LogisticDesign& d, double l2);

} // namespace aki
