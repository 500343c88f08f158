#include <cmath>

#include "aki/errors.hpp"
#include "aki/models.hpp"
#include "json.hpp"

namespace aki {

namespace {

constexpr int kFormatVersion = 1;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double gbdt_raw(const GbdtParams& g, const double* x) {
    double z = g.base_score;
    for (const auto& tree : g.trees) {
        int node = 0;
        while (tree.nodes[node].feature >= 0) {
            const auto& nd = tree.nodes[node];
            node = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
        }
        z += tree.nodes[node].value;
    }
    return z;
}

double nb_posterior(const NbParams& nb, const double* x, std::size_t p) {
    double log_joint[2];
    for (int c = 0; c < 2; ++c) {
        double lj = nb.log_prior[c];
        for (std::size_t j = 0; j < p; ++j) {
            const double v = nb.var[c][j];
            const double diff = x[j] - nb.mean[c][j];
            lj += -0.5 * std::log(2.0 * 3.14159265358979323846 * v) - diff * diff / (2.0 * v);
        }
        log_joint[c] = lj;
    }
    const double m = std::max(log_joint[0], log_joint[1]);
    const double e0 = std::exp(log_joint[0] - m);
    const double e1 = std::exp(log_joint[1] - m);
    return e1 / (e0 + e1);
}

double nn_raw(const NnParams& nn, const double* x, std::size_t p) {
    double z2 = nn.b2;
    for (int h = 0; h < nn.hidden; ++h) {
        double a = nn.b1[h];
        for (std::size_t j = 0; j < p; ++j) a += nn.w1[h * p + j] * x[j];
        z2 += nn.w2[h] * std::tanh(a);
    }
    return z2;
}

} // namespace

std::string family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::Gbdt: return "gbdt";
        case ModelFamily::Logistic: return "logistic";
        case ModelFamily::GaussianNb: return "gaussian_nb";
        case ModelFamily::ShallowNn: return "shallow_nn";
    }
    throw ConfigError("unknown model family");
}

ModelFamily family_from_name(const std::string& name) {
    if (name == "gbdt") return ModelFamily::Gbdt;
    if (name == "logistic") return ModelFamily::Logistic;
    if (name == "gaussian_nb") return ModelFamily::GaussianNb;
    if (name == "shallow_nn") return ModelFamily::ShallowNn;
    throw ConfigError("unknown model family: " + name);
}

double TrainedModel::score_one(const double* x) const {
    const std::size_t p = feature_names.size();
    switch (family) {
        case ModelFamily::Gbdt: return sigmoid(gbdt_raw(gbdt, x));
        case ModelFamily::Logistic: {
            double z = logistic.intercept;
            for (std::size_t j = 0; j < p; ++j) z += logistic.weights[j] * x[j];
            return sigmoid(z);
        }
        case ModelFamily::GaussianNb: return nb_posterior(nb, x, p);
        case ModelFamily::ShallowNn: return sigmoid(nn_raw(nn, x, p));
    }
    throw ConfigError("unknown model family");
}

std::vector<double> TrainedModel::score(const Dataset& rows) const {
    if (rows.feature_names() != feature_names)
        throw DataError("scoring error: dataset features do not match the model's feature list");
    if (rows.any_missing()) throw DataError("scoring error: dataset has missing cells");
    std::vector<double> out(rows.n_rows);
    for (std::size_t r = 0; r < rows.n_rows; ++r) out[r] = score_one(rows.row(r));
    return out;
}

TrainedModel fit_family(const Dataset& train, ModelFamily family, const Hyperparams& hp) {
    switch (family) {
        case ModelFamily::Gbdt: return fit_gbdt(train, hp);
        case ModelFamily::Logistic: return fit_logistic(train, hp);
        case ModelFamily::GaussianNb: return fit_gaussian_nb(train);
        case ModelFamily::ShallowNn: return fit_shallow_nn(train, hp);
    }
    throw ConfigError("unknown model family");
}

Hyperparams default_hyperparams(ModelFamily family) {
    switch (family) {
        case ModelFamily::Gbdt:
            return {{"n_trees", 100},  {"learning_rate", 0.1}, {"max_leaves", 31},
                    {"min_samples_leaf", 20}, {"n_bins", 64},  {"l2_leaf_reg", 1.0}};
        case ModelFamily::Logistic:
            return {{"penalty", 2}, {"strength", 0.01}};
        case ModelFamily::GaussianNb:
            return {};
        case ModelFamily::ShallowNn:
            return {{"hidden_units", 16}, {"epochs", 500}, {"lr", 0.5}, {"l2", 1e-4}, {"seed", 0}};
    }
    throw ConfigError("unknown model family");
}

std::string TrainedModel::to_json() const {
    nlohmann::ordered_json j;
    j["format_version"] = kFormatVersion;
    j["family"] = family_name(family);
    j["hyperparams"] = hyperparams;
    j["feature_names"] = feature_names;
    j["manifest_hash"] = manifest_hash;

    nlohmann::ordered_json params;
    switch (family) {
        case ModelFamily::Gbdt: {
            params["base_score"] = gbdt.base_score;
            auto trees = nlohmann::ordered_json::array();
            for (const auto& tree : gbdt.trees) {
                auto nodes = nlohmann::ordered_json::array();
                for (const auto& nd : tree.nodes)
                    nodes.push_back({{"f", nd.feature},
                                     {"t", nd.threshold},
                                     {"l", nd.left},
                                     {"r", nd.right},
                                     {"v", nd.value}});
                trees.push_back(std::move(nodes));
            }
            params["trees"] = std::move(trees);
            break;
        }
        case ModelFamily::Logistic:
            params["intercept"] = logistic.intercept;
            params["weights"] = logistic.weights;
            break;
        case ModelFamily::GaussianNb:
            params["log_prior"] = {nb.log_prior[0], nb.log_prior[1]};
            params["mean0"] = nb.mean[0];
            params["mean1"] = nb.mean[1];
            params["var0"] = nb.var[0];
            params["var1"] = nb.var[1];
            break;
        case ModelFamily::ShallowNn:
            params["hidden"] = nn.hidden;
            params["w1"] = nn.w1;
            params["b1"] = nn.b1;
            params["w2"] = nn.w2;
            params["b2"] = nn.b2;
            break;
    }
    j["parameters"] = std::move(params);
    return j.dump(2);
}

TrainedModel TrainedModel::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion)
        throw DataError("unknown model format_version " + std::to_string(version));

    TrainedModel m;
    m.family = family_from_name(j.at("family").get<std::string>());
    m.hyperparams = j.at("hyperparams").get<Hyperparams>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.manifest_hash = j.at("manifest_hash").get<std::string>();
    const auto& params = j.at("parameters");

    switch (m.family) {
        case ModelFamily::Gbdt: {
            m.gbdt.base_score = params.at("base_score").get<double>();
            for (const auto& tj : params.at("trees")) {
                GbdtTree tree;
                for (const auto& nj : tj) {
                    GbdtNode nd;
                    nd.feature = nj.at("f").get<int>();
                    nd.threshold = nj.at("t").get<double>();
                    nd.left = nj.at("l").get<int>();
                    nd.right = nj.at("r").get<int>();
                    nd.value = nj.at("v").get<double>();
                    tree.nodes.push_back(nd);
                }
                m.gbdt.trees.push_back(std::move(tree));
            }
            break;
        }
        case ModelFamily::Logistic:
            m.logistic.intercept = params.at("intercept").get<double>();
            m.logistic.weights = params.at("weights").get<std::vector<double>>();
            break;
        case ModelFamily::GaussianNb: {
            auto lp = params.at("log_prior").get<std::vector<double>>();
            m.nb.log_prior[0] = lp.at(0);
            m.nb.log_prior[1] = lp.at(1);
            m.nb.mean[0] = params.at("mean0").get<std::vector<double>>();
            m.nb.mean[1] = params.at("mean1").get<std::vector<double>>();
            m.nb.var[0] = params.at("var0").get<std::vector<double>>();
            m.nb.var[1] = params.at("var1").get<std::vector<double>>();
            break;
        }
        case ModelFamily::ShallowNn:
            m.nn.hidden = params.at("hidden").get<int>();
            m.nn.w1 = params.at("w1").get<std::vector<double>>();
            m.nn.b1 = params.at("b1").get<std::vector<double>>();
            m.nn.w2 = params.at("w2").get<std::vector<double>>();
            m.nn.b2 = params.at("b2").get<double>();
            break;
    }
    return m;
}

} // namespace aki
