#include <cmath>
#include <vector>

#include "aki/errors.hpp"
#include "aki/models.hpp"
#include "aki/rng.hpp"

namespace aki {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double forward(const NnParams& nn, const double* x, std::size_t p, std::vector<double>* hidden) {
    double z2 = nn.b2;
    for (int h = 0; h < nn.hidden; ++h) {
        double a = nn.b1[h];
        for (std::size_t j = 0; j < p; ++j) a += nn.w1[h * p + j] * x[j];
        const double t = std::tanh(a);
        if (hidden) (*hidden)[h] = t;
        z2 += nn.w2[h] * t;
    }
    return z2;
}

} // namespace

double nn_loss(const NnParams& nn, const LogisticDesign& d, double l2) {
    double loss = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
        const double z = forward(nn, d.x + i * d.p, d.p, nullptr);
        loss += d.y[i] ? std::log1p(std::exp(-z)) : std::log1p(std::exp(-z)) + z;
    }
    loss /= static_cast<double>(d.n);
    for (double w : nn.w1) loss += l2 * w * w;
    for (double w : nn.w2) loss += l2 * w * w;
    return loss;
}

NnParams nn_gradient(const NnParams& nn, const LogisticDesign& d, double l2) {
    NnParams g;
    g.hidden = nn.hidden;
    g.w1.assign(nn.w1.size(), 0.0);
    g.b1.assign(nn.b1.size(), 0.0);
    g.w2.assign(nn.w2.size(), 0.0);
    g.b2 = 0.0;

    std::vector<double> hidden(nn.hidden);
    const double n = static_cast<double>(d.n);
    for (std::size_t i = 0; i < d.n; ++i) {
        const double* x = d.x + i * d.p;
        const double z = forward(nn, x, d.p, &hidden);
        const double delta = (sigmoid(z) - d.y[i]) / n;
        g.b2 += delta;
        for (int h = 0; h < nn.hidden; ++h) {
            g.w2[h] += delta * hidden[h];
            const double dh = delta * nn.w2[h] * (1.0 - hidden[h] * hidden[h]);
            g.b1[h] += dh;
            for (std::size_t j = 0; j < d.p; ++j) g.w1[h * d.p + j] += dh * x[j];
        }
    }
    for (std::size_t k = 0; k < nn.w1.size(); ++k) g.w1[k] += 2.0 * l2 * nn.w1[k];
    for (std::size_t k = 0; k < nn.w2.size(); ++k) g.w2[k] += 2.0 * l2 * nn.w2[k];
    return g;
}

TrainedModel fit_shallow_nn(const Dataset& train, const Hyperparams& hp) {
    auto rows = train.rows_with_tag(SplitTag::Train);
    if (rows.empty()) {
        rows.resize(train.n_rows);
        for (std::size_t r = 0; r < train.n_rows; ++r) rows[r] = r;
    }
    Dataset d = train.subset_rows(rows);
    if (d.any_missing()) throw DataError("shallow nn requires a fully imputed dataset");
    const LogisticDesign design{d.values.data(), d.n_rows, d.n_features, d.labels.data()};

    auto hpv = [&](const std::string& k, double fb) {
        auto it = hp.find(k);
        return it == hp.end() ? fb : it->second;
    };
    const int hidden = static_cast<int>(hpv("hidden_units", 16));
    const int epochs = static_cast<int>(hpv("epochs", 500));
    const double lr = hpv("lr", 0.5);
    const double l2 = hpv("l2", 1e-4);
    const auto seed = static_cast<std::uint64_t>(hpv("seed", 0));
    if (hidden < 1) throw ConfigError("shallow nn needs hidden_units >= 1");

    TrainedModel model;
    model.family = ModelFamily::ShallowNn;
    model.hyperparams = hp;
    model.feature_names = d.feature_names();

    NnParams& nn = model.nn;
    nn.hidden = hidden;
    nn.w1.resize(static_cast<std::size_t>(hidden) * d.n_features);
    nn.b1.assign(hidden, 0.0);
    nn.w2.resize(hidden);
    nn.b2 = 0.0;

    Rng rng(seed);
    const double s1 = std::sqrt(6.0 / (static_cast<double>(d.n_features) + hidden));
    for (auto& w : nn.w1) w = rng.uniform(-s1, s1);
    const double s2 = std::sqrt(6.0 / (static_cast<double>(hidden) + 1.0));
    for (auto& w : nn.w2) w = rng.uniform(-s2, s2);

    for (int e = 0; e < epochs; ++e) {
        const NnParams g = nn_gradient(nn, design, l2);
        for (std::size_t k = 0; k < nn.w1.size(); ++k) nn.w1[k] -= lr * g.w1[k];
        for (int h = 0; h < hidden; ++h) {
            nn.b1[h] -= lr * g.b1[h];
            nn.w2[h] -= lr * g.w2[h];
        }
        nn.b2 -= lr * g.b2;
        const double loss = nn_loss(nn, design, l2);
        if (!std::isfinite(loss))
            throw NumericError("shallow nn diverged (non-finite loss); reduce lr");
    }
    return model;
}

} // namespace aki
