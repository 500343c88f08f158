#include <cmath>

#include "aki/errors.hpp"
#include "aki/models.hpp"

namespace aki {

TrainedModel fit_gaussian_nb(const Dataset& train) {
    auto rows = train.rows_with_tag(SplitTag::Train);
    if (rows.empty()) {
        rows.resize(train.n_rows);
        for (std::size_t r = 0; r < train.n_rows; ++r) rows[r] = r;
    }
    Dataset d = train.subset_rows(rows);
    if (d.any_missing()) throw DataError("naive bayes requires a fully imputed dataset");

    std::size_t count[2] = {0, 0};
    for (std::size_t i = 0; i < d.n_rows; ++i) ++count[d.labels[i] ? 1 : 0];
    if (count[0] == 0 || count[1] == 0)
        throw DataError("naive bayes: training labels are single-class");

    TrainedModel model;
    model.family = ModelFamily::GaussianNb;
    model.feature_names = d.feature_names();
    constexpr double var_floor = 1e-9;

    for (int c = 0; c < 2; ++c) {
        model.nb.log_prior[c] =
            std::log(static_cast<double>(count[c]) / static_cast<double>(d.n_rows));
        model.nb.mean[c].assign(d.n_features, 0.0);
        model.nb.var[c].assign(d.n_features, 0.0);
    }
    for (std::size_t i = 0; i < d.n_rows; ++i) {
        const int c = d.labels[i] ? 1 : 0;
        for (std::size_t j = 0; j < d.n_features; ++j) model.nb.mean[c][j] += d.at(i, j);
    }
    for (int c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < d.n_features; ++j) model.nb.mean[c][j] /= count[c];
    for (std::size_t i = 0; i < d.n_rows; ++i) {
        const int c = d.labels[i] ? 1 : 0;
        for (std::size_t j = 0; j < d.n_features; ++j) {
            const double diff = d.at(i, j) - model.nb.mean[c][j];
            model.nb.var[c][j] += diff * diff;
        }
    }
    for (int c = 0; c < 2; ++c)
        for (std::size_t j = 0; j < d.n_features; ++j)
            model.nb.var[c][j] = std::max(model.nb.var[c][j] / count[c], var_floor);

    return model;
}

} // namespace aki
