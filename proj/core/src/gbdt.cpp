#include <algorithm>
#include <cmath>
#include <limits>

#include "aki/errors.hpp"
#include "aki/models.hpp"

namespace aki {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double hp_get(const Hyperparams& hp, const std::string& key, double fallback) {
    auto it = hp.find(key);
    return it == hp.end() ? fallback : it->second;
}

// Equal-frequency bin edges from train quantiles; duplicates merged.
std::vector<double> quantile_edges(std::vector<double> values, int n_bins) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    std::vector<double> edges;
    for (int b = 1; b < n_bins; ++b) {
        const std::size_t pos = (static_cast<std::size_t>(b) * n) / n_bins;
        if (pos >= n) break;
        const double e = values[pos];
        if (e >= values[n - 1]) break; // keep the top bin non-empty
        if (edges.empty() || e > edges.back()) edges.push_back(e);
    }
    return edges;
}

int bin_of(const std::vector<double>& edges, double x) {
    return static_cast<int>(std::lower_bound(edges.begin(), edges.end(), x) - edges.begin());
}

struct LeafState {
    std::vector<std::size_t> rows;
    double grad_sum = 0.0;
    double hess_sum = 0.0;
    int node = -1;   // index in tree.nodes
    int order = 0;   // creation order, used for tie-breaking
    // best candidate split
    double best_gain = -1.0;
    int best_feature = -1;
    int best_bin = -1;
    bool evaluated = false;
};

} // namespace

TrainedModel fit_gbdt(const Dataset& train, const Hyperparams& hp) {
    auto rows = train.rows_with_tag(SplitTag::Train);
    if (rows.empty()) {
        rows.resize(train.n_rows);
        for (std::size_t r = 0; r < train.n_rows; ++r) rows[r] = r;
    }
    Dataset d = train.subset_rows(rows);
    const std::size_t n = d.n_rows;
    const std::size_t p = d.n_features;
    if (n == 0) throw DataError("gbdt: empty training data");
    if (d.any_missing()) throw DataError("gbdt requires a fully imputed dataset");

    const int n_trees = static_cast<int>(hp_get(hp, "n_trees", 100));
    const double lr = hp_get(hp, "learning_rate", 0.1);
    const int max_leaves = static_cast<int>(hp_get(hp, "max_leaves", 31));
    const int min_leaf = static_cast<int>(hp_get(hp, "min_samples_leaf", 20));
    const int n_bins = static_cast<int>(hp_get(hp, "n_bins", 64));
    const double l2 = hp_get(hp, "l2_leaf_reg", 1.0);

    double pos = 0;
    for (std::size_t i = 0; i < n; ++i) pos += d.labels[i];
    if (pos == 0 || pos == static_cast<double>(n))
        throw DataError("gbdt: training labels are single-class");

    TrainedModel model;
    model.family = ModelFamily::Gbdt;
    model.hyperparams = hp;
    model.feature_names = d.feature_names();
    model.gbdt.base_score = std::log(pos / (n - pos));

    // Pre-bin the training matrix.
    std::vector<std::vector<double>> edges(p);
    std::vector<std::vector<std::uint16_t>> bins(p, std::vector<std::uint16_t>(n));
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = d.at(i, j);
        edges[j] = quantile_edges(col, n_bins);
        for (std::size_t i = 0; i < n; ++i)
            bins[j][i] = static_cast<std::uint16_t>(bin_of(edges[j], d.at(i, j)));
    }

    std::vector<double> z(n, model.gbdt.base_score);
    std::vector<double> grad(n), hess(n);

    auto mean_loss = [&] {
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double zi = z[i];
            loss += d.labels[i] ? std::log1p(std::exp(-zi)) : std::log1p(std::exp(-zi)) + zi;
        }
        return loss / static_cast<double>(n);
    };
    model.gbdt.train_loss_trace.push_back(mean_loss());

    for (int t = 0; t < n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double pi = sigmoid(z[i]);
            grad[i] = pi - d.labels[i];
            hess[i] = pi * (1.0 - pi);
        }

        GbdtTree tree;
        tree.nodes.push_back(GbdtNode{});
        std::vector<LeafState> leaves(1);
        leaves[0].rows.resize(n);
        for (std::size_t i = 0; i < n; ++i) leaves[0].rows[i] = i;
        for (std::size_t i = 0; i < n; ++i) {
            leaves[0].grad_sum += grad[i];
            leaves[0].hess_sum += hess[i];
        }
        leaves[0].node = 0;
        leaves[0].order = 0;
        int next_order = 1;

        auto evaluate = [&](LeafState& leaf) {
            leaf.evaluated = true;
            leaf.best_gain = 0.0;
            leaf.best_feature = -1;
            if (leaf.rows.size() < static_cast<std::size_t>(2 * min_leaf)) return;
            const double parent =
                leaf.grad_sum * leaf.grad_sum / (leaf.hess_sum + l2);
            for (std::size_t j = 0; j < p; ++j) {
                const int nb = static_cast<int>(edges[j].size()) + 1;
                if (nb < 2) continue;
                std::vector<double> hg(nb, 0.0), hh(nb, 0.0);
                std::vector<int> hc(nb, 0);
                for (std::size_t r : leaf.rows) {
                    const int b = bins[j][r];
                    hg[b] += grad[r];
                    hh[b] += hess[r];
                    ++hc[b];
                }
                double gl = 0.0, hl = 0.0;
                int cl = 0;
                for (int b = 0; b < nb - 1; ++b) {
                    gl += hg[b];
                    hl += hh[b];
                    cl += hc[b];
                    const int cr = static_cast<int>(leaf.rows.size()) - cl;
                    if (cl < min_leaf || cr < min_leaf) continue;
                    const double gr = leaf.grad_sum - gl;
                    const double hr = leaf.hess_sum - hl;
                    const double gain =
                        0.5 * (gl * gl / (hl + l2) + gr * gr / (hr + l2) - parent);
                    // strict > keeps the first (feature, bin) on ties
                    if (gain > leaf.best_gain) {
                        leaf.best_gain = gain;
                        leaf.best_feature = static_cast<int>(j);
                        leaf.best_bin = b;
                    }
                }
            }
        };

        while (static_cast<int>(leaves.size()) < max_leaves) {
            int pick = -1;
            double pick_gain = 1e-12; // require strictly positive gain
            for (std::size_t li = 0; li < leaves.size(); ++li) {
                if (!leaves[li].evaluated) evaluate(leaves[li]);
                if (leaves[li].best_feature < 0) continue;
                if (leaves[li].best_gain > pick_gain) {
                    pick_gain = leaves[li].best_gain;
                    pick = static_cast<int>(li);
                }
            }
            if (pick < 0) break;

            LeafState& leaf = leaves[pick];
            const int j = leaf.best_feature;
            const int b = leaf.best_bin;

            LeafState left, right;
            for (std::size_t r : leaf.rows) {
                if (bins[j][r] <= b) {
                    left.rows.push_back(r);
                    left.grad_sum += grad[r];
                    left.hess_sum += hess[r];
                } else {
                    right.rows.push_back(r);
                    right.grad_sum += grad[r];
                    right.hess_sum += hess[r];
                }
            }

            GbdtNode& split_node = tree.nodes[leaf.node];
            split_node.feature = j;
            split_node.threshold = edges[j][b];
            split_node.left = static_cast<int>(tree.nodes.size());
            split_node.right = static_cast<int>(tree.nodes.size()) + 1;
            tree.nodes.push_back(GbdtNode{});
            tree.nodes.push_back(GbdtNode{});
            left.node = split_node.left;
            right.node = split_node.right;
            left.order = next_order++;
            right.order = next_order++;

            leaves[pick] = std::move(left);
            leaves.push_back(std::move(right));
        }

        for (const auto& leaf : leaves) {
            const double value = -lr * leaf.grad_sum / (leaf.hess_sum + l2);
            tree.nodes[leaf.node].value = value;
            for (std::size_t r : leaf.rows) z[r] += value;
        }

        model.gbdt.trees.push_back(std::move(tree));
        model.gbdt.train_loss_trace.push_back(mean_loss());
    }

    return model;
}

} // namespace aki
