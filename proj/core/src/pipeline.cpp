#include "aki/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "aki/errors.hpp"
#include "aki/eval.hpp"
#include "aki/explain.hpp"
#include "aki/lasso.hpp"
#include "aki/preprocess.hpp"
#include "aki/rng.hpp"
#include "aki/split.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace aki {

std::uint64_t content_hash(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

// Stage seeds derived from the master seed.
enum StageStream : std::uint64_t {
    kSynthStream = 5,
    kSplitStream = 10,
    kLassoStream = 20,
    kSmoteFinalStream = 30,
    kTuneStream = 40, // + family index
    kBootstrapStream = 50,
    kAblationStream = 60,
    kShapStream = 70,
    kNnStream = 80, // + family index
};

std::uint64_t stage_seed(const PipelineConfig& cfg, std::uint64_t stream) {
    return Rng(cfg.seed).derive(stream).seed();
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing required artifact: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write artifact: " + path.string());
    out << text;
}

// Stage bookkeeping: skip when the input hash matches and outputs exist.
class StageGuard {
public:
    StageGuard(const PipelineConfig& cfg, std::string stage, std::uint64_t input_hash,
               std::vector<std::string> outputs)
        : dir_(cfg.out_dir), stage_(std::move(stage)), input_hash_(input_hash),
          outputs_(std::move(outputs)) {}

    bool should_skip() const {
        const fs::path hashes = fs::path(dir_) / "stage_hashes.json";
        if (!fs::exists(hashes)) return false;
        auto j = nlohmann::json::parse(read_file(hashes));
        if (!j.contains(stage_)) return false;
        if (j[stage_]["input_hash"].get<std::uint64_t>() != input_hash_) return false;
        for (const auto& out : outputs_)
            if (!fs::exists(fs::path(dir_) / out)) return false;
        return true;
    }

    void record() const {
        const fs::path hashes = fs::path(dir_) / "stage_hashes.json";
        nlohmann::ordered_json j;
        if (fs::exists(hashes)) j = nlohmann::ordered_json::parse(read_file(hashes));
        std::uint64_t out_hash = 0xcbf29ce484222325ULL;
        for (const auto& out : outputs_)
            out_hash ^= content_hash(read_file(fs::path(dir_) / out));
        j[stage_] = {{"input_hash", input_hash_}, {"output_hash", out_hash}};
        write_file(hashes, j.dump(2));
    }

private:
    std::string dir_;
    std::string stage_;
    std::uint64_t input_hash_;
    std::vector<std::string> outputs_;
};

std::string funnel_json(const CohortTable& table) {
    nlohmann::ordered_json j;
    j["stages"] = table.funnel_stages;
    j["counts"] = table.funnel_counts;
    return j.dump(2);
}

fs::path art(const PipelineConfig& cfg, const std::string& name) {
    return fs::path(cfg.out_dir) / name;
}

Dataset load_dataset(const PipelineConfig& cfg, const std::string& name) {
    return dataset_from_json(read_file(art(cfg, name)));
}

} // namespace

std::string dataset_to_json(const Dataset& ds) {
    nlohmann::ordered_json j;
    j["n_rows"] = ds.n_rows;
    j["n_features"] = ds.n_features;
    auto feats = nlohmann::ordered_json::array();
    for (const auto& m : ds.meta)
        feats.push_back({{"name", m.name},
                         {"kind", m.kind == FeatureKind::BinaryFlag ? "binary_flag" : "continuous"},
                         {"missing_fraction", m.missing_fraction},
                         {"mean", m.mean},
                         {"sd", m.sd}});
    j["features"] = std::move(feats);
    j["labels"] = ds.labels;
    std::vector<int> split(ds.n_rows);
    for (std::size_t r = 0; r < ds.n_rows; ++r) split[r] = static_cast<int>(ds.split[r]);
    j["split"] = split;
    j["synthetic"] = ds.synthetic;
    auto values = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < ds.values.size(); ++i) {
        if (ds.mask[i]) {
            values.push_back(nullptr);
        } else {
            values.push_back(ds.values[i]);
        }
    }
    j["values"] = std::move(values);
    return j.dump();
}

Dataset dataset_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    Dataset ds = Dataset::make(j.at("n_rows").get<std::size_t>(),
                               j.at("n_features").get<std::size_t>());
    std::size_t fi = 0;
    for (const auto& f : j.at("features")) {
        FeatureMeta& m = ds.meta[fi++];
        m.name = f.at("name").get<std::string>();
        m.kind = f.at("kind").get<std::string>() == "binary_flag" ? FeatureKind::BinaryFlag
                                                                  : FeatureKind::Continuous;
        m.missing_fraction = f.at("missing_fraction").get<double>();
        m.mean = f.at("mean").get<double>();
        m.sd = f.at("sd").get<double>();
    }
    ds.labels = j.at("labels").get<std::vector<int>>();
    const auto split = j.at("split").get<std::vector<int>>();
    for (std::size_t r = 0; r < ds.n_rows; ++r) ds.split[r] = static_cast<SplitTag>(split[r]);
    ds.synthetic = j.at("synthetic").get<std::vector<std::uint8_t>>();
    const auto& values = j.at("values");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].is_null()) {
            ds.mask[i] = 1;
        } else {
            ds.values[i] = values[i].get<double>();
        }
    }
    return ds;
}

SynthSpec resolved_synth_spec(const PipelineConfig& cfg) {
    SynthSpec spec = cfg.synth.spec;
    // the cohort loader only maps the standard feature columns, so a custom
    // name set would silently come back as all-missing
    if (!spec.feature_names.empty() && spec.feature_names != standard_feature_columns())
        throw ConfigError(
            "synth.feature_names must be omitted (or exactly the standard feature columns) "
            "when generating pipeline input");
    spec.seed = stage_seed(cfg, kSynthStream);
    return spec;
}

void stage_cohort(const PipelineConfig& cfg) {
    std::string input_bytes = config_to_json(cfg);
    std::string csv_path = cfg.input_csv;
    std::vector<std::string> outputs = {"funnel.json", "dataset_raw.json"};
    if (cfg.synth.enabled) outputs.insert(outputs.begin(), "synth_cohort.csv");

    StageGuard guard(cfg, "cohort", content_hash(input_bytes), outputs);
    if (guard.should_skip()) return;

    fs::create_directories(cfg.out_dir);
    if (cfg.synth.enabled) {
        SynthResult synth_result = generate(resolved_synth_spec(cfg));
        csv_path = art(cfg, "synth_cohort.csv").string();
        write_cohort_csv(synth_result, csv_path);
    }

    CohortTable table = load_cohort(csv_path);
    table = apply_funnel(table, cfg.cohort.funnel);
    if (table.records.empty()) throw DataError("cohort funnel retained zero records");

    LabelConfig lc;
    lc.prefer_explicit_column = cfg.cohort.prefer_label_column;
    lc.window_hours = cfg.cohort.label_window_hours;
    lc.delta_mg_dl = cfg.cohort.label_delta_mg_dl;
    Dataset ds = cohort_to_dataset(table, lc);

    write_file(art(cfg, "funnel.json"), funnel_json(table));
    write_file(art(cfg, "dataset_raw.json"), dataset_to_json(ds));
    guard.record();
}

void stage_split(const PipelineConfig& cfg) {
    const std::string upstream = read_file(art(cfg, "dataset_raw.json"));
    StageGuard guard(cfg, "split", content_hash(upstream + config_to_json(cfg)), {"split.json"});
    if (guard.should_skip()) return;

    Dataset ds = dataset_from_json(upstream);
    SplitSpec spec =
        stratified_split(ds.labels, cfg.models.split_ratio, stage_seed(cfg, kSplitStream));
    nlohmann::ordered_json j;
    j["seed"] = spec.seed;
    j["ratio"] = spec.ratio;
    j["train_indices"] = spec.train_indices;
    j["test_indices"] = spec.test_indices;
    write_file(art(cfg, "split.json"), j.dump(2));
    guard.record();
}

namespace {

void apply_split_tags(const PipelineConfig& cfg, Dataset& ds) {
    auto j = nlohmann::json::parse(read_file(art(cfg, "split.json")));
    for (auto r : j.at("train_indices").get<std::vector<std::size_t>>())
        ds.split[r] = SplitTag::Train;
    for (auto r : j.at("test_indices").get<std::vector<std::size_t>>())
        ds.split[r] = SplitTag::Test;
}

} // namespace

void stage_preprocess(const PipelineConfig& cfg) {
    const std::string upstream =
        read_file(art(cfg, "dataset_raw.json")) + read_file(art(cfg, "split.json"));
    StageGuard guard(cfg, "preprocess", content_hash(upstream + config_to_json(cfg)),
                     {"preprocess_manifest.json", "dataset_processed.json"});
    if (guard.should_skip()) return;

    Dataset ds = dataset_from_json(read_file(art(cfg, "dataset_raw.json")));
    apply_split_tags(cfg, ds);
    PreprocessResult res =
        preprocess(ds, cfg.preprocess.missingness_threshold, cfg.preprocess.knn_k);
    write_file(art(cfg, "preprocess_manifest.json"), res.manifest.to_json());
    write_file(art(cfg, "dataset_processed.json"), dataset_to_json(res.dataset));
    guard.record();
}

void stage_select(const PipelineConfig& cfg) {
    const std::string upstream = read_file(art(cfg, "dataset_processed.json"));
    StageGuard guard(cfg, "select", content_hash(upstream + config_to_json(cfg)),
                     {"selection_report.json", "dataset_selected.json"});
    if (guard.should_skip()) return;

    Dataset ds = dataset_from_json(upstream);
    const LogisticDesign probe{ds.values.data(), ds.n_rows, ds.n_features, ds.labels.data()};
    auto lambdas = lasso_lambda_grid(probe, cfg.select.grid_size, cfg.select.min_lambda_ratio);
    LassoFit fit = fit_lasso_path(ds, lambdas, cfg.select.folds, stage_seed(cfg, kLassoStream),
                                  cfg.threads);
    auto selected = select_features(fit, cfg.select.allowlist);

    nlohmann::ordered_json j;
    j["lambda"] = fit.lambda;
    j["intercept"] = fit.intercept;
    auto coef = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < fit.feature_names.size(); ++k)
        coef.push_back({{"feature", fit.feature_names[k]},
                        {"coefficient", fit.coefficients[k]},
                        {"selected", fit.coefficients[k] != 0.0}});
    j["coefficients"] = std::move(coef);
    auto curve = nlohmann::ordered_json::array();
    for (const auto& [lambda, loss] : fit.cv_curve)
        curve.push_back({{"lambda", lambda}, {"val_log_loss", loss}});
    j["cv_curve"] = std::move(curve);
    j["selected"] = selected;
    auto dropped = nlohmann::ordered_json::array();
    for (const auto& name : fit.feature_names) {
        if (std::find(selected.begin(), selected.end(), name) == selected.end())
            dropped.push_back({{"feature", name}, {"reason", "shrinkage"}});
    }
    j["dropped"] = std::move(dropped);
    write_file(art(cfg, "selection_report.json"), j.dump(2));

    // reduce to the selected features, preserving order
    Dataset reduced = ds;
    for (std::size_t jf = ds.n_features; jf-- > 0;) {
        if (std::find(selected.begin(), selected.end(), ds.meta[jf].name) == selected.end())
            reduced = reduced.drop_feature(jf);
    }
    write_file(art(cfg, "dataset_selected.json"), dataset_to_json(reduced));
    guard.record();
}

namespace {

HyperGrid grid_for(const PipelineConfig& cfg, ModelFamily family) {
    auto it = cfg.models.grids.find(family_name(family));
    return it != cfg.models.grids.end() ? it->second : default_grid(family);
}

} // namespace

void stage_train(const PipelineConfig& cfg, const std::string& only_family) {
    const std::string upstream = read_file(art(cfg, "dataset_selected.json"));
    const std::string manifest = read_file(art(cfg, "preprocess_manifest.json"));
    const std::string manifest_hash = std::to_string(content_hash(manifest));

    for (std::size_t fi = 0; fi < cfg.models.families.size(); ++fi) {
        const ModelFamily family = cfg.models.families[fi];
        const std::string fname = family_name(family);
        if (!only_family.empty() && fname != only_family) continue;

        StageGuard guard(cfg, "train_" + fname,
                         content_hash(upstream + config_to_json(cfg) + fname),
                         {"model_" + fname + ".json", "tuning_" + fname + ".json"});
        if (guard.should_skip()) continue;

        Dataset ds = dataset_from_json(upstream);
        SmoteConfig sc;
        sc.k_neighbors = cfg.smote.k_neighbors;
        sc.target_ratio = cfg.smote.target_ratio;

        TuneResult tuned = tune(ds, family, grid_for(cfg, family), cfg.models.cv_folds,
                                stage_seed(cfg, kTuneStream + fi), sc, cfg.threads);
        if (family == ModelFamily::ShallowNn)
            tuned.best["seed"] = static_cast<double>(stage_seed(cfg, kNnStream + fi) & 0xffffffff);

        sc.seed = stage_seed(cfg, kSmoteFinalStream);
        Dataset balanced = smote(ds, sc);
        TrainedModel model = fit_family(balanced, family, tuned.best);
        model.manifest_hash = manifest_hash;
        write_file(art(cfg, "model_" + fname + ".json"), model.to_json());

        nlohmann::ordered_json tj;
        tj["family"] = fname;
        tj["best"] = tuned.best;
        tj["best_cv_auroc"] = tuned.best_auroc;
        auto table = nlohmann::ordered_json::array();
        for (const auto& row : tuned.table)
            table.push_back({{"hyperparams", row.hp}, {"mean_val_auroc", row.mean_val_auroc}});
        tj["table"] = std::move(table);
        write_file(art(cfg, "tuning_" + fname + ".json"), tj.dump(2));
        guard.record();
    }
}

void stage_evaluate(const PipelineConfig& cfg) {
    const std::string upstream = read_file(art(cfg, "dataset_selected.json"));
    std::string models_bytes;
    std::vector<std::string> outputs = {"metrics.json", "metrics.csv"};
    for (const auto family : cfg.models.families) {
        models_bytes += read_file(art(cfg, "model_" + family_name(family) + ".json"));
        outputs.push_back("roc_" + family_name(family) + ".csv");
    }
    StageGuard guard(cfg, "evaluate", content_hash(upstream + models_bytes + config_to_json(cfg)),
                     outputs);
    if (guard.should_skip()) return;

    Dataset ds = dataset_from_json(upstream);
    Dataset test = ds.subset_rows(ds.rows_with_tag(SplitTag::Test));

    MetricsReport report;
    report.bootstrap_replicates = cfg.eval.bootstrap_replicates;
    report.bootstrap_seed = stage_seed(cfg, kBootstrapStream);
    report.target_sensitivity = cfg.eval.target_sensitivity;

    for (const auto family : cfg.models.families) {
        const std::string fname = family_name(family);
        TrainedModel model = TrainedModel::from_json(read_file(art(cfg, "model_" + fname + ".json")));
        const auto scores = model.score(test);
        RocCurve curve = roc_curve(scores, test.labels);
        const double threshold = threshold_at_sensitivity(curve, cfg.eval.target_sensitivity);
        MetricRow row = confusion_metrics(scores, test.labels, threshold);
        row.model = fname;
        row.auroc = curve.auroc;
        BootstrapCi ci = bootstrap_auroc_ci(scores, test.labels, cfg.eval.bootstrap_replicates,
                                            cfg.eval.ci_level, report.bootstrap_seed, cfg.threads);
        row.ci_low = ci.low;
        row.ci_high = ci.high;
        report.rows.push_back(row);

        std::ostringstream roc;
        roc.precision(17);
        roc << "threshold,fpr,tpr\n";
        for (const auto& pt : curve.points)
            roc << pt.threshold << ',' << pt.fpr << ',' << pt.tpr << '\n';
        write_file(art(cfg, "roc_" + fname + ".csv"), roc.str());
    }
    write_file(art(cfg, "metrics.json"), report.to_json());
    write_file(art(cfg, "metrics.csv"), report.to_csv());
    guard.record();
}

namespace {

std::string best_model_name(const PipelineConfig& cfg) {
    auto j = nlohmann::json::parse(read_file(art(cfg, "metrics.json")));
    std::string best;
    double best_auc = -1.0;
    for (const auto& row : j.at("models")) {
        const double auc = row.at("auroc").get<double>();
        if (auc > best_auc) {
            best_auc = auc;
            best = row.at("model").get<std::string>();
        }
    }
    return best;
}

} // namespace

void stage_explain(const PipelineConfig& cfg) {
    const std::string upstream = read_file(art(cfg, "dataset_selected.json"));
    const std::string metrics = read_file(art(cfg, "metrics.json"));
    const std::string best = best_model_name(cfg);
    const std::string model_bytes = read_file(art(cfg, "model_" + best + ".json"));

    Dataset ds = dataset_from_json(upstream);
    std::vector<std::string> outputs = {"shap_summary.csv"};
    for (const auto& m : ds.meta)
        if (m.kind == FeatureKind::Continuous) outputs.push_back("ale_" + m.name + ".csv");

    StageGuard guard(cfg, "explain",
                     content_hash(upstream + metrics + model_bytes + config_to_json(cfg)), outputs);
    if (guard.should_skip()) return;

    TrainedModel model = TrainedModel::from_json(model_bytes);
    Dataset train = ds.subset_rows(ds.rows_with_tag(SplitTag::Train));
    Dataset test = ds.subset_rows(ds.rows_with_tag(SplitTag::Test));

    Dataset background =
        stratified_background(train, cfg.explain.background_cap, stage_seed(cfg, kShapStream));
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < std::min(test.n_rows, cfg.explain.shap_rows); ++r)
        rows.push_back(r);
    Dataset subjects = test.subset_rows(rows);
    ShapSummary summary =
        shapley_batch(model, subjects, background, cfg.explain.max_features, cfg.threads);

    std::ostringstream shap;
    shap.precision(17);
    shap << "row,feature,value,phi\n";
    for (const auto& exp : summary.explanations)
        for (std::size_t j = 0; j < model.feature_names.size(); ++j)
            shap << exp.record_index << ',' << model.feature_names[j] << ','
                 << subjects.at(exp.record_index, j) << ',' << exp.attributions[j] << '\n';
    write_file(art(cfg, "shap_summary.csv"), shap.str());

    for (const auto& m : ds.meta) {
        if (m.kind != FeatureKind::Continuous) continue;
        AleCurve curve = ale_curve(model, train, m.name, cfg.explain.ale_bins);
        std::ostringstream ale;
        ale.precision(17);
        ale << "edge,effect,count\n";
        for (std::size_t e = 0; e < curve.bin_edges.size(); ++e)
            ale << curve.bin_edges[e] << ',' << curve.centered_effects[e] << ','
                << (e < curve.bin_counts.size() ? curve.bin_counts[e] : 0) << '\n';
        write_file(art(cfg, "ale_" + m.name + ".csv"), ale.str());
    }
    guard.record();
}

void stage_ablate(const PipelineConfig& cfg) {
    const std::string upstream = read_file(art(cfg, "dataset_selected.json"));
    StageGuard guard(cfg, "ablate", content_hash(upstream + config_to_json(cfg)),
                     {"ablation.csv"});
    if (guard.should_skip()) return;

    Dataset ds = dataset_from_json(upstream);
    AblationResult result =
        ablation_study(ds, cfg.eval.ablation_family, default_hyperparams(cfg.eval.ablation_family),
                       stage_seed(cfg, kAblationStream), cfg.eval.ablation_replicates, cfg.threads);
    std::ostringstream out;
    out.precision(17);
    out << "feature,auc_without,delta_auc,auc_full,error\n";
    for (const auto& e : result.per_feature)
        out << e.feature << ',' << e.auc_without << ',' << e.delta_auc << ',' << result.auc_full
            << ',' << (e.error ? *e.error : "") << '\n';
    write_file(art(cfg, "ablation.csv"), out.str());
    guard.record();
}

void run_pipeline(const PipelineConfig& cfg) {
    stage_cohort(cfg);
    stage_split(cfg);
    stage_preprocess(cfg);
    stage_select(cfg);
    stage_train(cfg);
    stage_evaluate(cfg);
    stage_explain(cfg);
    stage_ablate(cfg);
}

} // namespace aki
