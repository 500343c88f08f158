#include "aki/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "aki/errors.hpp"
#include "json.hpp"

namespace aki {

namespace {

using Json = nlohmann::json;

void require_keys(const Json& obj, const std::string& section,
                  const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            throw ConfigError("unknown config key '" + it.key() + "' in " + section);
    }
}

template <typename T>
void maybe(const Json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

HyperGrid parse_grid(const Json& obj, const std::string& section) {
    HyperGrid grid;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!it.value().is_array())
            throw ConfigError("grid axis '" + it.key() + "' in " + section + " must be an array");
        grid.emplace_back(it.key(), it.value().get<std::vector<double>>());
    }
    return grid;
}

} // namespace

PipelineConfig parse_config(const std::string& json_text) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    PipelineConfig cfg;
    require_keys(j, "top level",
                 {"seed", "threads", "input_csv", "out_dir", "synth", "cohort", "preprocess",
                  "select", "smote", "models", "eval", "explain"});
    maybe(j, "seed", cfg.seed);
    maybe(j, "threads", cfg.threads);
    maybe(j, "input_csv", cfg.input_csv);
    maybe(j, "out_dir", cfg.out_dir);

    if (j.contains("synth")) {
        const auto& s = j.at("synth");
        require_keys(s, "synth",
                     {"n_rows", "prevalence", "true_coefficients", "correlation", "missing_rates",
                      "noise_sd", "feature_names"});
        cfg.synth.enabled = true;
        maybe(s, "n_rows", cfg.synth.spec.n_rows);
        maybe(s, "prevalence", cfg.synth.spec.prevalence);
        maybe(s, "true_coefficients", cfg.synth.spec.true_coefficients);
        maybe(s, "correlation", cfg.synth.spec.correlation);
        maybe(s, "missing_rates", cfg.synth.spec.missing_rates);
        maybe(s, "noise_sd", cfg.synth.spec.noise_sd);
        maybe(s, "feature_names", cfg.synth.spec.feature_names);
    }

    if (j.contains("cohort")) {
        const auto& c = j.at("cohort");
        require_keys(c, "cohort",
                     {"min_los_hours", "min_age", "max_age", "inclusion_icd_prefixes",
                      "exclusion_icd_prefixes", "prefer_label_column", "label_window_hours",
                      "label_delta_mg_dl"});
        maybe(c, "min_los_hours", cfg.cohort.funnel.min_los_hours);
        maybe(c, "min_age", cfg.cohort.funnel.min_age);
        maybe(c, "max_age", cfg.cohort.funnel.max_age);
        maybe(c, "inclusion_icd_prefixes", cfg.cohort.funnel.inclusion_icd_prefixes);
        maybe(c, "exclusion_icd_prefixes", cfg.cohort.funnel.exclusion_icd_prefixes);
        maybe(c, "prefer_label_column", cfg.cohort.prefer_label_column);
        maybe(c, "label_window_hours", cfg.cohort.label_window_hours);
        maybe(c, "label_delta_mg_dl", cfg.cohort.label_delta_mg_dl);
    }

    if (j.contains("preprocess")) {
        const auto& p = j.at("preprocess");
        require_keys(p, "preprocess", {"missingness_threshold", "knn_k"});
        maybe(p, "missingness_threshold", cfg.preprocess.missingness_threshold);
        maybe(p, "knn_k", cfg.preprocess.knn_k);
    }

    if (j.contains("select")) {
        const auto& s = j.at("select");
        require_keys(s, "select", {"folds", "grid_size", "min_lambda_ratio", "allowlist"});
        maybe(s, "folds", cfg.select.folds);
        maybe(s, "grid_size", cfg.select.grid_size);
        maybe(s, "min_lambda_ratio", cfg.select.min_lambda_ratio);
        if (s.contains("allowlist"))
            cfg.select.allowlist = s.at("allowlist").get<std::vector<std::string>>();
    }

    if (j.contains("smote")) {
        const auto& s = j.at("smote");
        require_keys(s, "smote", {"k_neighbors", "target_ratio"});
        maybe(s, "k_neighbors", cfg.smote.k_neighbors);
        maybe(s, "target_ratio", cfg.smote.target_ratio);
    }

    if (j.contains("models")) {
        const auto& m = j.at("models");
        require_keys(m, "models", {"families", "split_ratio", "cv_folds", "grids"});
        if (m.contains("families")) {
            cfg.models.families.clear();
            for (const auto& f : m.at("families"))
                cfg.models.families.push_back(family_from_name(f.get<std::string>()));
        }
        maybe(m, "split_ratio", cfg.models.split_ratio);
        maybe(m, "cv_folds", cfg.models.cv_folds);
        if (m.contains("grids")) {
            for (auto it = m.at("grids").begin(); it != m.at("grids").end(); ++it) {
                family_from_name(it.key()); // validates the name
                cfg.models.grids[it.key()] = parse_grid(it.value(), "models.grids." + it.key());
            }
        }
    }

    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        require_keys(e, "eval",
                     {"bootstrap_replicates", "ci_level", "target_sensitivity",
                      "ablation_replicates", "ablation_family"});
        maybe(e, "bootstrap_replicates", cfg.eval.bootstrap_replicates);
        maybe(e, "ci_level", cfg.eval.ci_level);
        maybe(e, "target_sensitivity", cfg.eval.target_sensitivity);
        maybe(e, "ablation_replicates", cfg.eval.ablation_replicates);
        if (e.contains("ablation_family"))
            cfg.eval.ablation_family = family_from_name(e.at("ablation_family").get<std::string>());
    }

    if (j.contains("explain")) {
        const auto& x = j.at("explain");
        require_keys(x, "explain", {"ale_bins", "background_cap", "max_features", "shap_rows"});
        maybe(x, "ale_bins", cfg.explain.ale_bins);
        maybe(x, "background_cap", cfg.explain.background_cap);
        maybe(x, "max_features", cfg.explain.max_features);
        maybe(x, "shap_rows", cfg.explain.shap_rows);
    }

    if (!cfg.synth.enabled && cfg.input_csv.empty())
        throw ConfigError("config needs either input_csv or a synth section");
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_to_json(const PipelineConfig& cfg) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["input_csv"] = cfg.input_csv;
    j["out_dir"] = cfg.out_dir;
    if (cfg.synth.enabled) {
        j["synth"] = {{"n_rows", cfg.synth.spec.n_rows},
                      {"prevalence", cfg.synth.spec.prevalence},
                      {"true_coefficients", cfg.synth.spec.true_coefficients},
                      {"correlation", cfg.synth.spec.correlation},
                      {"missing_rates", cfg.synth.spec.missing_rates},
                      {"noise_sd", cfg.synth.spec.noise_sd},
                      {"feature_names", cfg.synth.spec.feature_names}};
    }
    j["cohort"] = {{"min_los_hours", cfg.cohort.funnel.min_los_hours},
                   {"min_age", cfg.cohort.funnel.min_age},
                   {"max_age", cfg.cohort.funnel.max_age},
                   {"inclusion_icd_prefixes", cfg.cohort.funnel.inclusion_icd_prefixes},
                   {"exclusion_icd_prefixes", cfg.cohort.funnel.exclusion_icd_prefixes},
                   {"prefer_label_column", cfg.cohort.prefer_label_column},
                   {"label_window_hours", cfg.cohort.label_window_hours},
                   {"label_delta_mg_dl", cfg.cohort.label_delta_mg_dl}};
    j["preprocess"] = {{"missingness_threshold", cfg.preprocess.missingness_threshold},
                       {"knn_k", cfg.preprocess.knn_k}};
    j["select"] = {{"folds", cfg.select.folds},
                   {"grid_size", cfg.select.grid_size},
                   {"min_lambda_ratio", cfg.select.min_lambda_ratio}};
    if (cfg.select.allowlist) j["select"]["allowlist"] = *cfg.select.allowlist;
    j["smote"] = {{"k_neighbors", cfg.smote.k_neighbors},
                  {"target_ratio", cfg.smote.target_ratio}};
    std::vector<std::string> fams;
    for (auto f : cfg.models.families) fams.push_back(family_name(f));
    j["models"] = {{"families", fams},
                   {"split_ratio", cfg.models.split_ratio},
                   {"cv_folds", cfg.models.cv_folds}};
    if (!cfg.models.grids.empty()) {
        nlohmann::ordered_json grids;
        for (const auto& [fam, grid] : cfg.models.grids) {
            nlohmann::ordered_json g;
            for (const auto& [key, values] : grid) g[key] = values;
            grids[fam] = g;
        }
        j["models"]["grids"] = grids;
    }
    j["eval"] = {{"bootstrap_replicates", cfg.eval.bootstrap_replicates},
                 {"ci_level", cfg.eval.ci_level},
                 {"target_sensitivity", cfg.eval.target_sensitivity},
                 {"ablation_replicates", cfg.eval.ablation_replicates},
                 {"ablation_family", family_name(cfg.eval.ablation_family)}};
    j["explain"] = {{"ale_bins", cfg.explain.ale_bins},
                    {"background_cap", cfg.explain.background_cap},
                    {"max_features", cfg.explain.max_features},
                    {"shap_rows", cfg.explain.shap_rows}};
    return j.dump(2);
}

} // namespace aki
