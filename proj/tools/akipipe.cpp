// akipipe: run the AKI risk pipeline end to end or one stage at a time.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "aki/errors.hpp"
#include "aki/pipeline.hpp"
#include "aki/synth.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Pipeline config (JSON)")->required();
    cmd->add_option("--seed", opts.seed, "Override the master seed");
    cmd->add_option("--threads", opts.threads, "Worker threads for stage-internal parallelism");
    cmd->add_option("--out-dir", opts.out_dir,
                    "Artifact directory (default: config value, then $AKIPIPE_OUT_DIR)");
}

aki::PipelineConfig resolve(const CommonOpts& opts) {
    aki::PipelineConfig cfg = aki::load_config(opts.config_path);
    if (const char* env = std::getenv("AKIPIPE_OUT_DIR"); env && cfg.out_dir == "artifacts")
        cfg.out_dir = env;
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.threads) cfg.threads = *opts.threads;
    if (opts.out_dir) cfg.out_dir = *opts.out_dir;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interpretable early-AKI risk pipeline for cirrhotic ICU stays"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string family;
    std::string current_stage = "startup";

    struct Stage {
        const char* name;
        const char* help;
        void (*fn)(const aki::PipelineConfig&);
    };
    const Stage stages[] = {
        {"cohort", "Ingest the cohort CSV (generating it first when synth is configured)",
         aki::stage_cohort},
        {"split", "Draw the stratified train/test split", aki::stage_split},
        {"preprocess", "Filter, impute, and standardize features", aki::stage_preprocess},
        {"select", "LASSO feature selection with cross-validated lambda", aki::stage_select},
        {"evaluate", "Score trained models on the test split", aki::stage_evaluate},
        {"explain", "Exact Shapley values and ALE curves for the best model",
         aki::stage_explain},
        {"ablate", "Leave-one-feature-out retraining study", aki::stage_ablate},
        {"report", "Render ROC, ablation, and ALE figures as SVG", aki::stage_report},
    };

    auto* run = app.add_subcommand("run", "Run every stage in order");
    add_common(run, opts);

    auto* synth = app.add_subcommand("synth", "Generate the synthetic cohort CSV only");
    add_common(synth, opts);

    for (const auto& stage : stages) add_common(app.add_subcommand(stage.name, stage.help), opts);

    auto* train = app.add_subcommand("train", "Tune, balance, and fit model families");
    add_common(train, opts);
    train->add_option("--family", family,
                      "Train a single family (gbdt|logistic|gaussian_nb|shallow_nn)");

    CLI11_PARSE(app, argc, argv);

    try {
        const aki::PipelineConfig cfg = resolve(opts);
        const std::string sub = app.get_subcommands().front()->get_name();
        current_stage = sub;
        if (sub == "run") {
            aki::run_pipeline(cfg);
            aki::stage_report(cfg);
        } else if (sub == "synth") {
            if (!cfg.synth.enabled)
                throw aki::ConfigError("synth subcommand needs a synth config section");
            std::filesystem::create_directories(cfg.out_dir);
            aki::write_cohort_csv(aki::generate(aki::resolved_synth_spec(cfg)),
                                  (std::filesystem::path(cfg.out_dir) / "synth_cohort.csv")
                                      .string());
        } else if (sub == "train") {
            aki::stage_train(cfg, family);
        } else {
            for (const auto& stage : stages)
                if (sub == stage.name) stage.fn(cfg);
        }
    } catch (const aki::ConfigError& e) {
        std::cerr << "[" << current_stage << "] config error: " << e.what() << '\n';
        return 2;
    } catch (const aki::DataError& e) {
        std::cerr << "[" << current_stage << "] data error: " << e.what() << '\n';
        return 3;
    } catch (const aki::NumericError& e) {
        std::cerr << "[" << current_stage << "] numeric error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "[" << current_stage << "] error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
