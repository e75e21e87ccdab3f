#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deckfuse/config.hpp"
#include "deckfuse/errors.hpp"
#include "deckfuse/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;     // bad arguments or bad input data
constexpr int kExitInternal = 3;  // invariant violation / unexpected fault

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deckfuse — bridge deck NDE fusion pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string bundle;
    std::string out_dir;
    std::vector<std::string> overrides;
    app.add_option("-c,--config", config_path, "Flat `key = value` config file");
    app.add_option("--bundle", bundle, "Survey bundle XML path (overrides config)");
    app.add_option("--out", out_dir, "Output directory (overrides config)");
    app.add_option("--set", overrides,
                   "Override any config key as key=value; may be repeated")
        ->take_all();

    const struct {
        const char* name;
        const char* help;
        void (*run)(const deckfuse::RunConfig&);
    } kStages[] = {
        {"convert", "Parse the survey XML and write per-modality feature CSVs",
         &deckfuse::run_convert},
        {"features", "Interpolate features and render contour plots", &deckfuse::run_features},
        {"fuse", "Cluster thresholds, filter defects, intersect alpha shapes",
         &deckfuse::run_fuse},
        {"detect", "Detect defect boxes in the contour images", &deckfuse::run_detect},
        {"verify", "Match fused points against detected boxes and report metrics",
         &deckfuse::run_verify},
        {"pipeline", "Run convert, features, fuse, detect, verify in order",
         &deckfuse::run_pipeline},
        {"synth", "Generate a synthetic survey bundle with known defects",
         &deckfuse::run_synth},
    };
    for (const auto& stage : kStages) {
        app.add_subcommand(stage.name, stage.help)->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        deckfuse::RunConfig cfg;
        if (!config_path.empty()) cfg = deckfuse::read_run_config(config_path);
        if (!bundle.empty()) cfg.bundle = bundle;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        for (const std::string& kv : overrides) {
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos) {
                throw deckfuse::UsageError("--set expects key=value, got `" + kv + "`");
            }
            deckfuse::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        for (const auto& stage : kStages) {
            if (app.got_subcommand(stage.name)) {
                stage.run(cfg);
                return kExitOk;
            }
        }
        throw deckfuse::UsageError("no subcommand selected");
    } catch (const deckfuse::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
