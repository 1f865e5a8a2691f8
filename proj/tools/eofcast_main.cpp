#include <cstdint>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eofcast/errors.hpp"
#include "eofcast/pipeline.hpp"
#include "eofcast/synth.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int threads = -1;
};

eofcast::PipelineConfig make_config(const CommonArgs& args)
{
    eofcast::PipelineConfig cfg = eofcast::load_pipeline_config(args.config);
    if (!args.out.empty()) cfg.out = args.out;
    if (args.seed_given) cfg.seed = args.seed;
    if (args.threads >= 0) cfg.threads = static_cast<unsigned>(args.threads);
    if (cfg.out.empty())
        throw eofcast::ConfigError(
            "no output directory: set 'out' in the config or pass --out");
    return cfg;
}

void add_common(CLI::App* sub, CommonArgs& args, bool seed_required)
{
    sub->add_option("--config", args.config, "pipeline config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "output directory (overrides the config)");
    auto* seed =
        sub->add_option("--seed", args.seed, "RNG seed (overrides the config)");
    if (seed_required) seed->required();
    sub->add_option("--threads", args.threads, "worker threads, 0 = all cores");
    sub->parse_complete_callback([&args, sub] {
        args.seed_given = sub->count("--seed") > 0;
    });
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"EOF/wavelet-ANN forecasting of gridded climate fields"};
    app.require_subcommand(1);

    CommonArgs args;
    std::function<int()> action;

    for (const auto& [name, help, fn] :
         {std::tuple{"ingest", "read the data into the binary field artifact",
                     &eofcast::stage_ingest},
          std::tuple{"cluster", "DTW distances, hierarchical clustering, grid assignment",
                     &eofcast::stage_cluster},
          std::tuple{"coherence", "seasonal statistics and coherence scores per group",
                     &eofcast::stage_coherence},
          std::tuple{"decompose", "per-cluster EOF decomposition and rank selection",
                     &eofcast::stage_decompose},
          std::tuple{"forecast", "train wavelet-ANN models and extend the EOFs",
                     &eofcast::stage_forecast}}) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub, args, false);
        sub->callback([&action, &args, fn] {
            action = [&args, fn] {
                fn(make_config(args));
                return 0;
            };
        });
    }

    {
        CLI::App* sub = app.add_subcommand(
            "evaluate", "reconstruct, score the medoids, write the report");
        add_common(sub, args, false);
        sub->callback([&action, &args] {
            action = [&args] {
                eofcast::stage_evaluate(make_config(args));
                return 0;
            };
        });
    }

    {
        CLI::App* sub = app.add_subcommand("run", "full pipeline, all stages in order");
        add_common(sub, args, true);
        sub->callback([&action, &args] {
            action = [&args] {
                eofcast::run_pipeline(make_config(args));
                return 0;
            };
        });
    }

    {
        auto spec = std::make_shared<eofcast::SyntheticFieldSpec>();
        auto synth_out = std::make_shared<std::string>();
        CLI::App* sub =
            app.add_subcommand("synth", "write a synthetic test dataset as tidy CSV");
        sub->add_option("--out", *synth_out, "output CSV path")->required();
        sub->add_option("--seed", spec->seed, "generator seed");
        sub->add_option("--years", spec->years, "calendar years from 2018-01-01");
        sub->add_option("--nx", spec->grid_nx, "grid width");
        sub->add_option("--ny", spec->grid_ny, "grid height");
        sub->add_option("--noise-sd", spec->noise_sd, "white-noise standard deviation");
        sub->callback([&action, spec, synth_out] {
            action = [spec, synth_out] {
                eofcast::write_tidy_csv(eofcast::synthetic_field(*spec), *synth_out);
                return 0;
            };
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1; // usage problems are config errors
    }

    try {
        return action ? action() : 0;
    } catch (const eofcast::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const eofcast::SvdFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const eofcast::NonFiniteLoss& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const eofcast::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
