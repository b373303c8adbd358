#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "oqs/config.hpp"
#include "oqs/presets.hpp"
#include "oqs/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"oqs: Lindblad open-quantum-system simulator"};
    app.set_version_flag("--version", std::string("oqs ") + oqs::kToolVersion);
    app.footer("OQS_THREADS caps the worker threads used for trajectory ensembles.");
    app.require_subcommand(1);

    std::string run_path;
    auto* run_cmd = app.add_subcommand("run", "run an experiment described by a config file");
    run_cmd->add_option("config", run_path, "config file")->required();

    std::string validate_path;
    auto* validate_cmd =
        app.add_subcommand("validate", "check a config file without running it");
    validate_cmd->add_option("config", validate_path, "config file")->required();

    std::string preset_name;
    std::vector<std::string> overrides;
    auto* preset_cmd = app.add_subcommand("preset", "run a shipped scenario");
    preset_cmd->add_option("name", preset_name, "preset name")->required();
    preset_cmd->add_option("--set", overrides, "override a config entry: section.key=value");

    auto* list_cmd = app.add_subcommand("list-presets", "list the shipped scenarios");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) {
            for (const auto& p : oqs::preset_list())
                std::printf("%-26s %s\n", p.name.c_str(), p.description.c_str());
            return 0;
        }
        if (validate_cmd->parsed()) {
            oqs::parse_experiment(oqs::read_config(validate_path));
            std::printf("ok\n");
            return 0;
        }
        oqs::ConfigFile cf;
        if (run_cmd->parsed()) {
            cf = oqs::read_config(run_path);
        } else {
            cf = oqs::preset_config(preset_name);
            oqs::apply_overrides(cf, overrides);
        }
        oqs::ExperimentConfig cfg = oqs::parse_experiment(cf);
        oqs::RunArtifacts art = oqs::run_experiment(cfg);
        for (const auto& f : art.outputs) std::printf("wrote %s\n", f.c_str());
        return 0;
    } catch (const oqs::SchemaError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const oqs::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const oqs::InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const oqs::CapabilityError& e) {
        std::fprintf(stderr, "capability error: %s\n", e.what());
        return 4;
    } catch (const oqs::Error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
