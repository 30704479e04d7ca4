#include <CLI11.hpp>
#include <json.hpp>

#include "hsg/experiments.hpp"
#include "hsg/parallel.hpp"

#include <cstdio>
#include <fstream>

int main(int argc, char** argv) {
    CLI::App app{"hsg: pseudospectral laboratory for the damped sine-Gordon field on the 2-torus"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    long seed = -1;
    int threads = 0;
    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("config", config_path, "path to the experiment config")->required();
    run->add_option("--out", out_dir, "output directory for reports and CSV series");
    run->add_option("--seed", seed, "override the Monte Carlo seed");
    run->add_option("--threads", threads, "worker threads (default: HSG_THREADS or hardware)");

    auto* list = app.add_subcommand("list", "list the available experiments");

    std::string old_path, new_path;
    auto* baseline = app.add_subcommand("baseline", "baseline utilities");
    auto* compare = baseline->add_subcommand("compare", "compare two report files");
    compare->add_option("old", old_path, "baseline report")->required();
    compare->add_option("new", new_path, "candidate report")->required();
    baseline->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        std::fputs(hsg::list_experiments().c_str(), stdout);
        return 0;
    }
    if (run->parsed()) {
        nlohmann::json config;
        std::ifstream f(config_path);
        if (!f) {
            std::fprintf(stderr, "config error: cannot open '%s'\n", config_path.c_str());
            return 1;
        }
        try {
            f >> config;
        } catch (const std::exception& e) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 1;
        }
        return hsg::run_config(config, out_dir, seed, threads);
    }
    if (compare->parsed()) return hsg::baseline_compare(old_path, new_path);
    return 1;
}
