#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "ifslab/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ifslab: simulation and statistics lab for iterated function systems "
                 "of circle homeomorphisms"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string format = "json";
    std::uint64_t seed = 1;
    int workers = 1;

    for (const std::string& name : ifslab::subcommand_names()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "config JSON file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--format", format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--workers", workers, "worker threads (does not affect results)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        ifslab::SystemSpec spec = ifslab::load_config(config_path);
        ifslab::RunOptions opt;
        opt.subcommand = app.get_subcommands().front()->get_name();
        opt.out_dir = out_dir;
        opt.format = format;
        opt.master_seed = seed;
        opt.workers = workers;
        int rc = ifslab::run_subcommand(spec, opt);
        if (rc == 2)
            std::fprintf(stderr, "%s: verdict failed (see report in %s)\n", opt.subcommand.c_str(),
                         out_dir.c_str());
        return rc;
    } catch (const ifslab::ParseError& e) {
        std::fprintf(stderr, "config parse error: %s\n", e.what());
        return 1;
    } catch (const ifslab::ValidationError& e) {
        std::fprintf(stderr, "config validation error: %s\n", e.what());
        return 1;
    } catch (const ifslab::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
}
