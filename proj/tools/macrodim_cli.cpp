#include "macrodim/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace macrodim;

namespace {

struct Flag {
    const char* name;
    const char* key;
    const char* help;
};

// Binds each optional flag to a config key; only flags given on the command line override.
void bind(CLI::App* app, std::vector<std::pair<std::string, std::string>>& slots,
          std::initializer_list<Flag> flags)
{
    for (const auto& f : flags) {
        slots.emplace_back(f.key, "");
        const std::size_t at = slots.size() - 1;
        app->add_option_function<std::string>(
            f.name, [&slots, at](const std::string& v) { slots[at].second = v; }, f.help);
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Macroscopic dimension experiments"};
    app.require_subcommand(1);
    RunRequest req;
    std::vector<std::pair<std::string, std::string>> slots;
    std::vector<std::string> sets;
    std::string shells;

    auto add = [&](const char* name, const char* help) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", req.config_path, "config file")->check(CLI::ExistingFile);
        sub->add_option("--set", sets, "key=value override, repeatable");
        bind(sub, slots,
             {{"--seed", "seed", "master seed"}, {"--out", "output", "output directory"}});
        return sub;
    };

    auto* spectrum = add("spectrum", "dimension spectrum over gamma");
    bind(spectrum, slots,
         {{"--model", "model", "bm | ou | linear_she | pam_white | pam_exact | colored"},
          {"--gamma", "gamma", "comma separated levels"},
          {"--replicas", "replicas", "replicas per level"},
          {"--n-min", "grid.n_min", "first shell"},
          {"--n-max", "grid.n_max", "last shell"},
          {"--dt", "grid.dt", "path step"},
          {"--dx", "grid.dx", "field step"},
          {"--t", "grid.t", "field time"}});
    spectrum->add_option("--shells", shells, "shell range a..b");

    auto* simulate = add("simulate", "one path or field");
    bind(simulate, slots,
         {{"--model", "model", "bm | ou | linear_she | pam_white | pam_exact | colored"},
          {"--t-max", "grid.t_max", "path horizon"},
          {"--x-max", "grid.x_max", "field half-width"},
          {"--dt", "grid.dt", "path step"},
          {"--dx", "grid.dx", "field step"},
          {"--t", "grid.t", "field time"}});

    auto* dimension = add("dimension", "estimate dimensions of a pixels.csv");
    bind(dimension, slots, {{"--input", "dimension.input", "pixels.csv"}});
    dimension->add_option("--shells", shells, "shell range a..b");

    auto* oracle = add("oracle", "Feynman-Kac moment oracle");
    bind(oracle, slots,
         {{"--k", "oracle.k", "moment order"},
          {"--t", "oracle.t", "time"},
          {"--d", "oracle.d", "dimension"},
          {"--f", "oracle.f", "correlation"},
          {"--paths", "oracle.paths", "Brownian k-tuples"},
          {"--ds", "oracle.ds", "quadrature step"}});

    auto* fixtures = add("fixtures", "deterministic test sets");
    bind(fixtures, slots,
         {{"--kind", "fixtures.kind", "naturals | exp_naturals | full_lattice | skeleton"},
          {"--theta", "fixtures.theta", "skeleton exponent"},
          {"--d", "fixtures.d", "dimension"}});
    fixtures->add_option("--shells", shells, "shell range a..b");

    auto* report = add("report", "merge spectrum runs");
    report->add_option("runs", req.inputs, "run directories")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_validation;
    }
    req.subcommand = app.get_subcommands().front()->get_name();

    for (const auto& [k, v] : slots)
        if (!v.empty())
            req.overrides.emplace_back(k, v);
    if (!shells.empty()) {
        const auto dots = shells.find("..");
        if (dots == std::string::npos) {
            std::cerr << "validation error: --shells expects a..b\n";
            return exit_validation;
        }
        req.overrides.emplace_back("grid.n_min", shells.substr(0, dots));
        req.overrides.emplace_back("grid.n_max", shells.substr(dots + 2));
    }
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            std::cerr << "validation error: --set expects key=value, got '" << s << "'\n";
            return exit_validation;
        }
        req.overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return run(req, std::cout, std::cerr);
}
