#include <iostream>

#include <CLI11.hpp>

#include "sievelab/acceptance.hpp"
#include "sievelab/experiments.hpp"

using namespace sievelab;

int main(int argc, char** argv) {
    CLI::App app{"sievelab: spectral and cubic large-sieve experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--set", overrides, "override key=value (repeatable)");

    std::vector<int> only;
    auto* selftest = app.add_subcommand("selftest", "run the acceptance criteria");
    selftest->add_option("--only", only, "criterion ids to run (default: all)");

    i64 M = 0, Q = 0;
    std::string out_path, variant = "delta1";
    std::size_t max_cells = CubicSieveConfig{}.max_cells;
    auto* exp = app.add_subcommand("export-matrix", "write the cubic sieve matrix as complex64 pairs plus a JSON header");
    exp->add_option("--M", M, "norm cutoff for columns")->required();
    exp->add_option("--Q", Q, "norm cutoff for moduli")->required();
    exp->add_option("--out", out_path, "output path; header goes to <out>.json")->required();
    exp->add_option("--variant", variant, "delta1 or delta3");
    exp->add_option("--max-cells", max_cells, "cell budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*run) {
            ExperimentConfig cfg = load_config(config_path);
            for (const auto& o : overrides) cfg.apply_override(o);
            ExperimentResult res;
            const int status = run_experiment(cfg, &res);
            std::cout << res.summary.dump(2) << '\n';
            return status;
        }
        if (*selftest) return acceptance::run(std::cout, only);
        CubicSieveConfig cfg{M, Q, parse_cubic_variant(variant)};
        cfg.max_cells = max_cells;
        const SieveMatrix m = build_cubic_sieve_matrix(cfg);
        export_cubic_matrix(m, cfg, out_path);
        std::cout << "wrote " << m.entries.rows() << "x" << m.entries.cols() << " matrix to " << out_path << '\n';
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
