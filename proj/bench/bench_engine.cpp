// Serial reference vs OpenMP benchmark engine on the same grid.
#include <chrono>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#include <omp.h>

#include "degcausal/evaluation.hpp"

using namespace degcausal;

int main(int argc, char** argv) {
    CLI::App app{"benchmark-engine timing"};
    int reps = 5, n_max = 5, jobs = 0;
    std::uint64_t seed = 1;
    std::vector<std::string> methods{"stable-pc", "ges", "direct-lingam", "notears-linear"};
    app.add_option("--replications", reps);
    app.add_option("--n-max", n_max);
    app.add_option("--jobs", jobs, "threads for the parallel run, 0 = OpenMP default");
    app.add_option("--seed", seed);
    app.add_option("--methods", methods)->delimiter(',');
    CLI11_PARSE(app, argc, argv);

    BenchmarkConfig cfg;
    cfg.methods.clear();
    try {
        for (const auto& m : methods) cfg.methods.push_back(parse_method(m));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
    cfg.strategies = {Strategy::RawStacking, Strategy::IncrementStacking};
    cfg.n_max = n_max;
    cfg.replications = reps;
    cfg.jobs = jobs;
    cfg.record_timing = false;

    const SystemSpec spec = coupled_pair_spec();
    const CausalGraph truth = spec.truth_graph();
    using clock = std::chrono::steady_clock;

    auto t0 = clock::now();
    const BenchmarkResult serial = run_benchmark_serial(spec, truth, cfg, seed);
    const double t_serial = std::chrono::duration<double>(clock::now() - t0).count();

    t0 = clock::now();
    const BenchmarkResult parallel = run_benchmark(spec, truth, cfg, seed);
    const double t_parallel = std::chrono::duration<double>(clock::now() - t0).count();

    const bool same = cells_csv(serial) == cells_csv(parallel) && emr_csv(serial) == emr_csv(parallel);
    std::printf("cells      %zu\n", serial.cells.size());
    std::printf("threads    %d\n", jobs > 0 ? jobs : omp_get_max_threads());
    std::printf("serial     %.3f s\n", t_serial);
    std::printf("parallel   %.3f s\n", t_parallel);
    std::printf("speedup    %.2fx\n", t_serial / t_parallel);
    std::printf("identical  %s\n", same ? "yes" : "NO");
    return same ? 0 : 1;
}
