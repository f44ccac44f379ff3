// bufsched command line: generate, run, verify, compare, benchmark.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bufsched/core.hpp"
#include "bufsched/harness.hpp"
#include "bufsched/multi_buffer.hpp"
#include "bufsched/oracle.hpp"
#include "bufsched/single_buffer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << text;
}

bufsched::Instance load_instance(const std::string& path) {
    return bufsched::parse_instance(slurp(path));
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty())
        std::cout << text;
    else
        spill(path, text);
}

struct GenCli {
    bufsched::GenParams params;
    std::string family;
    int size = 0;
    std::string out_path;
};

int cmd_gen(const GenCli& cli) {
    bufsched::Instance inst;
    if (!cli.family.empty()) {
        auto family = bufsched::family_from_name(cli.family);
        if (!family) {
            std::cerr << "unknown family: " << cli.family << "\n";
            return kExitUsage;
        }
        inst = bufsched::gen_family(*family, cli.size, cli.params.seed);
    } else {
        inst = bufsched::gen_random(cli.params);
    }
    emit(cli.out_path, bufsched::serialize_instance(inst));
    return kExitOk;
}

struct RunCli {
    std::string algo;
    std::string in_path;
    std::string out_path;
};

int cmd_run(const RunCli& cli) {
    bufsched::Instance inst = load_instance(cli.in_path);
    bufsched::Schedule sched;
    if (cli.algo == "dos") {
        sched = bufsched::dos_schedule(inst);
    } else if (cli.algo == "greedy-edf") {
        sched = bufsched::greedy_edf(inst).schedule;
    } else if (cli.algo == "ts") {
        sched = bufsched::ts_schedule(inst);
    } else if (cli.algo == "greedy-ts") {
        sched = bufsched::greedy_ts(inst).schedule;
    } else {
        std::cerr << "unknown algorithm: " << cli.algo << "\n";
        return kExitUsage;
    }
    bufsched::ThroughputReport report = bufsched::verify_schedule(inst, sched);
    if (!report.ok()) {  // should be impossible; surface loudly if it happens
        for (const std::string& v : report.violations) std::cerr << "violation: " << v << "\n";
        return kExitMismatch;
    }
    std::cout << "delivered " << report.delivered_count << " value " << report.delivered_value
              << "\n";
    std::string text = bufsched::serialize_schedule(sched);
    if (cli.out_path.empty())
        std::cout << text;
    else
        spill(cli.out_path, text);
    return kExitOk;
}

int cmd_verify(const std::string& in_path, const std::string& sched_path) {
    bufsched::Instance inst = load_instance(in_path);
    bufsched::Schedule sched = bufsched::parse_schedule(slurp(sched_path));
    bufsched::ThroughputReport report = bufsched::verify_schedule(inst, sched);
    if (!report.ok()) {
        for (const std::string& v : report.violations) std::cout << "violation: " << v << "\n";
        return kExitMismatch;
    }
    std::cout << "ok: delivered " << report.delivered_count << " value "
              << report.delivered_value << "\n";
    return kExitOk;
}

int cmd_oracle(const std::string& in_path) {
    bufsched::Instance inst = load_instance(in_path);
    bufsched::OracleResult result = bufsched::oracle_optimal(inst);
    std::cout << "optimal value " << result.optimal_value << "\n";
    std::cout << "witness packets:";
    for (int id : result.witness_set) std::cout << ' ' << id;
    std::cout << "\n";
    std::cout << bufsched::serialize_schedule(result.witness_schedule);
    return kExitOk;
}

int cmd_compare(const std::string& in_path, const std::vector<std::string>& algo_filter,
                const std::string& counterexample_dir, bool no_write) {
    bufsched::Instance inst = load_instance(in_path);
    std::vector<bufsched::AlgorithmEntry> algorithms;
    for (bufsched::AlgorithmEntry& entry : bufsched::standard_algorithms()) {
        bool wanted = algo_filter.empty();
        for (const std::string& name : algo_filter) wanted = wanted || name == entry.name;
        if (wanted) algorithms.push_back(std::move(entry));
    }
    if (algorithms.empty()) {
        std::cerr << "no algorithms selected\n";
        return kExitUsage;
    }
    bufsched::CompareOptions options;
    options.counterexample_dir = counterexample_dir;
    options.write_counterexamples = !no_write;
    bufsched::CompareReport report = bufsched::compare(inst, algorithms, options);
    std::cout << "instance " << report.digest << ": optimal count " << report.oracle_count
              << ", optimal value " << report.oracle_value << "\n";
    for (const bufsched::AlgorithmOutcome& r : report.results) {
        std::cout << "  " << r.name << ": ";
        if (!r.applicable) {
            std::cout << "inapplicable\n";
            continue;
        }
        std::cout << "count " << r.delivered_count << ", value " << r.delivered_value << " -> "
                  << (r.matched ? "match" : "MISMATCH");
        if (!r.note.empty()) std::cout << " (" << r.note << ")";
        std::cout << "\n";
    }
    if (!report.counterexample_path.empty())
        std::cout << "counterexample written to " << report.counterexample_path << "\n";
    return report.all_matched ? kExitOk : kExitMismatch;
}

int cmd_bench(const std::string& algo, const std::vector<std::size_t>& sizes) {
    bufsched::BenchTable table = bufsched::bench(algo, sizes);
    std::printf("%s (median of %d)\n", table.algorithm.c_str(), table.samples);
    std::printf("%12s %14s %8s\n", "n", "seconds", "ratio");
    for (const bufsched::BenchRow& row : table.rows) {
        if (row.ratio > 0.0)
            std::printf("%12zu %14.6f %8.2f\n", row.size, row.median_seconds, row.ratio);
        else
            std::printf("%12zu %14.6f %8s\n", row.size, row.median_seconds, "-");
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"size-bounded buffer packet scheduling"};
    app.require_subcommand(1);

    GenCli gen_cli;
    CLI::App* gen = app.add_subcommand("gen", "generate an instance trace");
    gen->add_option("--buffers", gen_cli.params.buffer_count, "buffer count");
    gen->add_option("--cap-min", gen_cli.params.capacity_min, "min capacity");
    gen->add_option("--cap-max", gen_cli.params.capacity_max, "max capacity");
    gen->add_option("--packets", gen_cli.params.packet_count, "packet count");
    gen->add_option("--horizon", gen_cli.params.horizon, "max release time");
    gen->add_option("--value-min", gen_cli.params.value_min, "min value");
    gen->add_option("--value-max", gen_cli.params.value_max, "max value");
    std::int64_t deadline = -1;
    gen->add_option("--deadline", deadline, "common deadline for every packet");
    gen->add_flag("--fit", gen_cli.params.per_release_fit,
                  "keep each (buffer, release) batch within capacity");
    gen->add_option("--seed", gen_cli.params.seed, "rng seed");
    gen->add_option("--family", gen_cli.family, "named family: sort_hard, monotone_deadline, overflow_trap");
    gen->add_option("--size", gen_cli.size, "family size");
    gen->add_option("-o,--out", gen_cli.out_path, "output trace path (default stdout)");

    RunCli run_cli;
    CLI::App* run = app.add_subcommand("run", "run an algorithm on a trace");
    run->add_option("--algo", run_cli.algo, "dos | greedy-edf | ts | greedy-ts")->required();
    run->add_option("-i,--in", run_cli.in_path, "instance trace")->required();
    run->add_option("-o,--out", run_cli.out_path, "schedule output path (default stdout)");

    std::string verify_in, verify_sched;
    CLI::App* verify = app.add_subcommand("verify", "check a schedule against a trace");
    verify->add_option("-i,--in", verify_in, "instance trace")->required();
    verify->add_option("-s,--schedule", verify_sched, "schedule file")->required();

    std::string oracle_in;
    CLI::App* oracle = app.add_subcommand("oracle", "exhaustive optimum for a small trace");
    oracle->add_option("-i,--in", oracle_in, "instance trace")->required();

    std::string compare_in;
    std::vector<std::string> compare_algos;
    std::string counterexample_dir = "counterexamples";
    bool compare_no_write = false;
    CLI::App* cmp = app.add_subcommand("compare", "run algorithms against the oracle");
    cmp->add_option("-i,--in", compare_in, "instance trace")->required();
    cmp->add_option("--algo", compare_algos, "restrict to these algorithms (repeatable)");
    cmp->add_option("--counterexample-dir", counterexample_dir, "mismatch trace directory");
    cmp->add_flag("--no-write", compare_no_write, "do not write counterexample traces");

    std::string bench_algo;
    std::vector<std::size_t> bench_sizes;
    CLI::App* bench = app.add_subcommand("bench", "time an algorithm across sizes");
    bench->add_option("--algo", bench_algo, "dos | greedy-edf | ts | greedy-ts")->required();
    bench->add_option("--sizes", bench_sizes, "comma-separated instance sizes")
        ->required()
        ->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (gen->parsed()) {
            if (deadline >= 0) gen_cli.params.common_deadline = deadline;
            return cmd_gen(gen_cli);
        }
        if (run->parsed()) return cmd_run(run_cli);
        if (verify->parsed()) return cmd_verify(verify_in, verify_sched);
        if (oracle->parsed()) return cmd_oracle(oracle_in);
        if (cmp->parsed())
            return cmd_compare(compare_in, compare_algos, counterexample_dir, compare_no_write);
        if (bench->parsed()) return cmd_bench(bench_algo, bench_sizes);
    } catch (const bufsched::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
