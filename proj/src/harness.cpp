#include "bufsched/harness.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>

#include "bufsched/multi_buffer.hpp"
#include "bufsched/oracle.hpp"
#include "bufsched/single_buffer.hpp"

namespace bufsched {
namespace {

// Bounded draws via rejection so results do not depend on the standard
// library's distribution implementations.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

std::int64_t uniform_in(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(bounded(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

void sort_and_number(Instance& inst) {
    std::stable_sort(inst.packets.begin(), inst.packets.end(), [](const Packet& a, const Packet& b) {
        if (a.release != b.release) return a.release < b.release;
        if (a.deadline != b.deadline) return a.deadline < b.deadline;
        if (a.buffer != b.buffer) return a.buffer < b.buffer;
        return a.value < b.value;
    });
    int id = 0;
    for (Packet& p : inst.packets) p.id = id++;
    refresh_common_deadline(inst);
}

Instance uniform_value_copy(const Instance& inst) {
    Instance out = inst;
    for (Packet& p : out.packets) p.value = 1;
    return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

Instance gen_random(const GenParams& params) {
    if (params.buffer_count < 1) throw std::invalid_argument("gen_random: buffer_count must be >= 1");
    if (params.capacity_min < 1 || params.capacity_min > params.capacity_max)
        throw std::invalid_argument("gen_random: bad capacity range");
    if (params.value_min < 0 || params.value_min > params.value_max)
        throw std::invalid_argument("gen_random: bad value range");
    if (params.packet_count < 0) throw std::invalid_argument("gen_random: bad packet count");
    if (params.horizon < 0) throw std::invalid_argument("gen_random: bad horizon");
    if (params.common_deadline && *params.common_deadline <= params.horizon)
        throw std::invalid_argument("gen_random: common deadline must exceed horizon");

    std::mt19937_64 rng(params.seed);
    Instance inst;
    inst.capacities.reserve(static_cast<std::size_t>(params.buffer_count));
    for (int i = 0; i < params.buffer_count; ++i)
        inst.capacities.push_back(
            static_cast<int>(uniform_in(rng, params.capacity_min, params.capacity_max)));

    const Step slots = params.horizon + 1;
    std::vector<std::vector<int>> arrivals;  // per-buffer arrival counts, fit mode only
    if (params.per_release_fit) {
        std::int64_t total = 0;
        for (int b : inst.capacities) total += static_cast<std::int64_t>(b) * slots;
        if (params.packet_count > total)
            throw std::invalid_argument("gen_random: per_release_fit cannot place that many packets");
        arrivals.assign(static_cast<std::size_t>(params.buffer_count),
                        std::vector<int>(static_cast<std::size_t>(slots), 0));
    }

    inst.packets.reserve(static_cast<std::size_t>(params.packet_count));
    for (int k = 0; k < params.packet_count; ++k) {
        Packet p;
        p.value = uniform_in(rng, params.value_min, params.value_max);
        if (params.per_release_fit) {
            bool placed = false;
            for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
                int b = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(params.buffer_count)));
                Step r = uniform_in(rng, 0, params.horizon);
                if (arrivals[static_cast<std::size_t>(b)][static_cast<std::size_t>(r)] <
                    inst.capacities[static_cast<std::size_t>(b)]) {
                    p.buffer = b;
                    p.release = r;
                    placed = true;
                }
            }
            if (!placed) {  // pick among the remaining free slots
                std::int64_t free_slots = 0;
                for (int b = 0; b < params.buffer_count; ++b)
                    for (Step r = 0; r < slots; ++r)
                        if (arrivals[static_cast<std::size_t>(b)][static_cast<std::size_t>(r)] <
                            inst.capacities[static_cast<std::size_t>(b)])
                            ++free_slots;
                std::int64_t pick = static_cast<std::int64_t>(
                    bounded(rng, static_cast<std::uint64_t>(free_slots)));
                for (int b = 0; b < params.buffer_count && !placed; ++b)
                    for (Step r = 0; r < slots && !placed; ++r)
                        if (arrivals[static_cast<std::size_t>(b)][static_cast<std::size_t>(r)] <
                                inst.capacities[static_cast<std::size_t>(b)] &&
                            pick-- == 0) {
                            p.buffer = b;
                            p.release = r;
                            placed = true;
                        }
            }
            ++arrivals[static_cast<std::size_t>(p.buffer)][static_cast<std::size_t>(p.release)];
        } else {
            p.buffer = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(params.buffer_count)));
            p.release = uniform_in(rng, 0, params.horizon);
        }
        p.deadline = params.common_deadline
                         ? *params.common_deadline
                         : p.release + uniform_in(rng, 1, std::max<Step>(1, params.horizon));
        inst.packets.push_back(p);
    }

    sort_and_number(inst);
    return inst;
}

Instance gen_family(Family family, int size, std::uint64_t seed) {
    if (size < 0) throw std::invalid_argument("gen_family: bad size");
    std::mt19937_64 rng(seed);
    Instance inst;
    switch (family) {
        case Family::sort_hard: {
            inst.capacities = {std::max(size, 1)};
            std::vector<Step> deadlines(static_cast<std::size_t>(size));
            for (int k = 0; k < size; ++k) deadlines[static_cast<std::size_t>(k)] = k + 1;
            for (int k = size - 1; k > 0; --k)
                std::swap(deadlines[static_cast<std::size_t>(k)],
                          deadlines[bounded(rng, static_cast<std::uint64_t>(k) + 1)]);
            for (int k = 0; k < size; ++k)
                inst.packets.push_back({k, 0, deadlines[static_cast<std::size_t>(k)], 1, 0});
            break;
        }
        case Family::monotone_deadline: {
            inst.capacities = {static_cast<int>(uniform_in(rng, 1, 3))};
            std::vector<Step> releases(static_cast<std::size_t>(size));
            for (Step& r : releases) r = uniform_in(rng, 0, 2 * std::max(size, 1));
            std::sort(releases.begin(), releases.end());
            Step prev_deadline = 0;
            for (int k = 0; k < size; ++k) {
                Step r = releases[static_cast<std::size_t>(k)];
                Step d = std::max(prev_deadline, r + uniform_in(rng, 1, 4));
                prev_deadline = d;
                inst.packets.push_back({k, r, d, 1, 0});
            }
            break;
        }
        case Family::overflow_trap: {
            // Buffer 0 (capacity 1) takes back-to-back arrivals that force a
            // send every step; buffer 1 holds a batch that must wait its turn.
            int stagger = (size + 1) / 2;
            int batch = size - stagger;
            inst.capacities = {1, std::max(batch, 1)};
            Step deadline = std::max<Step>(size, 1);
            int id = 0;
            if (size > 0) inst.packets.push_back({id++, 0, deadline, 1, 0});
            for (int k = 0; k < batch; ++k) inst.packets.push_back({id++, 0, deadline, 1, 1});
            for (int r = 1; r < stagger; ++r) inst.packets.push_back({id++, r, deadline, 1, 0});
            break;
        }
    }
    refresh_common_deadline(inst);
    return inst;
}

std::optional<Family> family_from_name(std::string_view name) {
    if (name == "sort_hard") return Family::sort_hard;
    if (name == "monotone_deadline") return Family::monotone_deadline;
    if (name == "overflow_trap") return Family::overflow_trap;
    return std::nullopt;
}

const char* family_name(Family family) {
    switch (family) {
        case Family::sort_hard: return "sort_hard";
        case Family::monotone_deadline: return "monotone_deadline";
        case Family::overflow_trap: return "overflow_trap";
    }
    return "?";
}

std::vector<AlgorithmEntry> standard_algorithms() {
    std::vector<AlgorithmEntry> out;
    out.push_back({"dos", Objective::count, [](const Instance& inst) -> std::optional<Schedule> {
                       if (inst.buffer_count() != 1) return std::nullopt;
                       return dos_schedule(inst);
                   }});
    out.push_back({"greedy-edf", Objective::value, [](const Instance& inst) -> std::optional<Schedule> {
                       if (inst.buffer_count() != 1) return std::nullopt;
                       return greedy_edf(inst).schedule;
                   }});
    out.push_back({"ts", Objective::count, [](const Instance& inst) -> std::optional<Schedule> {
                       if (!inst.packets.empty() &&
                           (!validate_instance(inst, ValidateMode::common_deadline).empty() ||
                            !validate_instance(inst, ValidateMode::per_release_fit).empty()))
                           return std::nullopt;
                       return ts_schedule(inst);
                   }});
    out.push_back({"greedy-ts", Objective::value, [](const Instance& inst) -> std::optional<Schedule> {
                       if (inst.packets.empty()) return Schedule{};
                       if (!validate_instance(inst, ValidateMode::common_deadline).empty())
                           return std::nullopt;
                       return greedy_ts(inst).schedule;
                   }});
    return out;
}

std::string instance_digest(const Instance& inst) {
    std::string text = serialize_instance(inst);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CompareReport compare(const Instance& inst, const std::vector<AlgorithmEntry>& algorithms,
                      const CompareOptions& options) {
    CompareReport report;
    report.digest = instance_digest(inst);

    bool need_count = false, need_value = false;
    for (const AlgorithmEntry& algo : algorithms)
        (algo.objective == Objective::count ? need_count : need_value) = true;
    if (need_count) report.oracle_count = oracle_optimal(uniform_value_copy(inst)).optimal_value;
    if (need_value) report.oracle_value = oracle_optimal(inst).optimal_value;

    for (const AlgorithmEntry& algo : algorithms) {
        AlgorithmOutcome outcome;
        outcome.name = algo.name;
        std::optional<Schedule> sched = algo.run(inst);
        if (!sched) {
            outcome.applicable = false;
            outcome.matched = true;
            outcome.note = "inapplicable";
            report.results.push_back(std::move(outcome));
            continue;
        }
        outcome.applicable = true;
        ThroughputReport verdict = verify_schedule(inst, *sched);
        outcome.delivered_count = verdict.delivered_count;
        outcome.delivered_value = verdict.delivered_value;
        if (!verdict.ok()) {
            outcome.matched = false;
            outcome.note = "schedule failed verification: " + verdict.violations.front();
        } else if (algo.objective == Objective::count) {
            outcome.matched = verdict.delivered_count == report.oracle_count;
            if (!outcome.matched) outcome.note = "delivered count differs from optimum";
        } else {
            outcome.matched = verdict.delivered_value == report.oracle_value;
            if (!outcome.matched) outcome.note = "delivered value differs from optimum";
        }
        report.all_matched = report.all_matched && outcome.matched;
        report.results.push_back(std::move(outcome));
    }

    if (!report.all_matched && options.write_counterexamples) {
        std::filesystem::create_directories(options.counterexample_dir);
        std::filesystem::path path =
            std::filesystem::path(options.counterexample_dir) / (report.digest + ".trace");
        std::ofstream out(path);
        out << "# mismatch against exhaustive optimum\n";
        out << "# optimal count " << report.oracle_count << ", optimal value " << report.oracle_value
            << "\n";
        for (const AlgorithmOutcome& r : report.results)
            if (r.applicable && !r.matched)
                out << "# " << r.name << ": count " << r.delivered_count << ", value "
                    << r.delivered_value << " (" << r.note << ")\n";
        out << serialize_instance(inst);
        report.counterexample_path = path.string();
    }
    return report;
}

namespace {

Instance bench_instance(const std::string& algorithm, std::size_t size) {
    GenParams params;
    params.packet_count = static_cast<int>(size);
    params.seed = derive_seed(0xBE4C4Dull, size);
    Step n = static_cast<Step>(size);
    if (algorithm == "dos") {
        params.buffer_count = 1;
        params.capacity_min = params.capacity_max = 256;
        params.horizon = std::max<Step>(1, n / 2);
    } else if (algorithm == "ts") {
        params.buffer_count = 8;
        params.capacity_min = params.capacity_max = 32;
        params.horizon = std::max<Step>(1, n / 2);
        params.common_deadline = params.horizon + n / 8 + 1;
        params.per_release_fit = true;
    } else if (algorithm == "greedy-edf") {
        // Dense single-buffer load: the augmenting-path count tracks the
        // schedule length, so a short horizon keeps the quadratic growth
        // visible without inflating the constant.
        params.buffer_count = 1;
        params.capacity_min = params.capacity_max = 8;
        params.horizon = std::max<Step>(1, n / 8);
        params.value_min = 1;
        params.value_max = 100;
    } else if (algorithm == "greedy-ts") {
        params.buffer_count = 4;
        params.capacity_min = params.capacity_max = 8;
        params.horizon = std::max<Step>(1, n);
        params.common_deadline = params.horizon + n / 4 + 1;
        params.per_release_fit = true;
        params.value_min = 1;
        params.value_max = 100;
    } else {
        throw std::invalid_argument("bench: unknown algorithm " + algorithm);
    }
    return gen_random(params);
}

}  // namespace

BenchTable bench(const std::string& algorithm, const std::vector<std::size_t>& sizes) {
    BenchTable table;
    table.algorithm = algorithm;
    table.samples = 5;

    std::function<void(const Instance&)> run;
    if (algorithm == "dos") {
        run = [](const Instance& inst) { dos_schedule(inst); };
    } else if (algorithm == "ts") {
        run = [](const Instance& inst) { ts_schedule(inst); };
    } else if (algorithm == "greedy-edf") {
        run = [](const Instance& inst) { greedy_edf(inst); };
    } else if (algorithm == "greedy-ts") {
        run = [](const Instance& inst) { greedy_ts(inst); };
    } else {
        throw std::invalid_argument("bench: unknown algorithm " + algorithm);
    }

    for (std::size_t size : sizes) {
        Instance inst = bench_instance(algorithm, size);
        run(inst);  // warm-up, outside timing
        std::vector<double> samples;
        for (int s = 0; s < table.samples; ++s) {
            auto start = std::chrono::steady_clock::now();
            run(inst);
            auto stop = std::chrono::steady_clock::now();
            samples.push_back(std::chrono::duration<double>(stop - start).count());
        }
        std::sort(samples.begin(), samples.end());
        BenchRow row;
        row.size = size;
        row.median_seconds = samples[samples.size() / 2];
        row.ratio = table.rows.empty() ? 0.0
                                       : row.median_seconds / table.rows.back().median_seconds;
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace bufsched
