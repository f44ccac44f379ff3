#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bufsched/core.hpp"

namespace bufsched {

struct GenParams {
    int buffer_count = 1;
    int capacity_min = 1;
    int capacity_max = 1;
    int packet_count = 0;
    Step horizon = 0;  // releases drawn uniformly from [0, horizon]
    Value value_min = 1;
    Value value_max = 1;
    // When set, every deadline equals this (must exceed horizon); otherwise
    // deadline = release + uniform slack from [1, max(1, horizon)].
    std::optional<Step> common_deadline;
    bool per_release_fit = false;  // keep every (buffer, release) within capacity
    std::uint64_t seed = 0;
};

// Deterministic: equal params (seed included) give byte-identical instances,
// independent of platform. Packet ids are assigned 0..n-1 after sorting by
// (release, deadline, buffer, value). Throws std::invalid_argument on empty
// ranges, a common deadline not exceeding the horizon, or per_release_fit
// demands that cannot fit (n > total capacity across the horizon).
Instance gen_random(const GenParams& params);

enum class Family {
    sort_hard,          // n packets at t=0, deadlines a permutation of 1..n, B = n
    monotone_deadline,  // deadlines weakly increasing with release, one buffer
    overflow_trap,      // staggered arrivals: exactly one safe buffer choice per step
};

Instance gen_family(Family family, int size, std::uint64_t seed = 0);
std::optional<Family> family_from_name(std::string_view name);
const char* family_name(Family family);

enum class Objective { count, value };

struct AlgorithmEntry {
    std::string name;
    Objective objective = Objective::count;
    // Returns the schedule, or nullopt when the instance shape is out of
    // scope for this algorithm (reported as inapplicable, not a mismatch).
    std::function<std::optional<Schedule>(const Instance&)> run;
};

// dos + greedy-edf (single-buffer) and ts + greedy-ts (common deadline).
std::vector<AlgorithmEntry> standard_algorithms();

struct AlgorithmOutcome {
    std::string name;
    bool applicable = false;
    bool matched = true;
    std::int64_t delivered_count = 0;
    Value delivered_value = 0;
    std::string note;
};

struct CompareOptions {
    std::string counterexample_dir = "counterexamples";
    bool write_counterexamples = true;
};

struct CompareReport {
    std::string digest;
    std::vector<AlgorithmOutcome> results;
    std::int64_t oracle_count = 0;  // optimal delivered count (values ignored)
    Value oracle_value = 0;         // optimal total value
    bool all_matched = true;
    std::string counterexample_path;  // set when a mismatch was written out
};

// Runs each algorithm, verifies every emitted schedule, and checks the
// delivered count (count objective) or total value (value objective) against
// the exhaustive optimum. A schedule failing verify_schedule is a mismatch
// even if its numbers agree. On mismatch the instance is serialized into
// options.counterexample_dir as <digest>.trace with the disagreement recorded
// in '#' comments. Instance must fit the oracle guards.
CompareReport compare(const Instance& inst, const std::vector<AlgorithmEntry>& algorithms,
                      const CompareOptions& options = {});

struct BenchRow {
    std::size_t size = 0;
    double median_seconds = 0.0;
    double ratio = 0.0;  // vs previous row; 0 for the first
};

struct BenchTable {
    std::string algorithm;
    int samples = 0;
    std::vector<BenchRow> rows;
};

// Times one algorithm on generated instances of the given sizes (generation
// excluded from timing): median of 5 runs per size, plus consecutive-size
// growth ratios. Instance parameters are fixed per (algorithm, size), so runs
// are reproducible. Algorithm is one of dos, greedy-edf, ts, greedy-ts.
BenchTable bench(const std::string& algorithm, const std::vector<std::size_t>& sizes);

// FNV-1a of the serialized instance, 16 hex characters.
std::string instance_digest(const Instance& inst);

// Stateless seed mixer for deriving per-case seeds in sweeps.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace bufsched
