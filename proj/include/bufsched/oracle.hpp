#pragma once

#include <cstdint>
#include <vector>

#include "bufsched/core.hpp"

namespace bufsched {

inline constexpr int kOracleMaxPackets = 16;
inline constexpr Step kOracleMaxHorizon = 16;

struct OracleResult {
    Value optimal_value = 0;
    std::vector<int> witness_set;  // packet ids, ascending
    Schedule witness_schedule;
    std::uint64_t explored = 0;  // search nodes visited (diagnostics)
};

// True iff every packet in `subset` (a set of packet ids) can be delivered
// within its window under the buffer capacities. Exhaustive DFS over
// per-step buffer choices; within the chosen buffer the earliest-deadline
// resident is sent, which is exchange-safe. Memoized on (step, resident set).
// Guards: |subset| <= kOracleMaxPackets and the subset's max deadline
// <= kOracleMaxHorizon; throws std::invalid_argument beyond them, and on ids
// absent from inst.
bool oracle_feasible(const Instance& inst, const std::vector<int>& subset);

// Maximizes total value over feasible subsets. Packets are considered in
// (value desc, id asc) order with include-before-exclude branching and a
// remaining-value bound, so the first optimum found is the canonical witness;
// for equal values that is the lexicographically smallest id-set. Guards:
// n <= kOracleMaxPackets, horizon <= kOracleMaxHorizon.
OracleResult oracle_optimal(const Instance& inst);

}  // namespace bufsched
