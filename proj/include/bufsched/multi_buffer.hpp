#pragma once

#include <optional>
#include <vector>

#include "bufsched/core.hpp"
#include "bufsched/single_buffer.hpp"  // GreedyResult

namespace bufsched {

// Reserved-slot table for common-deadline instances: slots[i][k] is the
// number of free slots buffer i must present just before the arrivals at
// release_times[i][k] so that no later arrival overflows, assuming the buffer
// is served every step in between. Computed backward from the last release:
//   base        Z(r_max) = min{B, |P(r_max)|}
//   recurrence  Z(t) = min{B, max{|P(t)|, Z(t') + |P(t)| - (t' - t)}}
// where t' is the next release after t.
struct ZTable {
    struct BufferEntry {
        std::vector<Step> release_times;  // ascending; empty for idle buffers
        std::vector<Step> slots;          // aligned with release_times
    };
    std::vector<BufferEntry> buffers;

    std::optional<Step> slots_at(int buffer, Step release) const;
};

// The clamped rule above is the default. horizon_max keeps an alternative
// un-clamped formulation (base max{|P(r_max)|, D - r_max}, recurrence
// min{B, Z(t') + |P(t)| - (t' - t)}) solely for comparison experiments.
enum class ZBaseRule { clamped, horizon_max };

// How the buffer to serve at step t is chosen, where t~ ranges over a
// buffer's pending release times and Z is its table entry there:
//   horizon_adjusted (default): before each future wave t~ a non-empty
//       buffer owes |Q| + A(t~) + Z(t~) - B sends, where A(t~) counts the
//       admissible arrivals of the waves in between. The owed count is
//       capped by the sends achievable before t~ — packets cannot leave
//       before they arrive, so over every intermediate wave u the cap is
//       |Q| + A(u) plus the steps remaining from u to t~. The next send is
//       due by the earliest t~ - owed over waves owing at least one send
//       (never earlier than the current step), and a buffer owing any send
//       is tight. Buffers owing nothing — every wave fits, or no release is
//       pending — are due only at the horizon. The earliest due time is
//       served first; ties keep the last-served buffer, then take the
//       lowest index.
//   immediate: tight means Z(t~) + |Q| >= B with Z := 0 when no release is
//       pending; the lowest-indexed tight buffer is served. Kept for
//       comparison experiments; a boolean per-buffer test cannot order
//       several buffers whose joint demand exceeds the steps remaining.
enum class TightnessRule { horizon_adjusted, immediate };

struct TsOptions {
    ZBaseRule z_base = ZBaseRule::clamped;
    TightnessRule tightness = TightnessRule::horizon_adjusted;
};

// Replay state; exposed for instrumentation.
struct TsState {
    std::vector<std::vector<int>> queues;  // resident ids per buffer, ascending
    Step step = 0;
    std::vector<std::optional<Step>> next_release;  // per buffer
    int last_served = -1;
};

struct TsStepRecord {
    Step step = 0;
    int served_buffer = -1;
    int sent_id = -1;
    std::vector<int> tight;  // buffer indices flagged tight this step
};

struct TsTrace {
    std::vector<TsStepRecord> steps;
    std::vector<Send> drops;  // (arrival step, packet id) pairs
};

// Z table over the whole instance, or over the packet subset given by ids.
// Requires a recorded common deadline unless the packet set is empty.
ZTable compute_z_table(const Instance& inst, ZBaseRule rule = ZBaseRule::clamped);
ZTable compute_z_table(const Instance& inst, const std::vector<int>& subset,
                       ZBaseRule rule = ZBaseRule::clamped);

// Tight-schedule replay for common-deadline instances (values ignored):
// arrivals join their buffer or are dropped when it is full; each step the
// buffer chosen by the tightness rule sends its smallest id. Stops at step
// D-1. Delivers the maximum possible count. Throws std::invalid_argument
// when validation in modes common_deadline or per_release_fit fails.
Schedule ts_schedule(const Instance& inst);
Schedule ts_schedule(const Instance& inst, const TsOptions& options, TsTrace* trace);

// True iff the replay restricted to `subset` delivers every member: the Z
// table is recomputed for the subset and the run must finish with no drops
// and no residents left at D. Requires a common-deadline instance.
bool ts_feasible(const Instance& inst, const std::vector<int>& subset);
bool ts_feasible(const Instance& inst, const std::vector<int>& subset, const TsOptions& options);

// Considers packets by non-increasing value (ties: smaller id) and keeps each
// packet whose addition stays ts_feasible. Maximum-value subset for
// common-deadline instances; the schedule is the replay of the final
// selection.
GreedyResult greedy_ts(const Instance& inst);
GreedyResult greedy_ts(const Instance& inst, const TsOptions& options);

}  // namespace bufsched
