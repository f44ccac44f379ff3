#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bufsched {

using Step = std::int64_t;   // discrete time step index
using Value = std::int64_t;  // packet value (integral weights)

// A packet may be transmitted at any step in [release, deadline); it occupies
// a slot in its designated buffer from its release step through the step it
// is sent (drop-at-arrival semantics: packets that are never sent occupy
// nothing).
struct Packet {
    int id = 0;
    Step release = 0;
    Step deadline = 1;
    Value value = 0;
    int buffer = 0;

    bool operator==(const Packet&) const = default;
};

struct Instance {
    std::vector<int> capacities;  // capacities[i] = B_i, one per buffer
    std::vector<Packet> packets;
    // Set iff every packet shares this deadline (see refresh_common_deadline).
    std::optional<Step> common_deadline;

    int buffer_count() const { return static_cast<int>(capacities.size()); }
    int packet_count() const { return static_cast<int>(packets.size()); }
    Step horizon() const {  // max deadline, 0 when empty
        Step h = 0;
        for (const Packet& p : packets) h = p.deadline > h ? p.deadline : h;
        return h;
    }
    Step max_release() const {
        Step r = 0;
        for (const Packet& p : packets) r = p.release > r ? p.release : r;
        return r;
    }

    bool operator==(const Instance&) const = default;
};

struct Send {
    Step step = 0;
    int packet_id = 0;

    bool operator==(const Send&) const = default;
};

// May hold arbitrary (step, id) pairs; verify_schedule reports violations.
struct Schedule {
    std::vector<Send> sends;

    bool operator==(const Schedule&) const = default;
};

struct ThroughputReport {
    std::int64_t delivered_count = 0;
    Value delivered_value = 0;  // meaningful when violations is empty
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

enum class ValidateMode {
    general,
    common_deadline,  // general + all deadlines equal the recorded D
    per_release_fit,  // general + |P_i(t)| <= B_i for every buffer/release
};

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg), line(line_), column(col_) {}
};

// Sets common_deadline iff the instance is non-empty and all deadlines agree.
void refresh_common_deadline(Instance& inst);

// Text trace format ('#' comment lines and blank lines are skipped):
//   buffers <m>
//   <B_1> ... <B_m>
//   packets <n>
//   <id> <release> <deadline> <value> <buffer>     (n lines)
// Throws ParseError with 1-based line/column on syntax or semantic errors
// (duplicate or out-of-range id, bad buffer index, deadline <= release,
// capacity < 1).
Instance parse_instance(std::string_view text);
std::string serialize_instance(const Instance& inst);

// Schedule file: one "<step> <id>" line per send, ascending by step.
Schedule parse_schedule(std::string_view text);
std::string serialize_schedule(const Schedule& sched);

// Empty result iff inst is well-formed for the given mode. Violations are
// human-readable descriptions, one per offending fact.
std::vector<std::string> validate_instance(const Instance& inst, ValidateMode mode);

// Returns a copy with every deadline (and common_deadline) set to
// max_release + n, the horizon beyond which no schedule can improve.
// Throws std::invalid_argument on an empty instance.
Instance normalize_no_deadline(const Instance& inst);

// Checks window containment, one-send-per-step, per-packet uniqueness, and
// buffer occupancy (a sent packet occupies its buffer from release through
// its send step; at most B_i concurrently). Throws std::invalid_argument on
// a packet id that does not exist in inst.
ThroughputReport verify_schedule(const Instance& inst, const Schedule& sched);

}  // namespace bufsched
