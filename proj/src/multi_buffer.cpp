#include "bufsched/multi_buffer.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <set>
#include <stdexcept>

namespace bufsched {
namespace {

std::vector<const Packet*> sorted_by_arrival(const std::vector<const Packet*>& packets) {
    std::vector<const Packet*> out = packets;
    std::sort(out.begin(), out.end(), [](const Packet* a, const Packet* b) {
        return a->release != b->release ? a->release < b->release : a->id < b->id;
    });
    return out;
}

std::vector<const Packet*> all_packets(const Instance& inst) {
    std::vector<const Packet*> out;
    out.reserve(inst.packets.size());
    for (const Packet& p : inst.packets) out.push_back(&p);
    return out;
}

std::vector<const Packet*> resolve_subset(const Instance& inst, const std::vector<int>& subset,
                                          const char* who) {
    std::vector<int> ids = subset;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<const Packet*> out;
    out.reserve(ids.size());
    for (int want : ids) {
        const Packet* found = nullptr;
        for (const Packet& p : inst.packets)
            if (p.id == want) { found = &p; break; }
        if (!found)
            throw std::invalid_argument(std::string(who) + ": unknown packet id " + std::to_string(want));
        out.push_back(found);
    }
    return out;
}

Step require_common_deadline(const Instance& inst, const char* who) {
    if (!inst.common_deadline)
        throw std::invalid_argument(std::string(who) + ": instance has no common deadline");
    return *inst.common_deadline;
}

// `arrival` must be sorted by (release, id).
ZTable build_z_table(const std::vector<const Packet*>& arrival, int buffer_count,
                     const std::vector<int>& capacities, Step deadline, ZBaseRule rule) {
    ZTable table;
    table.buffers.resize(static_cast<std::size_t>(buffer_count));
    for (const Packet* p : arrival) {
        ZTable::BufferEntry& entry = table.buffers[static_cast<std::size_t>(p->buffer)];
        if (entry.release_times.empty() || entry.release_times.back() != p->release) {
            entry.release_times.push_back(p->release);
            entry.slots.push_back(0);
        }
        entry.slots.back() += 1;  // |P_i(t)| for now; folded below
    }

    for (int i = 0; i < buffer_count; ++i) {
        ZTable::BufferEntry& entry = table.buffers[static_cast<std::size_t>(i)];
        if (entry.release_times.empty()) continue;
        const Step cap = capacities[static_cast<std::size_t>(i)];
        const std::size_t last = entry.slots.size() - 1;
        Step arrivals_at_last = entry.slots[last];
        if (rule == ZBaseRule::clamped) {
            entry.slots[last] = std::min<Step>(cap, arrivals_at_last);
        } else {
            entry.slots[last] = std::max<Step>(arrivals_at_last, deadline - entry.release_times[last]);
        }
        for (std::size_t k = last; k-- > 0;) {
            Step arrivals_here = entry.slots[k];
            Step gap = entry.release_times[k + 1] - entry.release_times[k];
            Step carried = entry.slots[k + 1] + arrivals_here - gap;
            if (rule == ZBaseRule::clamped)
                entry.slots[k] = std::min<Step>(cap, std::max<Step>(arrivals_here, carried));
            else
                entry.slots[k] = std::min<Step>(cap, carried);
        }
    }
    return table;
}

struct ReplayOutcome {
    Schedule schedule;
    std::int64_t delivered = 0;
    std::int64_t dropped = 0;
    std::int64_t leftover = 0;
};

// Per-buffer wave index for due-time queries, aligned with the ZTable entry
// arrays. A buffer with queue q facing waves k = ptr, ptr+1, ... owes, before
// wave k lands,
//     owed_k = q + P(ptr..k) + Z_k - B
// sends, where P(ptr..k) counts the admissible arrivals of the waves in
// between (min(arrivals, B) each: a wave can never seat more than the whole
// buffer). owed_k can exceed what is physically sendable — packets not yet
// released cannot leave early — so it is capped by the achievable sends
// before t~_k, which over release intervals is the staircase
//     ach_k = min over j <= k of (q + P(ptr..j) + (t~_k - t~_j)),
// and the next send is due by
//     due = min over waves with owed_k >= 1 of  max(t~_k - owed_k, t~_k - ach_k),
// never earlier than the current step. With the exclusive absolute prefix
// P_k of admissible arrivals, three static per-wave series answer the query:
//     X_k = P_k + Z_k    (owed_k >= 1  <=>  X_k >= B - q + 1 + P_ptr),
//     Y_k = t~_k - X_k   (t~_k - owed_k = Y_k + P_ptr + B - q),
//     W_k = t~_k - P_k   (t~_k - ach_k = max over j in [ptr, k] of W_j + P_ptr - q).
// X is nondecreasing in k — each Z recurrence arm adds at least the admitted
// arrivals' shortfall (clamp arm: the overflow exceeds the gap; carried arm:
// adds the gap; arrival arm: adds Z_{k+1} >= 0) — so the binding waves form
// a suffix found by binary search. The availability term is a running
// maximum, nondecreasing in k, so the scan over binding waves stops as soon
// as that floor — or the best margin any remaining wave could still offer
// (a suffix minimum over Y) — reaches the best candidate so far.
struct DueIndex {
    std::vector<Step> admit_prefix;   // P_k: admissible arrivals before wave k (size waves+1)
    std::vector<Step> pressure;       // X_k, nondecreasing
    std::vector<Step> margin;         // Y_k
    std::vector<Step> margin_suffix;  // min over j >= k of Y_j
    std::vector<Step> stock;          // W_k
};

std::vector<DueIndex> build_due_index(const std::vector<const Packet*>& arrival, const ZTable& z,
                                      const std::vector<int>& capacities) {
    std::vector<DueIndex> out(z.buffers.size());
    std::vector<std::vector<Step>> raw(z.buffers.size());
    for (std::size_t i = 0; i < z.buffers.size(); ++i)
        raw[i].assign(z.buffers[i].release_times.size(), 0);
    std::vector<std::size_t> cursor(z.buffers.size(), 0);
    for (const Packet* p : arrival) {
        const std::size_t b = static_cast<std::size_t>(p->buffer);
        std::size_t& k = cursor[b];
        while (z.buffers[b].release_times[k] != p->release) ++k;
        raw[b][k] += 1;
    }
    for (std::size_t i = 0; i < z.buffers.size(); ++i) {
        const ZTable::BufferEntry& entry = z.buffers[i];
        const std::size_t waves = entry.release_times.size();
        const Step cap = capacities[i];
        DueIndex& di = out[i];
        di.admit_prefix.resize(waves + 1, 0);
        di.pressure.resize(waves);
        di.margin.resize(waves);
        di.margin_suffix.resize(waves);
        di.stock.resize(waves);
        for (std::size_t k = 0; k < waves; ++k) {
            di.admit_prefix[k + 1] = di.admit_prefix[k] + std::min<Step>(raw[i][k], cap);
            di.pressure[k] = di.admit_prefix[k] + entry.slots[k];
            di.margin[k] = entry.release_times[k] - di.pressure[k];
            di.stock[k] = entry.release_times[k] - di.admit_prefix[k];
        }
        for (std::size_t k = waves; k-- > 0;)
            di.margin_suffix[k] =
                k + 1 < waves ? std::min(di.margin[k], di.margin_suffix[k + 1]) : di.margin[k];
    }
    return out;
}

// Core tight-schedule replay over exactly `packets`.
ReplayOutcome ts_replay(const Instance& inst, const std::vector<const Packet*>& packets_in,
                        Step deadline, const TsOptions& options, TsTrace* trace) {
    const int m = inst.buffer_count();
    std::vector<const Packet*> arrival = sorted_by_arrival(packets_in);
    ZTable z = build_z_table(arrival, m, inst.capacities, deadline, options.z_base);
    std::vector<DueIndex> dues = build_due_index(arrival, z, inst.capacities);

    std::vector<std::set<int>> queues(static_cast<std::size_t>(m));
    std::vector<std::size_t> zptr(static_cast<std::size_t>(m), 0);  // first release > t
    ReplayOutcome out;

    std::size_t next = 0;
    Step t = 0;
    int last_served = -1;
    while (t < deadline) {
        bool any = false;
        for (const auto& q : queues)
            if (!q.empty()) { any = true; break; }
        if (!any) {
            if (next == arrival.size()) break;
            if (arrival[next]->release > t) t = arrival[next]->release;
        }

        while (next < arrival.size() && arrival[next]->release == t) {
            const Packet* p = arrival[next];
            ++next;
            std::set<int>& q = queues[static_cast<std::size_t>(p->buffer)];
            if (static_cast<int>(q.size()) >= inst.capacities[static_cast<std::size_t>(p->buffer)]) {
                ++out.dropped;
                if (trace) trace->drops.push_back({t, p->id});
            } else {
                q.insert(p->id);
            }
        }

        int serve = -1;
        TsStepRecord rec;
        if (options.tightness == TightnessRule::horizon_adjusted) {
            // Earliest-deadline-first over per-buffer send deadlines: each
            // non-empty buffer's next send is due by the earliest binding
            // wave constraint (see DueIndex above), or only at the horizon
            // when no future wave binds — a wave that merely fits behind the
            // current queue owes nothing, and treating it as pressure would
            // let an idle-safe buffer outrank one that must send now. A
            // boolean per-buffer test cannot order several buffers whose
            // joint demand exceeds the steps remaining, so the due times
            // themselves decide. Ties keep the last-served buffer, then the
            // lowest index.
            Step best_due = 0;
            for (int i = 0; i < m; ++i) {
                const ZTable::BufferEntry& entry = z.buffers[static_cast<std::size_t>(i)];
                const DueIndex& di = dues[static_cast<std::size_t>(i)];
                std::size_t& ptr = zptr[static_cast<std::size_t>(i)];
                while (ptr < entry.release_times.size() && entry.release_times[ptr] <= t) ++ptr;
                Step q_len = static_cast<Step>(queues[static_cast<std::size_t>(i)].size());
                if (q_len == 0) continue;
                Step due = deadline;
                if (ptr < entry.release_times.size()) {
                    const Step base = di.admit_prefix[ptr];
                    const Step slack =
                        inst.capacities[static_cast<std::size_t>(i)] - q_len + base;
                    auto lo = std::lower_bound(di.pressure.begin() + static_cast<std::ptrdiff_t>(ptr),
                                               di.pressure.end(), slack + 1);
                    if (lo != di.pressure.end()) {
                        const std::size_t first = static_cast<std::size_t>(lo - di.pressure.begin());
                        Step best = deadline;
                        Step floor = std::numeric_limits<Step>::min();
                        for (std::size_t k = ptr; k < entry.release_times.size(); ++k) {
                            floor = std::max(floor, di.stock[k] + base - q_len);
                            if (k < first) continue;
                            if (floor >= best || di.margin_suffix[k] + slack >= best) break;
                            best = std::min(best, std::max(di.margin[k] + slack, floor));
                        }
                        due = std::max(t, std::min(deadline, best));
                        if (trace) rec.tight.push_back(i);
                    }
                }
                if (serve < 0 || due < best_due || (due == best_due && i == last_served)) {
                    serve = i;
                    best_due = due;
                }
            }
        } else {
            for (int i = 0; i < m; ++i) {
                const ZTable::BufferEntry& entry = z.buffers[static_cast<std::size_t>(i)];
                std::size_t& ptr = zptr[static_cast<std::size_t>(i)];
                while (ptr < entry.release_times.size() && entry.release_times[ptr] <= t) ++ptr;
                Step q_len = static_cast<Step>(queues[static_cast<std::size_t>(i)].size());
                Step z_next = ptr < entry.release_times.size() ? entry.slots[ptr] : 0;
                if (q_len > 0 && z_next + q_len >= inst.capacities[static_cast<std::size_t>(i)]) {
                    if (serve < 0) serve = i;
                    if (trace) rec.tight.push_back(i);
                }
            }
            if (serve < 0) {
                if (last_served >= 0 && !queues[static_cast<std::size_t>(last_served)].empty())
                    serve = last_served;
                else
                    for (int i = 0; i < m; ++i)
                        if (!queues[static_cast<std::size_t>(i)].empty()) { serve = i; break; }
            }
        }

        if (serve >= 0) {
            std::set<int>& q = queues[static_cast<std::size_t>(serve)];
            int id = *q.begin();
            q.erase(q.begin());
            out.schedule.sends.push_back({t, id});
            ++out.delivered;
            last_served = serve;
            if (trace) {
                rec.step = t;
                rec.served_buffer = serve;
                rec.sent_id = id;
                trace->steps.push_back(std::move(rec));
            }
        }
        ++t;
    }

    for (const auto& q : queues) out.leftover += static_cast<std::int64_t>(q.size());
    return out;
}

}  // namespace

std::optional<Step> ZTable::slots_at(int buffer, Step release) const {
    if (buffer < 0 || buffer >= static_cast<int>(buffers.size())) return std::nullopt;
    const BufferEntry& entry = buffers[static_cast<std::size_t>(buffer)];
    auto it = std::lower_bound(entry.release_times.begin(), entry.release_times.end(), release);
    if (it == entry.release_times.end() || *it != release) return std::nullopt;
    return entry.slots[static_cast<std::size_t>(it - entry.release_times.begin())];
}

ZTable compute_z_table(const Instance& inst, ZBaseRule rule) {
    if (inst.packets.empty()) {
        ZTable t;
        t.buffers.resize(static_cast<std::size_t>(inst.buffer_count()));
        return t;
    }
    Step d = require_common_deadline(inst, "compute_z_table");
    return build_z_table(sorted_by_arrival(all_packets(inst)), inst.buffer_count(), inst.capacities,
                         d, rule);
}

ZTable compute_z_table(const Instance& inst, const std::vector<int>& subset, ZBaseRule rule) {
    std::vector<const Packet*> chosen = resolve_subset(inst, subset, "compute_z_table");
    if (chosen.empty()) {
        ZTable t;
        t.buffers.resize(static_cast<std::size_t>(inst.buffer_count()));
        return t;
    }
    Step d = require_common_deadline(inst, "compute_z_table");
    return build_z_table(sorted_by_arrival(chosen), inst.buffer_count(), inst.capacities, d, rule);
}

Schedule ts_schedule(const Instance& inst) { return ts_schedule(inst, TsOptions{}, nullptr); }

Schedule ts_schedule(const Instance& inst, const TsOptions& options, TsTrace* trace) {
    if (inst.packets.empty()) return {};
    for (ValidateMode mode : {ValidateMode::common_deadline, ValidateMode::per_release_fit}) {
        std::vector<std::string> violations = validate_instance(inst, mode);
        if (!violations.empty())
            throw std::invalid_argument("ts_schedule: " + violations.front());
    }
    Step d = require_common_deadline(inst, "ts_schedule");
    return ts_replay(inst, all_packets(inst), d, options, trace).schedule;
}

bool ts_feasible(const Instance& inst, const std::vector<int>& subset) {
    return ts_feasible(inst, subset, TsOptions{});
}

bool ts_feasible(const Instance& inst, const std::vector<int>& subset, const TsOptions& options) {
    std::vector<const Packet*> chosen = resolve_subset(inst, subset, "ts_feasible");
    if (chosen.empty()) return true;
    Step d = require_common_deadline(inst, "ts_feasible");
    ReplayOutcome out = ts_replay(inst, chosen, d, options, nullptr);
    return out.dropped == 0 && out.leftover == 0;
}

GreedyResult greedy_ts(const Instance& inst) { return greedy_ts(inst, TsOptions{}); }

GreedyResult greedy_ts(const Instance& inst, const TsOptions& options) {
    GreedyResult result;
    if (inst.packets.empty()) return result;
    Step d = require_common_deadline(inst, "greedy_ts");

    std::vector<const Packet*> order = all_packets(inst);
    std::sort(order.begin(), order.end(), [](const Packet* a, const Packet* b) {
        return a->value != b->value ? a->value > b->value : a->id < b->id;
    });

    std::vector<const Packet*> selected;
    std::vector<const Packet*> probe;
    for (const Packet* cand : order) {
        probe = selected;
        probe.push_back(cand);
        ReplayOutcome out = ts_replay(inst, probe, d, options, nullptr);
        if (out.dropped == 0 && out.leftover == 0) {
            selected.swap(probe);
            result.total_value += cand->value;
        }
    }

    ReplayOutcome final_run = ts_replay(inst, selected, d, options, nullptr);
    assert(final_run.dropped == 0 && final_run.leftover == 0);
    result.schedule = std::move(final_run.schedule);
    for (const Packet* p : selected) result.selected.push_back(p->id);
    std::sort(result.selected.begin(), result.selected.end());
    return result;
}

}  // namespace bufsched
