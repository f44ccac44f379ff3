#include "bufsched/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <numeric>
#include <stdexcept>

namespace bufsched {
namespace {

// Search context over up to 16 packets mapped to bit positions (ascending id,
// so "smaller bit" == "smaller id").
struct FeasSim {
    const Instance* inst = nullptr;
    int bits = 0;
    Step horizon = 0;
    std::vector<Step> release, deadline;
    std::vector<int> buffer, id;
    std::vector<std::uint32_t> buffer_mask;            // per buffer
    std::vector<std::pair<Step, std::uint32_t>> arrivals;  // (step, mask), ascending

    // Visited-and-failed states for the current probe, epoch-stamped so one
    // allocation serves every subset test.
    std::vector<std::uint32_t> seen;
    std::uint32_t epoch = 0;
    std::uint64_t explored = 0;

    std::uint32_t probe_mask = 0;  // subset under test
    std::vector<Send> path;

    void build(const Instance& instance, const std::vector<const Packet*>& chosen) {
        inst = &instance;
        bits = static_cast<int>(chosen.size());
        release.resize(chosen.size());
        deadline.resize(chosen.size());
        buffer.resize(chosen.size());
        id.resize(chosen.size());
        buffer_mask.assign(instance.capacities.size(), 0);
        horizon = 0;
        for (int b = 0; b < bits; ++b) {
            const Packet& p = *chosen[static_cast<std::size_t>(b)];
            release[static_cast<std::size_t>(b)] = p.release;
            deadline[static_cast<std::size_t>(b)] = p.deadline;
            buffer[static_cast<std::size_t>(b)] = p.buffer;
            id[static_cast<std::size_t>(b)] = p.id;
            buffer_mask[static_cast<std::size_t>(p.buffer)] |= 1u << b;
            horizon = std::max(horizon, p.deadline);
        }
        arrivals.clear();
        std::vector<int> order(chosen.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b2) {
            return release[static_cast<std::size_t>(a)] < release[static_cast<std::size_t>(b2)];
        });
        for (int b : order) {
            Step r = release[static_cast<std::size_t>(b)];
            if (arrivals.empty() || arrivals.back().first != r) arrivals.push_back({r, 0});
            arrivals.back().second |= 1u << b;
        }
        if (instance.buffer_count() > 1)
            seen.assign((static_cast<std::size_t>(horizon) + 2) << bits, 0);
        epoch = 0;
    }

    bool capacity_ok(std::uint32_t resident) const {
        for (std::size_t bb = 0; bb < buffer_mask.size(); ++bb) {
            std::uint32_t in_buf = resident & buffer_mask[bb];
            if (in_buf && std::popcount(in_buf) > inst->capacities[bb]) return false;
        }
        return true;
    }

    int edf_victim(std::uint32_t in_buf) const {
        int best = -1;
        for (std::uint32_t rest = in_buf; rest;) {
            int b = std::countr_zero(rest);
            rest &= rest - 1;
            if (best < 0 || deadline[static_cast<std::size_t>(b)] < deadline[static_cast<std::size_t>(best)])
                best = b;
        }
        return best;  // ties resolve to the lowest bit = smallest id
    }

    // Restriction of arrival groups to probe_mask, indexed by position.
    std::uint32_t group_mask(std::size_t idx) const { return arrivals[idx].second & probe_mask; }

    bool dfs(Step t, std::uint32_t resident, std::size_t next_arrival) {
        ++explored;
        if (resident == 0) {
            while (next_arrival < arrivals.size() && group_mask(next_arrival) == 0) ++next_arrival;
            if (next_arrival == arrivals.size()) return true;
            // Idle gap: jump straight to the next arrival of the subset.
            Step tn = arrivals[next_arrival].first;
            std::uint32_t merged = group_mask(next_arrival);
            if (!capacity_ok(merged)) return false;
            return dfs(tn, merged, next_arrival + 1);
        }

        for (std::uint32_t rest = resident; rest;) {
            int b = std::countr_zero(rest);
            rest &= rest - 1;
            if (deadline[static_cast<std::size_t>(b)] <= t) return false;  // expired unsent
        }

        if (!seen.empty()) {
            std::size_t key = (static_cast<std::size_t>(t) << bits) | resident;
            if (seen[key] == epoch) return false;
        }

        std::uint32_t next_grp = 0;
        std::size_t na = next_arrival;
        if (na < arrivals.size() && arrivals[na].first == t + 1) {
            next_grp = group_mask(na);
            ++na;
        }

        for (std::size_t bb = 0; bb < buffer_mask.size(); ++bb) {
            std::uint32_t in_buf = resident & buffer_mask[bb];
            if (!in_buf) continue;
            int victim = edf_victim(in_buf);
            std::uint32_t next = (resident & ~(1u << victim)) | next_grp;
            if (!capacity_ok(next)) continue;
            path.push_back({t, id[static_cast<std::size_t>(victim)]});
            if (dfs(t + 1, next, na)) return true;
            path.pop_back();
        }

        if (!seen.empty()) {
            std::size_t key = (static_cast<std::size_t>(t) << bits) | resident;
            seen[key] = epoch;
        }
        return false;
    }

    bool feasible(std::uint32_t mask, Schedule* out) {
        probe_mask = mask;
        path.clear();
        ++epoch;
        if (epoch == 0) {  // wrapped; reset stamps
            std::fill(seen.begin(), seen.end(), 0);
            epoch = 1;
        }
        bool ok = dfs(0, 0, 0);
        if (ok && out) out->sends = path;
        return ok;
    }
};

std::vector<const Packet*> packets_by_id(const Instance& inst) {
    std::vector<const Packet*> out;
    out.reserve(inst.packets.size());
    for (const Packet& p : inst.packets) out.push_back(&p);
    std::sort(out.begin(), out.end(), [](const Packet* a, const Packet* b) { return a->id < b->id; });
    return out;
}

}  // namespace

bool oracle_feasible(const Instance& inst, const std::vector<int>& subset) {
    std::vector<int> ids = subset;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (static_cast<int>(ids.size()) > kOracleMaxPackets)
        throw std::invalid_argument("oracle_feasible: subset larger than 16 packets");

    std::vector<const Packet*> chosen;
    chosen.reserve(ids.size());
    for (int want : ids) {
        const Packet* found = nullptr;
        for (const Packet& p : inst.packets)
            if (p.id == want) { found = &p; break; }
        if (!found)
            throw std::invalid_argument("oracle_feasible: unknown packet id " + std::to_string(want));
        if (found->deadline > kOracleMaxHorizon)
            throw std::invalid_argument("oracle_feasible: subset horizon exceeds 16");
        chosen.push_back(found);
    }

    FeasSim sim;
    sim.build(inst, chosen);
    std::uint32_t all = sim.bits == 32 ? ~0u : (1u << sim.bits) - 1;
    return sim.feasible(all, nullptr);
}

OracleResult oracle_optimal(const Instance& inst) {
    const int n = inst.packet_count();
    if (n > kOracleMaxPackets)
        throw std::invalid_argument("oracle_optimal: more than 16 packets");
    if (inst.horizon() > kOracleMaxHorizon)
        throw std::invalid_argument("oracle_optimal: horizon exceeds 16");

    OracleResult result;
    if (n == 0) return result;

    std::vector<const Packet*> chosen = packets_by_id(inst);
    FeasSim sim;
    sim.build(inst, chosen);

    // Decision order: value desc, id asc (bit order equals id order).
    std::vector<int> ord(static_cast<std::size_t>(n));
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](int a, int b) {
        const Packet& pa = *chosen[static_cast<std::size_t>(a)];
        const Packet& pb = *chosen[static_cast<std::size_t>(b)];
        return pa.value != pb.value ? pa.value > pb.value : pa.id < pb.id;
    });

    Value best = -1;
    std::uint32_t best_mask = 0;
    std::uint64_t nodes = 0;

    // Include-first DFS; prune when even taking every undecided packet cannot
    // beat the incumbent. First optimum found is kept, which realizes the
    // canonical tie-break.
    auto walk = [&](auto&& self, int k, std::uint32_t mask, Value have, Value remaining) -> void {
        ++nodes;
        if (best >= 0 && have + remaining <= best) return;
        if (k == n) {
            if (have > best) {
                best = have;
                best_mask = mask;
            }
            return;
        }
        int bit = ord[static_cast<std::size_t>(k)];
        Value v = chosen[static_cast<std::size_t>(bit)]->value;
        std::uint32_t with = mask | (1u << bit);
        if (sim.feasible(with, nullptr)) self(self, k + 1, with, have + v, remaining - v);
        self(self, k + 1, mask, have, remaining - v);
    };

    Value total = 0;
    for (const Packet* p : chosen) total += p->value;
    walk(walk, 0, 0, 0, total);

    result.optimal_value = best;
    for (int b = 0; b < n; ++b)
        if (best_mask & (1u << b)) result.witness_set.push_back(chosen[static_cast<std::size_t>(b)]->id);
    if (best_mask) {
        bool ok = sim.feasible(best_mask, &result.witness_schedule);
        assert(ok);
        (void)ok;
    }
    result.explored = nodes + sim.explored;
    return result;
}

}  // namespace bufsched
