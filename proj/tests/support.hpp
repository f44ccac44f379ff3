#pragma once
// Shared helpers for the unit and acceptance suites: naive reference
// implementations (deliberately simple and slow) plus instance enumerators.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bufsched/core.hpp"

namespace testsup {

struct NaiveReport {
    std::int64_t delivered_count = 0;
    bufsched::Value delivered_value = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Literal O(n * T) occupancy replay, written independently of verify_schedule.
NaiveReport naive_verify(const bufsched::Instance& inst, const bufsched::Schedule& sched);

// Linear-scan version of DeadlineQueue with the same settling contract.
class NaiveDeadlineQueue {
public:
    explicit NaiveDeadlineQueue(int capacity) : capacity_(capacity) {}
    std::vector<int> insert(const bufsched::Packet& p, bufsched::Step now);
    std::optional<int> pop_earliest(bufsched::Step now);
    int size() const { return static_cast<int>(entries_.size()); }
    const std::vector<std::pair<bufsched::Step, int>>& entries() const { return entries_; }

private:
    std::vector<std::pair<bufsched::Step, int>> entries_;  // (deadline, id) ascending
    int capacity_;
};

// First-come-first-served pass for one buffer: arrivals queue in (release, id)
// order; expired entries and capacity overflow both shed from the head of the
// queue, so the oldest admission gives way and service order stays FIFO.
bufsched::Schedule fifo_schedule(const bufsched::Instance& inst);

// Serve-the-largest-queue heuristic for common-deadline instances (ties:
// lowest buffer index; smallest id within the buffer). Deliberately myopic.
bufsched::Schedule largest_queue_schedule(const bufsched::Instance& inst);

// Exhaustive feasibility with no pruning at all: every resident of every
// buffer is a candidate send each step. Exponential; keep n and horizon tiny.
bool unpruned_feasible(const bufsched::Instance& inst, const std::vector<int>& subset);

// All single-buffer instances with exactly n packets whose windows satisfy
// 0 <= release < deadline <= horizon, as multisets (ids in window order).
template <typename Fn>
void for_each_window_multiset(int capacity, bufsched::Step horizon, int n, Fn&& fn) {
    std::vector<std::pair<bufsched::Step, bufsched::Step>> windows;
    for (bufsched::Step r = 0; r < horizon; ++r)
        for (bufsched::Step d = r + 1; d <= horizon; ++d) windows.push_back({r, d});

    std::vector<int> pick;
    auto rec = [&](auto&& self, int k, int min_w) -> void {
        if (k == n) {
            bufsched::Instance inst;
            inst.capacities = {capacity};
            for (int j = 0; j < n; ++j) {
                auto [r, d] = windows[static_cast<std::size_t>(pick[static_cast<std::size_t>(j)])];
                inst.packets.push_back({j, r, d, 1, 0});
            }
            bufsched::refresh_common_deadline(inst);
            fn(inst);
            return;
        }
        for (int w = min_w; w < static_cast<int>(windows.size()); ++w) {
            pick.push_back(w);
            self(self, k + 1, w);
            pick.pop_back();
        }
    };
    rec(rec, 0, 0);
}

// All common-deadline instances with the given capacities, deadline D and
// exactly n packets, as (buffer, release) multisets honoring the
// per-release-fit assumption. Ids in (release, buffer) order of choice.
template <typename Fn>
void for_each_fit_multiset(const std::vector<int>& capacities, bufsched::Step deadline, int n,
                           Fn&& fn) {
    const int m = static_cast<int>(capacities.size());
    std::vector<std::pair<int, bufsched::Step>> acc;
    std::vector<std::vector<int>> load(static_cast<std::size_t>(m),
                                       std::vector<int>(static_cast<std::size_t>(deadline), 0));
    auto rec = [&](auto&& self, int k, int min_slot) -> void {
        if (k == n) {
            bufsched::Instance inst;
            inst.capacities = capacities;
            int id = 0;
            for (auto [b, r] : acc) inst.packets.push_back({id++, r, deadline, 1, b});
            bufsched::refresh_common_deadline(inst);
            fn(inst);
            return;
        }
        for (int slot = min_slot; slot < m * static_cast<int>(deadline); ++slot) {
            int b = slot / static_cast<int>(deadline);
            bufsched::Step r = slot % static_cast<int>(deadline);
            auto& cell = load[static_cast<std::size_t>(b)][static_cast<std::size_t>(r)];
            if (cell >= capacities[static_cast<std::size_t>(b)]) continue;
            ++cell;
            acc.push_back({b, r});
            self(self, k + 1, slot);
            acc.pop_back();
            --cell;
        }
    };
    rec(rec, 0, 0);
}

}  // namespace testsup
