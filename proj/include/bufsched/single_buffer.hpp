#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bufsched/core.hpp"

namespace bufsched {

namespace detail {
struct DqNode;
}

// Deadline-ordered bounded queue with the settling rule used by dos_schedule:
// after an insert, earliest-deadline entries are evicted while the queue is
// over capacity or some deadline prefix is over-subscribed (more than d - now
// entries with deadline <= d). Entries are (deadline, id) ordered ascending.
// Implemented as an order-augmented treap keeping, per subtree, the minimum
// of (deadline - rank), so the over-subscription test and both removal kinds
// run in O(log size).
class DeadlineQueue {
public:
    explicit DeadlineQueue(int capacity);
    ~DeadlineQueue();
    DeadlineQueue(DeadlineQueue&& other) noexcept;
    DeadlineQueue& operator=(DeadlineQueue&& other) noexcept;
    DeadlineQueue(const DeadlineQueue&) = delete;
    DeadlineQueue& operator=(const DeadlineQueue&) = delete;

    // Adds (p.deadline, p.id), then settles; returns evicted ids in eviction
    // order. Among earliest-deadline entries the largest id goes first.
    // Requires p.release <= now < p.deadline.
    std::vector<int> insert(const Packet& p, Step now);

    // Removes and returns the earliest-deadline entry, ties to the smallest
    // id; nullopt when empty. A settled queue never holds an entry with
    // deadline <= now, so the result is always sendable at `now`.
    std::optional<int> pop_earliest(Step now);

    int size() const;
    bool empty() const { return size() == 0; }
    int capacity() const { return capacity_; }

    // In-order traversal of (deadline, id); instrumentation and tests.
    void visit(const std::function<void(Step, int)>& fn) const;

private:
    detail::DqNode* root_ = nullptr;
    int capacity_ = 0;
    std::uint64_t rng_state_ = 0;

    void settle(Step now, std::vector<int>& evicted);
};

// Pre-send snapshot of the queue at one step of a DOS run.
struct DosStepRecord {
    Step step = 0;
    std::vector<std::pair<Step, int>> queue;  // (deadline, id) ascending
};

struct DosTrace {
    std::vector<DosStepRecord> steps;
};

// Replays arrivals through a DeadlineQueue (values ignored), sending the
// earliest-deadline entry at every step while the queue is non-empty.
// Arrivals at one step are inserted in ascending id order before the step's
// send. Optimal delivered count for single-buffer instances.
// Requires a single-buffer instance; throws std::invalid_argument otherwise.
Schedule dos_schedule(const Instance& inst);
Schedule dos_schedule(const Instance& inst, DosTrace* trace);

// True iff every packet of `subset` (ids) can be delivered. Simulates EDF:
// arrivals in (release, id) order, overflow on arrival or an expired resident
// means infeasible. Single-buffer instances only.
bool edf_feasible(const Instance& inst, const std::vector<int>& subset);

struct GreedyResult {
    std::vector<int> selected;  // packet ids, ascending
    Schedule schedule;
    Value total_value = 0;
};

// Maximum-value deliverable subset for single-buffer instances. A subset is
// deliverable iff it never overflows a non-idling sender's backlog and EDF
// meets all its deadlines; both conditions are interval matchings (distinct
// queue tokens from [r - B + 1, r], distinct send steps from [r, d - 1]), so
// the optimum is found as a minimum-cost unit flow via successive shortest
// augmenting paths. Among equal-value optima the selection deterministically
// prefers later-deadline packets, then smaller ids. The schedule is the EDF
// replay of the selection. O(n^2 log n) worst case, exact.
GreedyResult greedy_edf(const Instance& inst);

}  // namespace bufsched
