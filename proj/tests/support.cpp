#include "support.hpp"

#include <map>
#include <set>

namespace testsup {

using bufsched::Instance;
using bufsched::Packet;
using bufsched::Schedule;
using bufsched::Send;
using bufsched::Step;

NaiveReport naive_verify(const Instance& inst, const Schedule& sched) {
    NaiveReport report;
    std::map<int, const Packet*> by_id;
    for (const Packet& p : inst.packets) by_id[p.id] = &p;

    std::map<int, Step> sent_at;  // id -> step
    std::map<Step, int> step_count;
    for (const Send& s : sched.sends) {
        auto it = by_id.find(s.packet_id);
        if (it == by_id.end()) {
            report.violations.push_back("unknown id");
            continue;
        }
        if (sent_at.count(s.packet_id)) report.violations.push_back("packet sent twice");
        if (step_count.count(s.step)) report.violations.push_back("two sends in one step");
        sent_at[s.packet_id] = s.step;
        step_count[s.step] = 1;
        const Packet* p = it->second;
        if (s.step < p->release || s.step >= p->deadline)
            report.violations.push_back("send outside window");
    }

    Step max_t = 0;
    for (const Packet& p : inst.packets) max_t = std::max(max_t, p.deadline);
    for (Step t = 0; t <= max_t; ++t) {
        for (int b = 0; b < inst.buffer_count(); ++b) {
            int resident = 0;
            for (const Packet& p : inst.packets) {
                auto it = sent_at.find(p.id);
                if (it == sent_at.end()) continue;  // dropped at arrival
                if (p.buffer == b && p.release <= t && t <= it->second) ++resident;
            }
            if (resident > inst.capacities[static_cast<std::size_t>(b)]) {
                report.violations.push_back("overfull buffer");
                t = max_t;  // one report per run is enough for the cross-check
                break;
            }
        }
    }

    for (const auto& [id, step] : sent_at) {
        (void)step;
        report.delivered_count += 1;
        report.delivered_value += by_id[id]->value;
    }
    return report;
}

std::vector<int> NaiveDeadlineQueue::insert(const Packet& p, Step now) {
    entries_.push_back({p.deadline, p.id});
    std::sort(entries_.begin(), entries_.end());
    std::vector<int> evicted;
    while (true) {
        bool tight = static_cast<int>(entries_.size()) > capacity_;
        for (std::size_t k = 0; !tight && k < entries_.size(); ++k)
            if (entries_[k].first - static_cast<Step>(k + 1) < now) tight = true;
        if (!tight) break;
        Step dmin = entries_.front().first;
        std::size_t victim = 0;
        for (std::size_t k = 0; k < entries_.size() && entries_[k].first == dmin; ++k) victim = k;
        evicted.push_back(entries_[victim].second);
        entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(victim));
    }
    return evicted;
}

std::optional<int> NaiveDeadlineQueue::pop_earliest(Step now) {
    (void)now;
    if (entries_.empty()) return std::nullopt;
    int id = entries_.front().second;
    entries_.erase(entries_.begin());
    return id;
}

Schedule fifo_schedule(const Instance& inst) {
    std::vector<const Packet*> arrival;
    for (const Packet& p : inst.packets) arrival.push_back(&p);
    std::sort(arrival.begin(), arrival.end(), [](const Packet* a, const Packet* b) {
        return a->release != b->release ? a->release < b->release : a->id < b->id;
    });

    Schedule out;
    std::vector<const Packet*> queue;
    const int cap = inst.capacities.empty() ? 0 : inst.capacities[0];
    std::size_t next = 0;
    Step t = 0;
    while (true) {
        if (queue.empty()) {
            if (next == arrival.size()) break;
            t = std::max(t, arrival[next]->release);
        }
        while (next < arrival.size() && arrival[next]->release == t) {
            queue.push_back(arrival[next]);
            ++next;
        }
        // Shed from the head: an expired packet can never be sent, and on
        // overflow the head is the oldest admission — under monotone deadlines
        // also the earliest deadline, the drop that costs the fewest future
        // sends.
        while (!queue.empty() &&
               (queue.front()->deadline <= t || static_cast<int>(queue.size()) > cap))
            queue.erase(queue.begin());
        if (!queue.empty()) {
            out.sends.push_back({t, queue.front()->id});
            queue.erase(queue.begin());
        }
        ++t;
    }
    return out;
}

Schedule largest_queue_schedule(const Instance& inst) {
    std::vector<const Packet*> arrival;
    for (const Packet& p : inst.packets) arrival.push_back(&p);
    std::sort(arrival.begin(), arrival.end(), [](const Packet* a, const Packet* b) {
        return a->release != b->release ? a->release < b->release : a->id < b->id;
    });
    Step deadline = 0;
    for (const Packet& p : inst.packets) deadline = std::max(deadline, p.deadline);

    std::vector<std::set<int>> queues(static_cast<std::size_t>(inst.buffer_count()));
    Schedule out;
    std::size_t next = 0;
    for (Step t = 0; t < deadline; ++t) {
        while (next < arrival.size() && arrival[next]->release == t) {
            const Packet* p = arrival[next];
            ++next;
            auto& q = queues[static_cast<std::size_t>(p->buffer)];
            if (static_cast<int>(q.size()) < inst.capacities[static_cast<std::size_t>(p->buffer)])
                q.insert(p->id);
        }
        int serve = -1;
        std::size_t best = 0;
        for (int i = 0; i < inst.buffer_count(); ++i)
            if (queues[static_cast<std::size_t>(i)].size() > best) {
                best = queues[static_cast<std::size_t>(i)].size();
                serve = i;
            }
        if (serve >= 0) {
            auto& q = queues[static_cast<std::size_t>(serve)];
            out.sends.push_back({t, *q.begin()});
            q.erase(q.begin());
        }
    }
    return out;
}

namespace {

bool unpruned_dfs(const std::vector<const Packet*>& chosen, const Instance& inst, Step t,
                  std::set<int>& unsent) {
    if (unsent.empty()) return true;
    Step horizon = 0;
    for (const Packet* p : chosen) horizon = std::max(horizon, p->deadline);
    if (t >= horizon) return false;

    // occupancy check at t: every unsent packet released by t is resident
    for (int b = 0; b < inst.buffer_count(); ++b) {
        int resident = 0;
        for (const Packet* p : chosen)
            if (unsent.count(p->id) && p->buffer == b && p->release <= t) ++resident;
        if (resident > inst.capacities[static_cast<std::size_t>(b)]) return false;
    }
    for (const Packet* p : chosen)
        if (unsent.count(p->id) && p->deadline <= t) return false;

    // idle is pointless but harmless to include; try every resident send
    for (const Packet* p : chosen) {
        if (!unsent.count(p->id) || p->release > t) continue;
        unsent.erase(p->id);
        bool ok = unpruned_dfs(chosen, inst, t + 1, unsent);
        unsent.insert(p->id);
        if (ok) return true;
    }
    return unpruned_dfs(chosen, inst, t + 1, unsent);
}

}  // namespace

bool unpruned_feasible(const Instance& inst, const std::vector<int>& subset) {
    std::vector<const Packet*> chosen;
    std::set<int> unsent;
    for (int id : subset) {
        for (const Packet& p : inst.packets)
            if (p.id == id) {
                if (!unsent.count(id)) chosen.push_back(&p);
                unsent.insert(id);
                break;
            }
    }
    return unpruned_dfs(chosen, inst, 0, unsent);
}

}  // namespace testsup
