#include "bufsched/single_buffer.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace bufsched {
namespace {

constexpr Step kInf = std::numeric_limits<Step>::max() / 4;

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

namespace detail {

struct DqNode {
    Step deadline;
    int id;
    std::uint64_t prio;
    int size;
    Step aug;  // min of (deadline - rank) within this subtree, rank local
    DqNode* l;
    DqNode* r;
};

}  // namespace detail

namespace {

using Node = detail::DqNode;

int sz(const Node* t) { return t ? t->size : 0; }

void pull(Node* t) {
    int left = sz(t->l);
    t->size = left + 1 + sz(t->r);
    Step aug = t->deadline - (left + 1);
    if (t->l && t->l->aug < aug) aug = t->l->aug;
    if (t->r && t->r->aug - (left + 1) < aug) aug = t->r->aug - (left + 1);
    t->aug = aug;
}

bool key_less(const Node* a, Step deadline, int id) {
    return a->deadline != deadline ? a->deadline < deadline : a->id < id;
}

// a keeps keys < (deadline, id), b the rest.
void split_key(Node* t, Step deadline, int id, Node*& a, Node*& b) {
    if (!t) {
        a = b = nullptr;
        return;
    }
    if (key_less(t, deadline, id)) {
        split_key(t->r, deadline, id, t->r, b);
        a = t;
        pull(a);
    } else {
        split_key(t->l, deadline, id, a, t->l);
        b = t;
        pull(b);
    }
}

// a keeps the first k entries.
void split_rank(Node* t, int k, Node*& a, Node*& b) {
    if (!t) {
        a = b = nullptr;
        return;
    }
    if (sz(t->l) < k) {
        split_rank(t->r, k - sz(t->l) - 1, t->r, b);
        a = t;
        pull(a);
    } else {
        split_rank(t->l, k, a, t->l);
        b = t;
        pull(b);
    }
}

Node* merge(Node* a, Node* b) {
    if (!a) return b;
    if (!b) return a;
    if (a->prio >= b->prio) {
        a->r = merge(a->r, b);
        pull(a);
        return a;
    }
    b->l = merge(a, b->l);
    pull(b);
    return b;
}

int count_le_deadline(const Node* t, Step deadline) {
    int count = 0;
    while (t) {
        if (t->deadline <= deadline) {
            count += sz(t->l) + 1;
            t = t->r;
        } else {
            t = t->l;
        }
    }
    return count;
}

const Node* leftmost(const Node* t) {
    while (t->l) t = t->l;
    return t;
}

void free_tree(Node* t) {
    if (!t) return;
    free_tree(t->l);
    free_tree(t->r);
    delete t;
}

void visit_inorder(const Node* t, const std::function<void(Step, int)>& fn) {
    if (!t) return;
    visit_inorder(t->l, fn);
    fn(t->deadline, t->id);
    visit_inorder(t->r, fn);
}

}  // namespace

DeadlineQueue::DeadlineQueue(int capacity) : capacity_(capacity), rng_state_(0x6b756673636865ull) {
    if (capacity < 1) throw std::invalid_argument("DeadlineQueue: capacity must be at least 1");
}

DeadlineQueue::~DeadlineQueue() { free_tree(root_); }

DeadlineQueue::DeadlineQueue(DeadlineQueue&& other) noexcept
    : root_(std::exchange(other.root_, nullptr)),
      capacity_(other.capacity_),
      rng_state_(other.rng_state_) {}

DeadlineQueue& DeadlineQueue::operator=(DeadlineQueue&& other) noexcept {
    if (this != &other) {
        free_tree(root_);
        root_ = std::exchange(other.root_, nullptr);
        capacity_ = other.capacity_;
        rng_state_ = other.rng_state_;
    }
    return *this;
}

int DeadlineQueue::size() const { return sz(root_); }

void DeadlineQueue::visit(const std::function<void(Step, int)>& fn) const { visit_inorder(root_, fn); }

std::vector<int> DeadlineQueue::insert(const Packet& p, Step now) {
    Node* nd = new Node{p.deadline, p.id, splitmix64(rng_state_), 1, 0, nullptr, nullptr};
    pull(nd);
    Node *a, *b;
    split_key(root_, p.deadline, p.id, a, b);
    root_ = merge(merge(a, nd), b);

    std::vector<int> evicted;
    settle(now, evicted);
    return evicted;
}

void DeadlineQueue::settle(Step now, std::vector<int>& evicted) {
    // Over-subscription shows up as some entry having fewer steps than its
    // rank demands: min(deadline - rank) < now. Evicting from the earliest
    // deadline class relaxes every violated prefix by one.
    while (root_ && (root_->size > capacity_ || root_->aug < now)) {
        Step dmin = leftmost(root_)->deadline;
        int rank = count_le_deadline(root_, dmin) - 1;  // last entry of the class
        Node *a, *mid, *b;
        split_rank(root_, rank, a, mid);
        split_rank(mid, 1, mid, b);
        evicted.push_back(mid->id);
        delete mid;
        root_ = merge(a, b);
    }
}

std::optional<int> DeadlineQueue::pop_earliest(Step now) {
    if (!root_) return std::nullopt;
    Node *victim, *rest;
    split_rank(root_, 1, victim, rest);
    root_ = rest;
    assert(victim->deadline > now);
    (void)now;
    int id = victim->id;
    delete victim;
    return id;
}

namespace {

std::vector<const Packet*> arrival_order(const Instance& inst) {
    std::vector<const Packet*> order;
    order.reserve(inst.packets.size());
    for (const Packet& p : inst.packets) order.push_back(&p);
    std::sort(order.begin(), order.end(), [](const Packet* a, const Packet* b) {
        return a->release != b->release ? a->release < b->release : a->id < b->id;
    });
    return order;
}

void require_single_buffer(const Instance& inst, const char* who) {
    if (inst.buffer_count() != 1)
        throw std::invalid_argument(std::string(who) + ": single-buffer instances only");
}

// EDF replay of exactly the given packets; false on arrival overflow or an
// expired resident. Appends sends to *out when provided.
bool edf_replay(const std::vector<const Packet*>& packets, int capacity, std::vector<Send>* out) {
    std::set<std::pair<Step, int>> resident;  // (deadline, id)
    std::size_t next = 0;
    Step t = 0;
    while (next < packets.size() || !resident.empty()) {
        if (resident.empty() && packets[next]->release > t) t = packets[next]->release;
        while (next < packets.size() && packets[next]->release == t) {
            resident.insert({packets[next]->deadline, packets[next]->id});
            ++next;
            if (static_cast<int>(resident.size()) > capacity) return false;
        }
        auto it = resident.begin();
        if (it->first <= t) return false;
        if (out) out->push_back({t, it->second});
        resident.erase(it);
        ++t;
    }
    return true;
}

// --- Maximum-value selection machinery -------------------------------------
//
// A packet set S is deliverable from one buffer of capacity B iff
//   (a) a non-idling sender's backlog over S never exceeds B, and
//   (b) EDF over S meets every deadline.
// Backlog depends only on the release multiset, so by Hall's theorem over
// integer intervals (a) holds iff the packets of S can claim pairwise
// distinct "queue tokens", packet p choosing one from [r_p - B + 1, r_p];
// likewise (b) holds iff they can claim distinct send steps from
// [r_p, d_p - 1]. Both sides are bipartite matchings into integer ranges, so
// the maximum-value deliverable subset is a minimum-cost unit flow
//     source -> token range -> packet -> send-step range -> sink
// with cost -(value) on the per-packet arc. Successive shortest augmenting
// paths keep each intermediate flow optimal for its size; we stop once no
// augmenting path has negative cost. Costs carry a lexicographic second
// component so that among equal-value optima the result deterministically
// prefers later-deadline packets, then smaller ids.
//
// Integer ranges are coordinate-compressed into segments whose capacity is
// their length, and each packet reaches the O(log n) segment-tree nodes
// covering its range, so instances with huge releases or deadlines stay
// O(n log n) in graph size.

struct LexCost {
    long long v = 0;  // negated packet value along the path
    long long w = 0;  // negated tie preference along the path
    friend bool operator<(const LexCost& a, const LexCost& b) {
        return a.v != b.v ? a.v < b.v : a.w < b.w;
    }
    friend bool operator>=(const LexCost& a, const LexCost& b) { return !(a < b); }
    LexCost operator+(const LexCost& o) const { return {v + o.v, w + o.w}; }
    LexCost operator-(const LexCost& o) const { return {v - o.v, w - o.w}; }
};

struct FlowArc {
    int to;
    int rev;  // index of the reverse arc inside adj[to]
    long long cap;
    LexCost cost;
};

struct FlowGraph {
    std::vector<std::vector<FlowArc>> adj;

    int add_node() {
        adj.emplace_back();
        return static_cast<int>(adj.size()) - 1;
    }
    void add_arc(int u, int v, long long cap, LexCost cost) {
        adj[u].push_back({v, static_cast<int>(adj[v].size()), cap, cost});
        adj[v].push_back({u, static_cast<int>(adj[u].size()) - 1, 0, LexCost{} - cost});
    }
};

// Power-of-two segment tree of graph nodes over compressed range segments;
// `up` selects arcs towards the root (token side) or away from it (send side).
struct RangeTree {
    int padded = 1;
    int base = 0;  // graph node of tree index 1 (the root)

    void build(FlowGraph& g, int leaves, bool up) {
        while (padded < std::max(leaves, 1)) padded <<= 1;
        base = static_cast<int>(g.adj.size());
        for (int j = 1; j < 2 * padded; ++j) g.add_node();
        const long long inf = std::numeric_limits<long long>::max() / 4;
        for (int j = 2; j < 2 * padded; ++j) {
            if (up)
                g.add_arc(base + j - 1, base + j / 2 - 1, inf, {});
            else
                g.add_arc(base + j / 2 - 1, base + j - 1, inf, {});
        }
    }
    int leaf(int i) const { return base + padded + i - 1; }
    void cover(int lo, int hi, std::vector<int>& out) const {
        for (lo += padded, hi += padded; lo < hi; lo >>= 1, hi >>= 1) {
            if (lo & 1) out.push_back(base + lo++ - 1);
            if (hi & 1) out.push_back(base + --hi - 1);
        }
    }
};

std::vector<Step> axis_coords(std::vector<Step> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

class MaxValueSelector {
  public:
    explicit MaxValueSelector(const Instance& inst) : inst_(inst) {}

    // Indices (into inst.packets) of a maximum-value deliverable subset.
    std::vector<int> run() {
        const int n = inst_.packet_count();
        if (n == 0) return {};
        build_network();
        while (augment()) {
        }
        std::vector<int> chosen;
        for (int p = 0; p < n; ++p)
            for (const FlowArc& arc : g_.adj[pin0_ + p])
                if (arc.to == pout0_ + p && arc.cap == 0) chosen.push_back(p);
        return chosen;
    }

  private:
    void build_network() {
        const int n = inst_.packet_count();
        const long long window = std::min<long long>(inst_.capacities[0], n);

        std::vector<Step> tok_pts, slot_pts;
        tok_pts.reserve(2 * n);
        slot_pts.reserve(2 * n);
        for (const Packet& p : inst_.packets) {
            tok_pts.push_back(p.release - window + 1);
            tok_pts.push_back(p.release + 1);
            slot_pts.push_back(p.release);
            slot_pts.push_back(p.deadline);
        }
        const std::vector<Step> tok = axis_coords(std::move(tok_pts));
        const std::vector<Step> slot = axis_coords(std::move(slot_pts));
        const int tok_leaves = static_cast<int>(tok.size()) - 1;
        const int slot_leaves = static_cast<int>(slot.size()) - 1;

        source_ = g_.add_node();
        sink_ = g_.add_node();
        RangeTree tok_tree, slot_tree;
        tok_tree.build(g_, tok_leaves, /*up=*/true);
        slot_tree.build(g_, slot_leaves, /*up=*/false);
        for (int i = 0; i < tok_leaves; ++i)
            g_.add_arc(source_, tok_tree.leaf(i), tok[i + 1] - tok[i], {});
        for (int i = 0; i < slot_leaves; ++i)
            g_.add_arc(slot_tree.leaf(i), sink_, slot[i + 1] - slot[i], {});

        // Tie preference: later deadline outranks earlier, then smaller id.
        std::vector<Step> deadlines;
        deadlines.reserve(n);
        for (const Packet& p : inst_.packets) deadlines.push_back(p.deadline);
        std::sort(deadlines.begin(), deadlines.end());
        deadlines.erase(std::unique(deadlines.begin(), deadlines.end()), deadlines.end());
        std::vector<int> by_id(n);
        std::iota(by_id.begin(), by_id.end(), 0);
        std::sort(by_id.begin(), by_id.end(),
                  [&](int a, int b) { return inst_.packets[a].id < inst_.packets[b].id; });
        std::vector<long long> pref(n);
        for (int k = 0; k < n; ++k) {
            const Packet& p = inst_.packets[by_id[k]];
            const long long drank =
                std::lower_bound(deadlines.begin(), deadlines.end(), p.deadline) -
                deadlines.begin();
            pref[by_id[k]] = (drank + 1) * (n + 1) + (n - k);
        }

        pin0_ = static_cast<int>(g_.adj.size());
        for (int p = 0; p < n; ++p) g_.add_node();
        pout0_ = static_cast<int>(g_.adj.size());
        for (int p = 0; p < n; ++p) g_.add_node();

        std::vector<int> nodes;
        for (int p = 0; p < n; ++p) {
            const Packet& pk = inst_.packets[p];
            const int tlo = static_cast<int>(
                std::lower_bound(tok.begin(), tok.end(), pk.release - window + 1) - tok.begin());
            const int thi = static_cast<int>(
                std::lower_bound(tok.begin(), tok.end(), pk.release + 1) - tok.begin());
            nodes.clear();
            tok_tree.cover(tlo, thi, nodes);
            for (int node : nodes) g_.add_arc(node, pin0_ + p, 1, {});
            g_.add_arc(pin0_ + p, pout0_ + p, 1, LexCost{-pk.value, -pref[p]});
            const int slo = static_cast<int>(
                std::lower_bound(slot.begin(), slot.end(), pk.release) - slot.begin());
            const int shi = static_cast<int>(
                std::lower_bound(slot.begin(), slot.end(), pk.deadline) - slot.begin());
            nodes.clear();
            slot_tree.cover(slo, shi, nodes);
            for (int node : nodes) g_.add_arc(pout0_ + p, node, 1, {});
        }

        // Initial potentials with non-negative reduced costs everywhere: the
        // only costed arcs leave the token side (potential 0), so the entire
        // send side takes the most negative packet cost.
        pi_.assign(g_.adj.size(), {});
        LexCost worst{};
        for (int p = 0; p < n; ++p)
            worst = std::min(worst, LexCost{-inst_.packets[p].value, -pref[p]});
        for (int p = 0; p < n; ++p)
            pi_[pout0_ + p] = LexCost{-inst_.packets[p].value, -pref[p]};
        for (int j = 0; j < 2 * slot_tree.padded - 1; ++j) pi_[slot_tree.base + j] = worst;
        pi_[sink_] = worst;
    }

    bool augment() {
        const int total = static_cast<int>(g_.adj.size());
        const LexCost inf{std::numeric_limits<long long>::max(),
                          std::numeric_limits<long long>::max()};
        dist_.assign(total, inf);
        parent_.assign(total, {-1, -1});
        done_.assign(total, 0);
        using Item = std::tuple<long long, long long, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
        dist_[source_] = {};
        heap.emplace(0, 0, source_);
        while (!heap.empty()) {
            auto [dv, dw, u] = heap.top();
            heap.pop();
            if (done_[u]) continue;
            done_[u] = 1;
            if (u == sink_) break;
            for (int k = 0; k < static_cast<int>(g_.adj[u].size()); ++k) {
                const FlowArc& arc = g_.adj[u][k];
                if (arc.cap <= 0 || done_[arc.to]) continue;
                const LexCost cand = dist_[u] + arc.cost + pi_[u] - pi_[arc.to];
                if (cand < dist_[arc.to]) {
                    dist_[arc.to] = cand;
                    parent_[arc.to] = {u, k};
                    heap.emplace(cand.v, cand.w, arc.to);
                }
            }
        }
        if (!done_[sink_]) return false;
        if (dist_[sink_] + pi_[sink_] >= LexCost{}) return false;
        for (int u = 0; u < total; ++u) pi_[u] = pi_[u] + std::min(dist_[u], dist_[sink_]);
        for (int u = sink_; u != source_;) {
            auto [prev, k] = parent_[u];
            g_.adj[prev][k].cap -= 1;
            g_.adj[g_.adj[prev][k].to][g_.adj[prev][k].rev].cap += 1;
            u = prev;
        }
        return true;
    }

    const Instance& inst_;
    FlowGraph g_;
    int source_ = 0, sink_ = 0, pin0_ = 0, pout0_ = 0;
    std::vector<LexCost> pi_, dist_;
    std::vector<std::pair<int, int>> parent_;
    std::vector<char> done_;
};

}  // namespace

Schedule dos_schedule(const Instance& inst) { return dos_schedule(inst, nullptr); }

Schedule dos_schedule(const Instance& inst, DosTrace* trace) {
    require_single_buffer(inst, "dos_schedule");
    std::vector<const Packet*> order = arrival_order(inst);

    Schedule sched;
    DeadlineQueue queue(inst.capacities[0]);
    std::size_t next = 0;
    Step t = 0;
    while (next < order.size() || !queue.empty()) {
        if (queue.empty() && order[next]->release > t) t = order[next]->release;
        while (next < order.size() && order[next]->release == t) {
            queue.insert(*order[next], t);
            ++next;
        }
        if (trace) {
            DosStepRecord rec;
            rec.step = t;
            queue.visit([&rec](Step d, int id) { rec.queue.push_back({d, id}); });
            trace->steps.push_back(std::move(rec));
        }
        if (std::optional<int> id = queue.pop_earliest(t)) sched.sends.push_back({t, *id});
        ++t;
    }
    return sched;
}

bool edf_feasible(const Instance& inst, const std::vector<int>& subset) {
    require_single_buffer(inst, "edf_feasible");
    std::vector<int> ids = subset;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    std::vector<const Packet*> chosen;
    chosen.reserve(ids.size());
    for (int want : ids) {
        const Packet* found = nullptr;
        for (const Packet& p : inst.packets)
            if (p.id == want) { found = &p; break; }
        if (!found)
            throw std::invalid_argument("edf_feasible: unknown packet id " + std::to_string(want));
        chosen.push_back(found);
    }
    std::sort(chosen.begin(), chosen.end(), [](const Packet* a, const Packet* b) {
        return a->release != b->release ? a->release < b->release : a->id < b->id;
    });
    return edf_replay(chosen, inst.capacities[0], nullptr);
}

GreedyResult greedy_edf(const Instance& inst) {
    require_single_buffer(inst, "greedy_edf");

    MaxValueSelector selector(inst);
    std::vector<int> chosen = selector.run();

    std::vector<const Packet*> selected;
    selected.reserve(chosen.size());
    for (int idx : chosen) selected.push_back(&inst.packets[idx]);
    std::sort(selected.begin(), selected.end(), [](const Packet* a, const Packet* b) {
        return a->release != b->release ? a->release < b->release : a->id < b->id;
    });

    GreedyResult result;
    const bool ok = edf_replay(selected, inst.capacities[0], &result.schedule.sends);
    assert(ok && "selection must replay cleanly");
    (void)ok;
    for (const Packet* p : selected) {
        result.selected.push_back(p->id);
        result.total_value += p->value;
    }
    std::sort(result.selected.begin(), result.selected.end());
    return result;
}

}  // namespace bufsched
