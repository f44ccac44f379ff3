#include "bufsched/core.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

namespace bufsched {
namespace {

std::string format_msg(const char* fmt, ...) {
    char buf[256];
    va_list args;
    va_start(args, fmt);
    vsnprintf(buf, sizeof(buf), fmt, args);
    va_end(args);
    return std::string(buf);
}

struct Token {
    std::string_view text;
    int column;  // 1-based
};

struct LogicalLine {
    int number = 0;  // 1-based physical line number
    std::vector<Token> tokens;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

// Splits into non-empty, non-comment lines of whitespace-separated tokens.
std::vector<LogicalLine> lex_lines(std::string_view text) {
    std::vector<LogicalLine> lines;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        LogicalLine line;
        line.number = line_no;
        std::size_t i = 0;
        while (i < raw.size()) {
            while (i < raw.size() && is_space(raw[i])) ++i;
            if (i >= raw.size() || raw[i] == '#') break;
            std::size_t start = i;
            while (i < raw.size() && !is_space(raw[i]) && raw[i] != '#') ++i;
            line.tokens.push_back({raw.substr(start, i - start), static_cast<int>(start) + 1});
        }
        if (!line.tokens.empty()) lines.push_back(std::move(line));
        if (eol == std::string_view::npos) break;
    }
    return lines;
}

std::int64_t parse_int(const LogicalLine& line, const Token& tok, const char* what) {
    std::int64_t out = 0;
    const char* first = tok.text.data();
    const char* last = first + tok.text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) {
        throw ParseError(format_msg("expected integer %s, got '%.*s'", what,
                                    static_cast<int>(tok.text.size()), tok.text.data()),
                         line.number, tok.column);
    }
    return out;
}

const Token& need_token(const LogicalLine& line, std::size_t idx, const char* what) {
    if (idx >= line.tokens.size()) {
        const Token& lastTok = line.tokens.back();
        throw ParseError(format_msg("missing %s", what), line.number,
                         lastTok.column + static_cast<int>(lastTok.text.size()));
    }
    return line.tokens[idx];
}

void reject_extra_tokens(const LogicalLine& line, std::size_t expected) {
    if (line.tokens.size() > expected) {
        const Token& tok = line.tokens[expected];
        throw ParseError("unexpected trailing token", line.number, tok.column);
    }
}

const LogicalLine& need_line(const std::vector<LogicalLine>& lines, std::size_t idx,
                             const char* what) {
    if (idx >= lines.size()) {
        int last = lines.empty() ? 1 : lines.back().number;
        throw ParseError(format_msg("unexpected end of input, expected %s", what), last, 1);
    }
    return lines[idx];
}

}  // namespace

void refresh_common_deadline(Instance& inst) {
    inst.common_deadline.reset();
    if (inst.packets.empty()) return;
    Step d = inst.packets.front().deadline;
    for (const Packet& p : inst.packets)
        if (p.deadline != d) return;
    inst.common_deadline = d;
}

Instance parse_instance(std::string_view text) {
    std::vector<LogicalLine> lines = lex_lines(text);
    Instance inst;

    const LogicalLine& header = need_line(lines, 0, "'buffers <m>'");
    if (header.tokens[0].text != "buffers")
        throw ParseError("expected 'buffers' keyword", header.number, header.tokens[0].column);
    std::int64_t m = parse_int(header, need_token(header, 1, "buffer count"), "buffer count");
    if (m < 1 || m > 1'000'000)
        throw ParseError("buffer count must be in [1, 1000000]", header.number, header.tokens[1].column);
    reject_extra_tokens(header, 2);

    const LogicalLine& caps = need_line(lines, 1, "capacities line");
    if (static_cast<std::int64_t>(caps.tokens.size()) != m) {
        throw ParseError(format_msg("expected %lld capacities, got %zu", static_cast<long long>(m),
                                    caps.tokens.size()),
                         caps.number, caps.tokens[0].column);
    }
    for (const Token& tok : caps.tokens) {
        std::int64_t b = parse_int(caps, tok, "capacity");
        if (b < 1 || b > std::numeric_limits<int>::max())
            throw ParseError("capacity must be at least 1", caps.number, tok.column);
        inst.capacities.push_back(static_cast<int>(b));
    }

    const LogicalLine& pkts = need_line(lines, 2, "'packets <n>'");
    if (pkts.tokens[0].text != "packets")
        throw ParseError("expected 'packets' keyword", pkts.number, pkts.tokens[0].column);
    std::int64_t n = parse_int(pkts, need_token(pkts, 1, "packet count"), "packet count");
    if (n < 0 || n > 100'000'000)
        throw ParseError("packet count must be in [0, 100000000]", pkts.number, pkts.tokens[1].column);
    reject_extra_tokens(pkts, 2);

    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    inst.packets.reserve(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
        const LogicalLine& row = need_line(lines, 3 + static_cast<std::size_t>(k), "packet line");
        Packet p;
        std::int64_t id = parse_int(row, need_token(row, 0, "packet id"), "packet id");
        if (id < 0 || id >= n)
            throw ParseError(format_msg("packet id %lld out of range [0, %lld)",
                                        static_cast<long long>(id), static_cast<long long>(n)),
                             row.number, row.tokens[0].column);
        if (seen[static_cast<std::size_t>(id)])
            throw ParseError(format_msg("duplicate packet id %lld", static_cast<long long>(id)),
                             row.number, row.tokens[0].column);
        seen[static_cast<std::size_t>(id)] = 1;
        p.id = static_cast<int>(id);

        p.release = parse_int(row, need_token(row, 1, "release"), "release");
        if (p.release < 0)
            throw ParseError("release must be non-negative", row.number, row.tokens[1].column);
        p.deadline = parse_int(row, need_token(row, 2, "deadline"), "deadline");
        if (p.deadline <= p.release)
            throw ParseError("deadline must exceed release", row.number, row.tokens[2].column);
        p.value = parse_int(row, need_token(row, 3, "value"), "value");
        if (p.value < 0)
            throw ParseError("value must be non-negative", row.number, row.tokens[3].column);
        std::int64_t buf = parse_int(row, need_token(row, 4, "buffer index"), "buffer index");
        if (buf < 0 || buf >= m)
            throw ParseError(format_msg("buffer index %lld out of range [0, %lld)",
                                        static_cast<long long>(buf), static_cast<long long>(m)),
                             row.number, row.tokens[4].column);
        p.buffer = static_cast<int>(buf);
        reject_extra_tokens(row, 5);
        inst.packets.push_back(p);
    }

    if (lines.size() > 3 + static_cast<std::size_t>(n)) {
        const LogicalLine& extra = lines[3 + static_cast<std::size_t>(n)];
        throw ParseError("unexpected trailing line", extra.number, extra.tokens[0].column);
    }

    refresh_common_deadline(inst);
    return inst;
}

std::string serialize_instance(const Instance& inst) {
    std::string out;
    out.reserve(32 + inst.packets.size() * 24);
    char buf[160];
    snprintf(buf, sizeof(buf), "buffers %d\n", inst.buffer_count());
    out += buf;
    for (std::size_t i = 0; i < inst.capacities.size(); ++i) {
        snprintf(buf, sizeof(buf), "%s%d", i ? " " : "", inst.capacities[i]);
        out += buf;
    }
    out += '\n';
    snprintf(buf, sizeof(buf), "packets %d\n", inst.packet_count());
    out += buf;
    for (const Packet& p : inst.packets) {
        snprintf(buf, sizeof(buf), "%d %lld %lld %lld %d\n", p.id, static_cast<long long>(p.release),
                 static_cast<long long>(p.deadline), static_cast<long long>(p.value), p.buffer);
        out += buf;
    }
    return out;
}

Schedule parse_schedule(std::string_view text) {
    Schedule sched;
    for (const LogicalLine& line : lex_lines(text)) {
        Step step = parse_int(line, need_token(line, 0, "step"), "step");
        if (step < 0) throw ParseError("step must be non-negative", line.number, line.tokens[0].column);
        std::int64_t id = parse_int(line, need_token(line, 1, "packet id"), "packet id");
        if (id < 0 || id > std::numeric_limits<int>::max())
            throw ParseError("packet id out of range", line.number, line.tokens[1].column);
        reject_extra_tokens(line, 2);
        sched.sends.push_back({step, static_cast<int>(id)});
    }
    return sched;
}

std::string serialize_schedule(const Schedule& sched) {
    std::vector<Send> sorted = sched.sends;
    std::sort(sorted.begin(), sorted.end(),
              [](const Send& a, const Send& b) { return a.step != b.step ? a.step < b.step : a.packet_id < b.packet_id; });
    std::string out;
    char buf[64];
    for (const Send& s : sorted) {
        snprintf(buf, sizeof(buf), "%lld %d\n", static_cast<long long>(s.step), s.packet_id);
        out += buf;
    }
    return out;
}

std::vector<std::string> validate_instance(const Instance& inst, ValidateMode mode) {
    std::vector<std::string> out;
    const int m = inst.buffer_count();
    const int n = inst.packet_count();

    for (int i = 0; i < m; ++i)
        if (inst.capacities[i] < 1)
            out.push_back(format_msg("buffer %d capacity %d; must be at least 1", i, inst.capacities[i]));

    std::vector<int> id_count(static_cast<std::size_t>(n), 0);
    for (const Packet& p : inst.packets) {
        if (p.id < 0 || p.id >= n)
            out.push_back(format_msg("packet id %d not in [0, %d)", p.id, n));
        else if (++id_count[static_cast<std::size_t>(p.id)] == 2)
            out.push_back(format_msg("duplicate packet id %d", p.id));
        if (p.release < 0)
            out.push_back(format_msg("packet %d release %lld is negative", p.id,
                                     static_cast<long long>(p.release)));
        if (p.deadline <= p.release)
            out.push_back(format_msg("packet %d deadline %lld does not exceed release %lld", p.id,
                                     static_cast<long long>(p.deadline), static_cast<long long>(p.release)));
        if (p.value < 0)
            out.push_back(format_msg("packet %d value %lld is negative", p.id,
                                     static_cast<long long>(p.value)));
        if (p.buffer < 0 || p.buffer >= m)
            out.push_back(format_msg("packet %d buffer %d not in [0, %d)", p.id, p.buffer, m));
        if (inst.common_deadline && p.deadline != *inst.common_deadline)
            out.push_back(format_msg("packet %d deadline %lld differs from common deadline %lld", p.id,
                                     static_cast<long long>(p.deadline),
                                     static_cast<long long>(*inst.common_deadline)));
    }

    if (mode == ValidateMode::common_deadline && !inst.common_deadline && n > 0) {
        // Flag deviations from the most frequent deadline so one stray packet
        // yields one violation.
        std::map<Step, int> freq;
        for (const Packet& p : inst.packets) ++freq[p.deadline];
        Step ref = freq.begin()->first;
        int best = 0;
        for (auto& [d, c] : freq)
            if (c > best) { best = c; ref = d; }
        bool all_equal = freq.size() == 1;
        if (all_equal) {
            out.push_back("all deadlines agree but no common deadline is recorded");
        } else {
            for (const Packet& p : inst.packets)
                if (p.deadline != ref)
                    out.push_back(format_msg("packet %d deadline %lld breaks the common deadline %lld",
                                             p.id, static_cast<long long>(p.deadline),
                                             static_cast<long long>(ref)));
        }
    }

    if (mode == ValidateMode::per_release_fit) {
        std::vector<std::pair<int, Step>> arrivals;
        arrivals.reserve(inst.packets.size());
        for (const Packet& p : inst.packets)
            if (p.buffer >= 0 && p.buffer < m) arrivals.push_back({p.buffer, p.release});
        std::sort(arrivals.begin(), arrivals.end());
        for (std::size_t k = 0; k < arrivals.size();) {
            std::size_t j = k;
            while (j < arrivals.size() && arrivals[j] == arrivals[k]) ++j;
            const int count = static_cast<int>(j - k);
            const int buffer = arrivals[k].first;
            if (count > inst.capacities[static_cast<std::size_t>(buffer)])
                out.push_back(format_msg("buffer %d receives %d arrivals at step %lld (capacity %d)",
                                         buffer, count, static_cast<long long>(arrivals[k].second),
                                         inst.capacities[static_cast<std::size_t>(buffer)]));
            k = j;
        }
    }

    return out;
}

Instance normalize_no_deadline(const Instance& inst) {
    if (inst.packets.empty())
        throw std::invalid_argument("normalize_no_deadline: instance has no packets");
    Instance out = inst;
    Step d = out.max_release() + out.packet_count();
    for (Packet& p : out.packets) p.deadline = d;
    out.common_deadline = d;
    return out;
}

ThroughputReport verify_schedule(const Instance& inst, const Schedule& sched) {
    ThroughputReport report;
    const int m = inst.buffer_count();

    std::unordered_map<int, const Packet*> by_id;
    by_id.reserve(inst.packets.size());
    for (const Packet& p : inst.packets) by_id.emplace(p.id, &p);

    std::vector<Send> sends = sched.sends;
    std::sort(sends.begin(), sends.end(),
              [](const Send& a, const Send& b) { return a.step != b.step ? a.step < b.step : a.packet_id < b.packet_id; });

    std::unordered_set<int> sent_ids;
    sent_ids.reserve(sends.size());
    // Per buffer: occupancy deltas at compressed time points (+1 on release,
    // -1 one past the send step).
    std::vector<std::map<Step, int>> deltas(static_cast<std::size_t>(m));

    for (std::size_t i = 0; i < sends.size(); ++i) {
        const Send& s = sends[i];
        auto it = by_id.find(s.packet_id);
        if (it == by_id.end())
            throw std::invalid_argument(format_msg("verify_schedule: unknown packet id %d", s.packet_id));
        const Packet& p = *it->second;

        if (i > 0 && sends[i - 1].step == s.step)
            report.violations.push_back(format_msg("multiple sends at step %lld",
                                                   static_cast<long long>(s.step)));
        bool duplicate = !sent_ids.insert(s.packet_id).second;
        if (duplicate)
            report.violations.push_back(format_msg("packet %d sent more than once", s.packet_id));
        bool in_window = s.step >= p.release && s.step < p.deadline;
        if (!in_window)
            report.violations.push_back(format_msg("packet %d sent at step %lld outside window [%lld, %lld)",
                                                   s.packet_id, static_cast<long long>(s.step),
                                                   static_cast<long long>(p.release),
                                                   static_cast<long long>(p.deadline)));
        if (!duplicate && in_window && p.buffer >= 0 && p.buffer < m) {
            deltas[static_cast<std::size_t>(p.buffer)][p.release] += 1;
            deltas[static_cast<std::size_t>(p.buffer)][s.step + 1] -= 1;
        }
    }

    for (int b = 0; b < m; ++b) {
        int occupancy = 0;
        for (auto& [t, delta] : deltas[static_cast<std::size_t>(b)]) {
            occupancy += delta;
            if (occupancy > inst.capacities[static_cast<std::size_t>(b)]) {
                report.violations.push_back(format_msg("buffer %d holds %d packets at step %lld (capacity %d)",
                                                       b, occupancy, static_cast<long long>(t),
                                                       inst.capacities[static_cast<std::size_t>(b)]));
                break;  // first overflow per buffer is enough
            }
        }
    }

    report.delivered_count = static_cast<std::int64_t>(sent_ids.size());
    for (int id : sent_ids) report.delivered_value += by_id.at(id)->value;
    return report;
}

}  // namespace bufsched
