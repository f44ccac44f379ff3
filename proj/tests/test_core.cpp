#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "bufsched/core.hpp"
#include "bufsched/harness.hpp"
#include "bufsched/oracle.hpp"
#include "bufsched/single_buffer.hpp"
#include "support.hpp"

using namespace bufsched;

namespace {

Instance make(std::vector<int> caps, std::vector<Packet> packets) {
    Instance inst;
    inst.capacities = std::move(caps);
    inst.packets = std::move(packets);
    refresh_common_deadline(inst);
    return inst;
}

}  // namespace

TEST_CASE("parse: header-only trace") {
    Instance inst = parse_instance("buffers 1\n4\npackets 0\n");
    CHECK(inst.buffer_count() == 1);
    CHECK(inst.capacities == std::vector<int>{4});
    CHECK(inst.packets.empty());
    CHECK(!inst.common_deadline.has_value());
}

TEST_CASE("parse: packet line carries all five fields") {
    Instance inst = parse_instance("buffers 1\n2\npackets 1\n0 0 3 5 0\n");
    REQUIRE(inst.packet_count() == 1);
    const Packet& p = inst.packets[0];
    CHECK(p.id == 0);
    CHECK(p.release == 0);
    CHECK(p.deadline == 3);
    CHECK(p.value == 5);
    CHECK(p.buffer == 0);
    CHECK(inst.common_deadline == Step{3});
}

TEST_CASE("parse: deadline not past release is rejected with position") {
    try {
        parse_instance("buffers 1\n2\npackets 1\n0 2 2 5 0\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 4);
        CHECK(e.column == 5);
        CHECK(std::string(e.what()).find("deadline") != std::string::npos);
    }
}

TEST_CASE("parse: comments and blank lines keep physical numbering") {
    const char* text =
        "# tiny single-buffer fixture\n"
        "buffers 1\n"
        "1\n"
        "\n"
        "packets 1\n"
        "0 1 1 0 0  # zero slack\n";
    try {
        parse_instance(text);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 6);
        CHECK(e.column == 5);
    }
}

TEST_CASE("parse: malformed integers and structure are rejected") {
    CHECK_THROWS_AS(parse_instance("buffers x\n"), ParseError);
    CHECK_THROWS_AS(parse_instance("buffers 1\n"), ParseError);           // missing capacities
    CHECK_THROWS_AS(parse_instance("buffers 2\n1\npackets 0\n"), ParseError);  // capacity count
    CHECK_THROWS_AS(parse_instance("buffers 1\n0\npackets 0\n"), ParseError);  // capacity < 1
    CHECK_THROWS_AS(parse_instance("buffers 1\n1\npackets 1\n"), ParseError);  // missing row
    CHECK_THROWS_AS(parse_instance("buffers 1\n1\npackets 1\n0 0 1 0 0\n0 0\n"), ParseError);
    CHECK_THROWS_AS(parse_instance("buffers 1\n1\npackets 2\n0 0 1 0 0\n0 0 1 0 0\n"),
                    ParseError);  // duplicate id
    CHECK_THROWS_AS(parse_instance("buffers 1\n1\npackets 1\n0 0 1 0 7\n"),
                    ParseError);  // buffer index out of range
    try {
        parse_instance("buffers one\n1\npackets 0\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
        CHECK(e.column == 9);
    }
}

TEST_CASE("serialize: empty instance is the header-only trace") {
    Instance inst = make({4}, {});
    std::string text = serialize_instance(inst);
    CHECK(text == "buffers 1\n4\npackets 0\n");
    CHECK(parse_instance(text) == inst);
}

TEST_CASE("serialize: one-packet instance round-trips") {
    Instance inst = make({2}, {Packet{0, 0, 3, 5, 0}});
    Instance back = parse_instance(serialize_instance(inst));
    CHECK(back == inst);
}

TEST_CASE("serialize: generator outputs round-trip byte-identically") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        GenParams params;
        params.buffer_count = 1 + static_cast<int>(seed % 3);
        params.capacity_min = 1;
        params.capacity_max = 3;
        params.packet_count = 7;
        params.horizon = 5;
        params.value_min = 1;
        params.value_max = 9;
        if (seed % 2 == 0) params.common_deadline = 8;
        params.seed = seed;
        Instance inst = gen_random(params);
        std::string text = serialize_instance(inst);
        Instance back = parse_instance(text);
        CHECK(back == inst);
        CHECK(serialize_instance(back) == text);
    }
}

TEST_CASE("schedule text: parse and serialize round-trip") {
    Schedule sched;
    sched.sends = {{0, 2}, {1, 0}, {3, 1}};
    std::string text = serialize_schedule(sched);
    CHECK(text == "0 2\n1 0\n3 1\n");
    CHECK(parse_schedule(text) == sched);
    CHECK(parse_schedule("# note\n\n0 2\n1 0\n3 1\n") == sched);
    CHECK_THROWS_AS(parse_schedule("0\n"), ParseError);
    CHECK_THROWS_AS(parse_schedule("0 1 9\n"), ParseError);
}

TEST_CASE("validate: per-release fit flags an overfull release point") {
    Instance inst = make({1}, {Packet{0, 0, 2, 1, 0}, Packet{1, 0, 2, 1, 0}});
    CHECK(validate_instance(inst, ValidateMode::per_release_fit).size() == 1);
    CHECK(validate_instance(inst, ValidateMode::general).empty());
}

TEST_CASE("validate: one deviating deadline yields one violation") {
    Instance inst = make({1}, {Packet{0, 0, 3, 1, 0}, Packet{1, 0, 3, 1, 0}, Packet{2, 0, 2, 1, 0}});
    CHECK(validate_instance(inst, ValidateMode::common_deadline).size() == 1);
    CHECK(validate_instance(inst, ValidateMode::general).empty());

    Instance recorded = make({1}, {Packet{0, 0, 3, 1, 0}, Packet{1, 0, 2, 1, 0}});
    recorded.common_deadline = 3;  // claims D=3 while packet 1 deviates
    CHECK(validate_instance(recorded, ValidateMode::common_deadline).size() == 1);
}

TEST_CASE("normalize: releases {0,0,2} get deadline 5") {
    Instance inst = make({2}, {Packet{0, 0, 9, 1, 0}, Packet{1, 0, 4, 2, 0}, Packet{2, 2, 3, 3, 0}});
    Instance out = normalize_no_deadline(inst);
    for (const Packet& p : out.packets) CHECK(p.deadline == 5);
    CHECK(out.common_deadline == Step{5});
    // everything else untouched
    CHECK(out.capacities == inst.capacities);
    for (int k = 0; k < 3; ++k) {
        CHECK(out.packets[k].release == inst.packets[k].release);
        CHECK(out.packets[k].value == inst.packets[k].value);
    }
}

TEST_CASE("normalize: single packet at release 0 gets deadline 1") {
    Instance inst = make({1}, {Packet{0, 0, 7, 1, 0}});
    CHECK(normalize_no_deadline(inst).packets[0].deadline == 1);
}

TEST_CASE("normalize: n packets at release 0 stay deliverable one per step") {
    const int n = 5;
    std::vector<Packet> packets;
    for (int k = 0; k < n; ++k) packets.push_back(Packet{k, 0, 99, 1, 0});
    Instance out = normalize_no_deadline(make({n}, packets));
    CHECK(out.common_deadline == Step{n});
    std::vector<int> all;
    for (int k = 0; k < n; ++k) all.push_back(k);
    CHECK(oracle_feasible(out, all));
}

TEST_CASE("normalize: empty instance is an error") {
    Instance inst = make({1}, {});
    CHECK_THROWS_AS(normalize_no_deadline(inst), std::invalid_argument);
}

TEST_CASE("verify: empty schedule is clean with value 0") {
    Instance inst = make({1}, {Packet{0, 0, 2, 5, 0}});
    ThroughputReport report = verify_schedule(inst, Schedule{});
    CHECK(report.ok());
    CHECK(report.delivered_count == 0);
    CHECK(report.delivered_value == 0);
}

TEST_CASE("verify: sending the short-fuse packet first overfills the buffer") {
    Instance inst = make({1}, {Packet{0, 0, 2, 5, 0}, Packet{1, 0, 1, 3, 0}});
    Schedule sched;
    sched.sends = {{0, 1}, {1, 0}};  // packet 0 then resides through step 1
    ThroughputReport report = verify_schedule(inst, sched);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].find("buffer 0") != std::string::npos);
}

TEST_CASE("verify: dropping the short-fuse packet is clean and worth 5") {
    Instance inst = make({1}, {Packet{0, 0, 2, 5, 0}, Packet{1, 0, 1, 3, 0}});
    Schedule sched;
    sched.sends = {{0, 0}};
    ThroughputReport report = verify_schedule(inst, sched);
    CHECK(report.ok());
    CHECK(report.delivered_count == 1);
    CHECK(report.delivered_value == 5);
    CHECK(oracle_optimal(inst).optimal_value == 5);
}

TEST_CASE("verify: window, duplicate and same-step violations are reported") {
    Instance inst = make({2}, {Packet{0, 0, 2, 5, 0}, Packet{1, 1, 3, 3, 0}});
    Schedule late;
    late.sends = {{2, 0}};
    CHECK(!verify_schedule(inst, late).ok());
    Schedule early;
    early.sends = {{0, 1}};
    CHECK(!verify_schedule(inst, early).ok());
    Schedule twice;
    twice.sends = {{0, 0}, {1, 0}};
    CHECK(!verify_schedule(inst, twice).ok());
    Schedule same_step;
    same_step.sends = {{1, 0}, {1, 1}};
    CHECK(!verify_schedule(inst, same_step).ok());
    Schedule unknown;
    unknown.sends = {{0, 9}};
    CHECK_THROWS_AS(verify_schedule(inst, unknown), std::invalid_argument);
}

TEST_CASE("verify: agrees with a naive occupancy replay") {
    std::mt19937_64 rng(20240521);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        GenParams params;
        params.buffer_count = 1 + static_cast<int>(rng() % 3);
        params.capacity_min = 1;
        params.capacity_max = 2;
        params.packet_count = 5;
        params.horizon = 4;
        params.value_min = 1;
        params.value_max = 9;
        params.seed = rng();
        Instance inst = gen_random(params);

        Schedule sched;
        if (trial % 3 == 0 && inst.buffer_count() == 1) {
            sched = dos_schedule(inst);  // a clean schedule
        } else {
            // random (step, id) pairs, often invalid
            int sends = static_cast<int>(rng() % 5);
            for (int s = 0; s < sends; ++s)
                sched.sends.push_back({static_cast<Step>(rng() % 6),
                                       static_cast<int>(rng() % 5)});
        }
        ThroughputReport fast = verify_schedule(inst, sched);
        testsup::NaiveReport slow = testsup::naive_verify(inst, sched);
        CHECK(fast.ok() == slow.ok());
        if (fast.ok()) {
            CHECK(fast.delivered_count == slow.delivered_count);
            CHECK(fast.delivered_value == slow.delivered_value);
        }
        ++checked;
    }
    CHECK(checked == 400);
}

TEST_CASE("refresh_common_deadline tracks agreement") {
    Instance inst = make({1}, {Packet{0, 0, 4, 1, 0}, Packet{1, 2, 4, 1, 0}});
    CHECK(inst.common_deadline == Step{4});
    inst.packets[1].deadline = 3;
    refresh_common_deadline(inst);
    CHECK(!inst.common_deadline.has_value());
    inst.packets.clear();
    refresh_common_deadline(inst);
    CHECK(!inst.common_deadline.has_value());
}
