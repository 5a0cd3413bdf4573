#include "mac/adversary.hpp"

#include <doctest.h>

using namespace mac;

namespace {

InjectionScript script_from_totals(const std::vector<int>& totals) {
    InjectionScript s;
    s.rounds.resize(totals.size());
    for (size_t i = 0; i < totals.size(); ++i)
        if (totals[i] > 0) s.add(static_cast<Round>(i + 1), 1, totals[i]);
    return s;
}

// All-segments reference check, deliberately independent of the incremental
// validator: enumerates every contiguous [i,j] (and, for windows, every
// length-w segment of the zero-extended timeline).
bool oracle_feasible(const std::vector<int>& totals, const AdversaryType& t) {
    const auto len = static_cast<std::int64_t>(totals.size());
    auto sum = [&](std::int64_t i, std::int64_t j) {
        std::int64_t s = 0;
        for (std::int64_t k = i; k <= j && k <= len; ++k) s += totals[static_cast<size_t>(k - 1)];
        return s;
    };
    if (t.kind == AdversaryType::Kind::Window) {
        const std::int64_t cap = t.rate.num * t.w / t.rate.den;
        for (std::int64_t i = 1; i <= len; ++i)
            if (sum(i, i + t.w - 1) > cap) return false;
        return true;
    }
    for (std::int64_t i = 1; i <= len; ++i)
        for (std::int64_t j = i; j <= len; ++j)
            if (t.rate.den * sum(i, j) > t.rate.num * (j - i + 1) + t.rate.den * t.b)
                return false;
    return true;
}

}  // namespace

TEST_CASE("window validator accepts the alternating pair pattern") {
    CHECK(validate(script_from_totals({2, 0, 2, 0}), AdversaryType::window(2)).feasible());
}

TEST_CASE("empty script is feasible for any type") {
    CHECK(validate(InjectionScript{}, AdversaryType::window(1)).feasible());
    CHECK(validate(InjectionScript{}, AdversaryType::leaky_bucket(0)).feasible());
}

TEST_CASE("leaky bucket rejects a burst above the allowance") {
    auto result = validate(script_from_totals({3}), AdversaryType::leaky_bucket(1));
    REQUIRE_FALSE(result.feasible());
    CHECK(result.violation->seg_begin == 1);
    CHECK(result.violation->seg_end == 1);
    CHECK(result.violation->injected == 3);
    CHECK(result.violation->allowed == 2);
}

TEST_CASE("alternating pair pattern is within leaky bucket allowance 1") {
    CHECK(validate(script_from_totals({2, 0, 2, 0, 2, 0, 2, 0, 2, 0}),
                   AdversaryType::leaky_bucket(1))
              .feasible());
}

TEST_CASE("burstiness values") {
    CHECK(AdversaryType::window(5).burstiness() == 5);
    CHECK(AdversaryType::leaky_bucket(1).burstiness() == 2);
    CHECK(AdversaryType::leaky_bucket(0).burstiness() == 1);
    CHECK(AdversaryType::window(4, Rate{1, 2}).burstiness() == 2);
}

TEST_CASE("validator matches the all-segments reference exhaustively") {
    // Every script of length <= 7 with per-round totals <= 3 (4^7 = 16384),
    // against three window and three bucket types; longer scripts up to 12
    // are covered by the acceptance suite.
    std::vector<AdversaryType> types = {
        AdversaryType::window(1),       AdversaryType::window(2),
        AdversaryType::window(3),       AdversaryType::leaky_bucket(0),
        AdversaryType::leaky_bucket(1), AdversaryType::leaky_bucket(2)};
    std::vector<int> totals(7, 0);
    for (int code = 0; code < 16384; ++code) {
        int c = code;
        for (int i = 0; i < 7; ++i) {
            totals[static_cast<size_t>(i)] = c % 4;
            c /= 4;
        }
        const auto script = script_from_totals(totals);
        for (const auto& t : types) {
            CAPTURE(code);
            REQUIRE(validate(script, t).feasible() == oracle_feasible(totals, t));
        }
    }
}

TEST_CASE("feasibility monotone in the bucket allowance") {
    for (int code = 0; code < 4096; ++code) {
        std::vector<int> totals(6, 0);
        int c = code;
        for (int i = 0; i < 6; ++i) {
            totals[static_cast<size_t>(i)] = c % 4;
            c /= 4;
        }
        const auto script = script_from_totals(totals);
        for (std::int64_t b = 0; b < 3; ++b)
            if (validate(script, AdversaryType::leaky_bucket(b)).feasible())
                CHECK(validate(script, AdversaryType::leaky_bucket(b + 1)).feasible());
    }
}

TEST_CASE("window feasibility implies bucket feasibility at the same parameter") {
    for (int code = 0; code < 4096; ++code) {
        std::vector<int> totals(6, 0);
        int c = code;
        for (int i = 0; i < 6; ++i) {
            totals[static_cast<size_t>(i)] = c % 4;
            c /= 4;
        }
        const auto script = script_from_totals(totals);
        for (std::int64_t w = 1; w <= 3; ++w)
            if (validate(script, AdversaryType::window(w)).feasible())
                CHECK(validate(script, AdversaryType::leaky_bucket(w)).feasible());
    }
}

TEST_CASE("generators emit what they claim") {
    auto sat = saturating(1);
    for (Round r = 1; r <= 5; ++r) {
        auto inj = sat->injections_for(r);
        REQUIRE(inj.size() == 1);
        CHECK(inj[0] == std::pair<StationId, int>{1, 1});
    }

    auto pp = pattern_pair(1, 2);
    CHECK(pp->injections_for(1) == RoundInjections{{1, 1}, {2, 1}});
    CHECK(pp->injections_for(2).empty());
    CHECK(pp->injections_for(3) == RoundInjections{{1, 1}, {2, 1}});
    CHECK(pp->injections_for(4).empty());
    CHECK_THROWS(pattern_pair(2, 2));

    auto none = scripted(InjectionScript{});
    CHECK(none->injections_for(1).empty());
}

TEST_CASE("generator streams validate against their types") {
    auto collect = [](InjectionSource& src, Round len) {
        InjectionScript s;
        for (Round r = 1; r <= len; ++r)
            for (auto [st, c] : src.injections_for(r)) s.add(r, st, c);
        return s;
    };
    auto sat = saturating(2);
    CHECK(validate(collect(*sat, 50), AdversaryType::window(1)).feasible());
    auto cyc = saturating_cycle(3);
    CHECK(validate(collect(*cyc, 50), AdversaryType::leaky_bucket(0)).feasible());
    auto pp = pattern_pair(1, 3);
    CHECK(validate(collect(*pp, 50), AdversaryType::window(2)).feasible());
    CHECK(validate(collect(*pp, 50), AdversaryType::leaky_bucket(1)).feasible());
}

TEST_CASE("random feasible scripts validate for their declared type") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        for (auto type : {AdversaryType::window(3), AdversaryType::leaky_bucket(2)}) {
            auto s = random_feasible_script(type, 3, 200, seed);
            CHECK(validate(s, type).feasible());
        }
    }
}

TEST_CASE("script text round-trips bit-exactly") {
    InjectionScript s;
    s.add(1, 2, 1);
    s.add(1, 3, 2);
    s.add(4, 1, 1);
    const std::string text = s.serialize();
    CHECK(text == "1 2 1\n1 3 2\n4 1 1\n");
    const auto parsed = InjectionScript::parse(text);
    CHECK(parsed.serialize() == text);
    CHECK_THROWS(InjectionScript::parse("2 1 1\n1 1 1\n"));  // decreasing rounds
}

TEST_CASE("checker slack matches what a push would accept") {
    for (auto type : {AdversaryType::window(2), AdversaryType::leaky_bucket(1)}) {
        FeasibilityChecker chk(type);
        std::mt19937_64 rng(7);
        for (int i = 0; i < 100; ++i) {
            const std::int64_t slack = chk.slack();
            FeasibilityChecker probe = chk;
            CHECK(probe.push(slack));
            FeasibilityChecker over = chk;
            CHECK_FALSE(over.push(slack + 1));
            chk.push(static_cast<std::int64_t>(rng() % (slack + 1)));
        }
    }
}
