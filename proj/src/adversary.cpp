#include "mac/adversary.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace mac {

AdversaryType AdversaryType::window(std::int64_t w, Rate rate) {
    if (w < 1) throw std::invalid_argument("window size must be >= 1");
    if (rate.num <= 0 || rate.den <= 0 || rate.num > rate.den)
        throw std::invalid_argument("rate must satisfy 0 < rate <= 1");
    AdversaryType t;
    t.kind = Kind::Window;
    t.rate = rate;
    t.w = w;
    return t;
}

AdversaryType AdversaryType::leaky_bucket(std::int64_t b, Rate rate) {
    if (b < 0) throw std::invalid_argument("bucket allowance must be >= 0");
    if (rate.num <= 0 || rate.den <= 0 || rate.num > rate.den)
        throw std::invalid_argument("rate must satisfy 0 < rate <= 1");
    AdversaryType t;
    t.kind = Kind::LeakyBucket;
    t.rate = rate;
    t.b = b;
    return t;
}

std::int64_t AdversaryType::burstiness() const {
    if (kind == Kind::Window) return rate.num * w / rate.den;
    return (rate.num + b * rate.den) / rate.den;
}

std::string AdversaryType::describe() const {
    std::ostringstream os;
    if (rate.is_one())
        os << "(1,";
    else
        os << "(" << rate.num << "/" << rate.den << ",";
    os << (kind == Kind::Window ? w : b) << ")";
    return (kind == Kind::Window ? "window" : "leaky-bucket") + os.str();
}

std::int64_t InjectionScript::total_packets() const {
    std::int64_t total = 0;
    for (const auto& r : rounds)
        for (const auto& [s, c] : r) total += c;
    return total;
}

void InjectionScript::add(Round r, StationId station, int count) {
    if (r < 1 || count < 1) throw std::invalid_argument("bad injection");
    if (static_cast<Round>(rounds.size()) < r) rounds.resize(static_cast<size_t>(r));
    auto& row = rounds[static_cast<size_t>(r - 1)];
    auto it = std::find_if(row.begin(), row.end(),
                           [&](const auto& p) { return p.first == station; });
    if (it != row.end())
        it->second += count;
    else
        row.emplace_back(station, count);
    std::sort(row.begin(), row.end());
}

std::string InjectionScript::serialize() const {
    std::ostringstream os;
    for (size_t i = 0; i < rounds.size(); ++i)
        for (const auto& [s, c] : rounds[i])
            os << (i + 1) << " " << s << " " << c << "\n";
    return os.str();
}

InjectionScript InjectionScript::parse(const std::string& text) {
    InjectionScript script;
    std::istringstream is(text);
    std::string line;
    Round prev = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Round r;
        StationId s;
        int c;
        if (!(ls >> r >> s >> c)) throw std::invalid_argument("bad script line: " + line);
        if (r < prev) throw std::invalid_argument("script rounds must be non-decreasing");
        prev = r;
        script.add(r, s, c);
    }
    return script;
}

std::string Violation::describe() const {
    std::ostringstream os;
    os << "segment [" << seg_begin << "," << seg_end << "] carries " << injected
       << " packets, allowed " << allowed;
    return os.str();
}

FeasibilityChecker::FeasibilityChecker(const AdversaryType& type) : type_(type) {}

bool FeasibilityChecker::push(std::int64_t count) {
    if (count < 0) throw std::invalid_argument("negative injection count");
    ++round_;
    if (violation_) return false;
    const std::int64_t p = type_.rate.num, q = type_.rate.den;
    if (type_.kind == AdversaryType::Kind::Window) {
        window_.push_back(count);
        window_sum_ += count;
        if (static_cast<std::int64_t>(window_.size()) > type_.w) {
            window_sum_ -= window_.front();
            window_.pop_front();
        }
        const std::int64_t cap = p * type_.w / q;
        if (window_sum_ > cap) {
            Violation v;
            v.seg_end = round_;
            v.seg_begin = round_ - static_cast<Round>(window_.size()) + 1;
            v.injected = window_sum_;
            v.allowed = cap;
            violation_ = v;
        }
    } else {
        if (bucket_load_ <= 0) {
            bucket_start_ = round_;
            bucket_injected_ = 0;
            bucket_load_ = 0;
        }
        bucket_load_ += q * count - p;
        bucket_injected_ += count;
        if (bucket_load_ > q * type_.b) {
            Violation v;
            v.seg_begin = bucket_start_;
            v.seg_end = round_;
            v.injected = bucket_injected_;
            const Round len = v.seg_end - v.seg_begin + 1;
            v.allowed = (p * len + q * type_.b) / q;
            violation_ = v;
        }
    }
    return !violation_;
}

std::int64_t FeasibilityChecker::slack() const {
    if (violation_) return 0;
    const std::int64_t p = type_.rate.num, q = type_.rate.den;
    if (type_.kind == AdversaryType::Kind::Window) {
        const std::int64_t cap = p * type_.w / q;
        std::int64_t recent = window_sum_;
        if (static_cast<std::int64_t>(window_.size()) == type_.w) recent -= window_.front();
        return cap - recent;
    }
    const std::int64_t room = q * type_.b + p - std::max<std::int64_t>(0, bucket_load_);
    return room < 0 ? 0 : room / q;
}

ValidationResult validate(const InjectionScript& script, const AdversaryType& type) {
    FeasibilityChecker checker(type);
    for (const auto& row : script.rounds) {
        std::int64_t total = 0;
        for (const auto& [s, c] : row) total += c;
        if (!checker.push(total)) break;
    }
    return ValidationResult{checker.violation()};
}

namespace {

class SaturatingSource final : public InjectionSource {
public:
    explicit SaturatingSource(StationId target) : target_(target) {
        if (target < 1) throw std::invalid_argument("bad target station");
    }
    RoundInjections injections_for(Round) override { return {{target_, 1}}; }

private:
    StationId target_;
};

class SaturatingCycleSource final : public InjectionSource {
public:
    explicit SaturatingCycleSource(int n) : n_(n) {
        if (n < 1) throw std::invalid_argument("bad station count");
    }
    RoundInjections injections_for(Round r) override {
        return {{static_cast<StationId>((r - 1) % n_ + 1), 1}};
    }

private:
    int n_;
};

class PatternPairSource final : public InjectionSource {
public:
    PatternPairSource(StationId a, StationId b) : a_(a), b_(b) {
        if (a == b) throw std::invalid_argument("pattern_pair stations must differ");
        if (a < 1 || b < 1) throw std::invalid_argument("bad station");
        if (a_ > b_) std::swap(a_, b_);
    }
    RoundInjections injections_for(Round r) override {
        if (r % 2 == 1) return {{a_, 1}, {b_, 1}};
        return {};
    }

private:
    StationId a_, b_;
};

class ScriptedSource final : public InjectionSource {
public:
    explicit ScriptedSource(InjectionScript script) : script_(std::move(script)) {}
    RoundInjections injections_for(Round r) override {
        if (r >= 1 && r <= script_.length())
            return script_.rounds[static_cast<size_t>(r - 1)];
        return {};
    }

private:
    InjectionScript script_;
};

}  // namespace

std::unique_ptr<InjectionSource> saturating(StationId target) {
    return std::make_unique<SaturatingSource>(target);
}

std::unique_ptr<InjectionSource> saturating_cycle(int n) {
    return std::make_unique<SaturatingCycleSource>(n);
}

std::unique_ptr<InjectionSource> pattern_pair(StationId a, StationId b) {
    return std::make_unique<PatternPairSource>(a, b);
}

std::unique_ptr<InjectionSource> scripted(InjectionScript script) {
    return std::make_unique<ScriptedSource>(std::move(script));
}

InjectionScript random_feasible_script(const AdversaryType& type, int n, Round horizon,
                                       std::uint64_t seed) {
    if (n < 1 || horizon < 0) throw std::invalid_argument("bad script parameters");
    std::mt19937_64 rng(seed);
    FeasibilityChecker checker(type);
    InjectionScript script;
    script.rounds.resize(static_cast<size_t>(horizon));
    for (Round r = 1; r <= horizon; ++r) {
        const std::int64_t cap = std::min(checker.slack(), type.burstiness());
        std::int64_t load = 0;
        if (cap > 0) {
            switch (rng() % 4) {
                case 0: load = 0; break;
                case 1: load = 1; break;
                case 2: load = std::min<std::int64_t>(2, cap); break;
                default: load = static_cast<std::int64_t>(rng() % (cap + 1)); break;
            }
        }
        checker.push(load);
        for (std::int64_t k = 0; k < load; ++k)
            script.add(r, static_cast<StationId>(rng() % n + 1), 1);
    }
    return script;
}

}  // namespace mac
