#include "charp/snc.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "charp/ruled.hpp"

namespace charp {
namespace snc {

namespace {

long long checked(__int128 v, const char* what) {
    if (v > INT64_MAX || v < INT64_MIN)
        throw EngineError(std::string("rational overflow in ") + what);
    return (long long)v;
}

}  // namespace

Rational::Rational(long long n, long long d) {
    if (d == 0) throw ConfigError("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    n_ = n / g;
    d_ = d / g;
}

Rational Rational::parse(const std::string& s) {
    std::size_t slash = s.find('/');
    std::size_t pos = 0;
    try {
        if (slash == std::string::npos) {
            long long n = std::stoll(s, &pos);
            if (pos != s.size()) throw ConfigError("trailing characters in rational: " + s);
            return Rational(n);
        }
        long long n = std::stoll(s.substr(0, slash), &pos);
        if (pos != slash) throw ConfigError("trailing characters in rational: " + s);
        long long d = std::stoll(s.substr(slash + 1), &pos);
        if (pos != s.size() - slash - 1)
            throw ConfigError("trailing characters in rational: " + s);
        return Rational(n, d);
    } catch (const std::invalid_argument&) {
        throw ConfigError("not a rational: " + s);
    } catch (const std::out_of_range&) {
        throw ConfigError("rational out of range: " + s);
    }
}

Rational Rational::operator+(const Rational& o) const {
    __int128 n = (__int128)n_ * o.d_ + (__int128)o.n_ * d_;
    __int128 d = (__int128)d_ * o.d_;
    return Rational(checked(n, "add"), checked(d, "add"));
}

Rational Rational::operator-(const Rational& o) const { return *this + (-o); }

Rational Rational::operator*(const Rational& o) const {
    __int128 n = (__int128)n_ * o.n_;
    __int128 d = (__int128)d_ * o.d_;
    return Rational(checked(n, "mul"), checked(d, "mul"));
}

bool Rational::operator<(const Rational& o) const {
    return (__int128)n_ * o.d_ < (__int128)o.n_ * d_;
}

std::string Rational::str() const {
    if (d_ == 1) return std::to_string(n_);
    return std::to_string(n_) + "/" + std::to_string(d_);
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::dlt: return "dlt";
        case Verdict::lc: return "lc";
        case Verdict::condition_violated: return "condition-violated";
    }
    return "?";
}

void validate_pair(const StratifiedPair& p) {
    int n = p.dimension;
    if (n < 1) throw ConfigError("pair dimension must be positive");
    std::set<std::string> names;
    for (const auto& d : p.divisors) {
        if (d.empty()) throw ConfigError("empty divisor name");
        if (!names.insert(d).second) throw ConfigError("duplicate divisor name: " + d);
    }
    int nd = (int)p.divisors.size();
    std::vector<bool> singleton(nd, false);
    std::set<std::vector<int>> seen;
    for (const auto& s : p.strata) {
        for (int j : s.J)
            if (j < 0 || j >= nd) throw ConfigError("stratum index out of range");
        if (!std::is_sorted(s.J.begin(), s.J.end()) ||
            std::adjacent_find(s.J.begin(), s.J.end()) != s.J.end())
            throw ConfigError("stratum index set must be sorted and duplicate-free");
        if (!seen.insert(s.J).second) throw ConfigError("duplicate stratum index set");
        if (s.J.empty()) {
            if (s.dim != n) throw ConfigError("ambient stratum must have full dimension");
        } else {
            if (s.dim < 0 || s.dim > n - (int)s.J.size())
                throw ConfigError("stratum dimension out of range for its index set");
        }
        if (s.max_mult < Rational(0)) throw ConfigError("negative multiplicity bound");
        if (s.J.size() == 1) singleton[s.J[0]] = true;
    }
    for (int i = 0; i < nd; ++i)
        if (!singleton[i])
            throw ConfigError("no stratum row for divisor " + p.divisors[i]);
    std::set<std::string> dn;
    for (const auto& c : p.delta) {
        if (c.name.empty()) throw ConfigError("empty delta component name");
        if (!dn.insert(c.name).second)
            throw ConfigError("duplicate delta component: " + c.name);
        if (c.coeff <= Rational(0))
            throw ConfigError("delta coefficient must be positive: " + c.name);
    }
}

Verdict check_condition(const StratifiedPair& p, bool strict) {
    validate_pair(p);
    Rational one(1);
    bool all_strict = true;
    for (const auto& s : p.strata) {
        if (s.contains_delta_component) return Verdict::condition_violated;
        if (s.max_mult > one) return Verdict::condition_violated;
        if (s.max_mult == one) all_strict = false;
    }
    for (const auto& c : p.delta) {
        if (c.coeff > one) return Verdict::condition_violated;
        if (c.coeff == one) all_strict = false;
    }
    if (all_strict) return Verdict::dlt;
    return strict ? Verdict::condition_violated : Verdict::lc;
}

namespace {

void validate_center(const StratifiedPair& p, const PointDatum& x) {
    int nd = (int)p.divisors.size();
    for (int j : x.through)
        if (j < 0 || j >= nd) throw ConfigError("center index out of range");
    if (!std::is_sorted(x.through.begin(), x.through.end()) ||
        std::adjacent_find(x.through.begin(), x.through.end()) != x.through.end())
        throw ConfigError("center index set must be sorted and duplicate-free");
    if ((int)x.through.size() > p.dimension)
        throw ConfigError("more divisors through the center than the dimension allows");
    if (x.mult_delta < Rational(0)) throw ConfigError("negative center multiplicity");
}

}  // namespace

Rational discrepancy_first_blowup(const StratifiedPair& p, const PointDatum& x) {
    validate_pair(p);
    validate_center(p, x);
    return Rational(p.dimension - 1) - Rational((long long)x.through.size()) - x.mult_delta;
}

StratifiedPair blowup_step(const StratifiedPair& p, const PointDatum& x) {
    validate_pair(p);
    validate_center(p, x);
    int n = p.dimension;
    Rational one(1);
    if (x.mult_delta > one)
        throw ConfigError("center multiplicity exceeds 1, condition fails there");
    if ((int)x.through.size() == n && x.mult_delta != Rational(0))
        throw ConfigError("a zero-dimensional stratum point cannot also meet delta");
    for (const auto& s : p.strata) {
        if (!std::includes(x.through.begin(), x.through.end(), s.J.begin(), s.J.end()))
            continue;
        // The center sits inside this stratum, so the condition must hold on it.
        if (s.contains_delta_component)
            throw ConfigError("center lies in a stratum inside a delta component");
        if (s.max_mult > one)
            throw ConfigError("center lies in a stratum with multiplicity above 1");
        if (s.J == x.through && x.mult_delta > s.max_mult)
            throw ConfigError("center multiplicity exceeds the stratum bound");
    }

    StratifiedPair out = p;
    std::string ename;
    for (int i = 1;; ++i) {
        ename = "E" + std::to_string(i);
        if (std::find(out.divisors.begin(), out.divisors.end(), ename) == out.divisors.end())
            break;
    }
    int e = (int)out.divisors.size();
    out.divisors.push_back(ename);

    // Every subset of the divisors through the center meets the exceptional
    // P^(n-1) in a stratum one dimension lower; the proper transform of
    // Delta cuts each of those with multiplicity at most mult_x(Delta).
    int k = (int)x.through.size();
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
        std::vector<int> J;
        for (int b = 0; b < k; ++b)
            if (mask & (1u << b)) J.push_back(x.through[b]);
        int dim = n - 1 - (int)J.size();
        if (dim < 0) continue;
        J.push_back(e);
        Stratum s;
        s.J = J;
        s.dim = dim;
        s.contains_delta_component = false;
        s.max_mult = x.mult_delta;
        out.strata.push_back(s);
    }

    if (check_condition(out) == Verdict::condition_violated)
        throw EngineError("blow-up of a valid center produced a violated pair");
    return out;
}

std::vector<FiberVerdict> family_check(const FamilyPair& f) {
    bool generic = false;
    for (const auto& fib : f.fibers) {
        if (fib.kind != "generic" && fib.kind != "special")
            throw ConfigError("fiber kind must be generic or special: " + fib.kind);
        if (fib.kind == "generic") generic = true;
        if (std::find(fib.pair.divisors.begin(), fib.pair.divisors.end(),
                      fib.fiber_divisor) == fib.pair.divisors.end())
            throw ConfigError("fiber divisor not in the boundary: " + fib.fiber_divisor);
        for (const auto& s : fib.pair.strata)
            if (s.base_dependent)
                throw ConfigError(
                    "stratum annotation depends on the base parameter; the verdict "
                    "would not be stable under base change");
    }
    if (!generic) throw ConfigError("no generic fiber row");
    std::vector<FiberVerdict> out;
    for (const auto& fib : f.fibers)
        out.push_back({fib.kind, check_condition(fib.pair)});
    return out;
}

FamilyPair paper_config(const family::FamilyConfig& cfg, const family::ConeModel& cone,
                        int zprime_scale, bool terminal_variant) {
    if (zprime_scale < 2)
        throw ConfigError("zprime_scale must be at least 2 for fractional coefficients");
    if (cone.ample_degree < 1) throw ConfigError("ample degree must be positive");
    int p = (int)cfg.p;
    int mbar = cfg.mbar;

    // The annotations below assume the members of |pD| are pairwise
    // disjoint, which holds exactly when the pencil is base point free.
    // Check that on the actual surfaces rather than take it on faith.  The
    // generic fiber carries the full |pD| as a pencil; on the split fiber
    // the relative pencil degenerates to span{u^p, v^p} inside the larger
    // |pD|, so that pair is checked explicitly.
    {
        auto chk = ruled::pencil_basepoint_check(cfg.nonsplit, p);
        if (!chk.base_point_free || !chk.samples_agree)
            throw EngineError("the degree-p pencil is not base point free");
        const auto& curve = cfg.split.ctx->curve();
        std::vector<ec::CurveFunction> lo(p + 1, ec::CurveFunction::zero(curve));
        std::vector<ec::CurveFunction> hi(p + 1, ec::CurveFunction::zero(curve));
        lo[0] = ec::CurveFunction::one(curve);
        hi[p] = ec::CurveFunction::one(curve);
        auto chk0 = ruled::pencil_pair_check(cfg.split, p, lo, hi);
        if (!chk0.base_point_free || !chk0.samples_agree)
            throw EngineError("the split-fiber limit pencil is not base point free");
    }

    StratifiedPair pair;
    pair.dimension = 4;
    pair.divisors = {"Yt", "Z0"};
    if (!terminal_variant) pair.divisors.push_back("DY");

    long long den = (long long)mbar * p;
    int pencil_members = terminal_variant ? 3 * mbar : 2 * mbar;
    for (int i = 1; i <= pencil_members; ++i)
        pair.delta.push_back({"G" + std::to_string(i), Rational(1, den)});
    pair.delta.push_back({"M1", Rational(1, zprime_scale)});
    pair.delta.push_back({"M2", Rational(1, zprime_scale)});

    // Any point meets at most one pencil member (disjointness), and the
    // |zprime_scale * Zinf| members both avoid Z0 (that bundle restricts
    // trivially to Z0) but may cross each other elsewhere.
    int nd = (int)pair.divisors.size();
    int z0 = 1;
    for (unsigned mask = 1; mask < (1u << nd); ++mask) {
        Stratum s;
        for (int b = 0; b < nd; ++b)
            if (mask & (1u << b)) s.J.push_back(b);
        s.dim = 4 - (int)s.J.size();
        s.contains_delta_component = false;
        bool on_z0 = std::find(s.J.begin(), s.J.end(), z0) != s.J.end();
        s.max_mult = on_z0 ? Rational(1, den)
                           : Rational(1, den) + Rational(2, zprime_scale);
        pair.strata.push_back(s);
    }

    FamilyPair fam;
    fam.fibers.push_back({"special", "Yt", pair});
    fam.fibers.push_back({"generic", "Yt", pair});
    return fam;
}

namespace {

Rational rational_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_float())
        throw ConfigError("floating point coefficient rejected, use \"a/b\"");
    throw ConfigError("rational must be an integer or an \"a/b\" string");
}

nlohmann::json rational_to_json(const Rational& r) {
    if (r.den() == 1) return r.num();
    return r.str();
}

}  // namespace

StratifiedPair pair_from_json(const nlohmann::json& j) {
    try {
        StratifiedPair p;
        p.dimension = j.at("dimension").get<int>();
        for (const auto& d : j.at("divisors")) p.divisors.push_back(d.get<std::string>());
        for (const auto& sj : j.at("strata")) {
            Stratum s;
            for (const auto& v : sj.at("J")) s.J.push_back(v.get<int>());
            s.dim = sj.at("dim").get<int>();
            s.contains_delta_component = sj.at("contains_delta_component").get<bool>();
            s.max_mult = rational_from_json(sj.at("max_mult"));
            if (sj.contains("base_dependent"))
                s.base_dependent = sj.at("base_dependent").get<bool>();
            p.strata.push_back(s);
        }
        for (const auto& cj : j.at("delta")) {
            DeltaComponent c;
            c.name = cj.at("name").get<std::string>();
            c.coeff = rational_from_json(cj.at("coeff"));
            p.delta.push_back(c);
        }
        validate_pair(p);
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad pair description: ") + e.what());
    }
}

nlohmann::json pair_to_json(const StratifiedPair& p) {
    nlohmann::json j;
    j["dimension"] = p.dimension;
    j["divisors"] = p.divisors;
    j["strata"] = nlohmann::json::array();
    for (const auto& s : p.strata) {
        nlohmann::json sj;
        sj["J"] = s.J;
        sj["dim"] = s.dim;
        sj["contains_delta_component"] = s.contains_delta_component;
        sj["max_mult"] = rational_to_json(s.max_mult);
        if (s.base_dependent) sj["base_dependent"] = true;
        j["strata"].push_back(sj);
    }
    j["delta"] = nlohmann::json::array();
    for (const auto& c : p.delta)
        j["delta"].push_back({{"name", c.name}, {"coeff", rational_to_json(c.coeff)}});
    return j;
}

FamilyPair family_from_json(const nlohmann::json& j) {
    try {
        FamilyPair f;
        for (const auto& fj : j.at("fibers")) {
            FamilyFiber fib;
            fib.kind = fj.at("kind").get<std::string>();
            fib.fiber_divisor = fj.at("fiber_divisor").get<std::string>();
            fib.pair = pair_from_json(fj.at("pair"));
            f.fibers.push_back(fib);
        }
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad family description: ") + e.what());
    }
}

nlohmann::json family_to_json(const FamilyPair& f) {
    nlohmann::json j;
    j["fibers"] = nlohmann::json::array();
    for (const auto& fib : f.fibers)
        j["fibers"].push_back({{"kind", fib.kind},
                               {"fiber_divisor", fib.fiber_divisor},
                               {"pair", pair_to_json(fib.pair)}});
    return j;
}

}  // namespace snc
}  // namespace charp
