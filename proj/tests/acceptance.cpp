// Ten pass/fail gates over the whole stack at desk scale (p = 2, 3, 5).
// Each criterion prints exactly one PASS/FAIL line; the exit status is the
// conjunction.  Runs from a clean build with no arguments.

#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "charp/degeneration.hpp"
#include "charp/ruled.hpp"
#include "charp/snc.hpp"
#include "charp/unipotent.hpp"

using namespace charp;
using cech::Bundle;
using cech::CoverContext;
using cech::Ctx;
using ec::Divisor;
using ec::Point;
using ec::WeierstrassCurve;
using gf::FiniteField;

namespace {

constexpr std::uint64_t kBound = 1u << 20;
const std::vector<std::int64_t> kPrimes = {2, 3, 5};

Ctx ctx_p(std::int64_t p) {
    switch (p) {
        case 2:
            return CoverContext::make(
                WeierstrassCurve::from_ints(FiniteField::create(2, 1), 1, 0, 0, 0, 1));
        case 3:
            return CoverContext::make(
                WeierstrassCurve::from_ints(FiniteField::create(3, 1), 0, 1, 0, 0, 1));
        default:
            return CoverContext::make(
                WeierstrassCurve::from_ints(FiniteField::create(5, 1), 0, 0, 0, 1, 1));
    }
}

struct Gate {
    int passed = 0;
    int total = 0;

    // Runs one criterion body, turning exceptions into failures.
    template <typename F>
    void criterion(int n, const std::string& label, F body) {
        ++total;
        auto start = std::chrono::steady_clock::now();
        std::string why;
        bool ok = false;
        try {
            ok = body(why);
        } catch (const std::exception& e) {
            why = std::string("exception: ") + e.what();
        }
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
        if (ok) {
            ++passed;
            std::printf("PASS %2d: %s\n", n, label.c_str());
        } else {
            std::printf("FAIL %2d: %s (%s)\n", n, label.c_str(), why.c_str());
        }
        std::fprintf(stderr, "  [%d] %.1f s\n", n, ms / 1000.0);
        std::fflush(stdout);
    }
};

std::string fmt(const char* f, long long a, long long b = 0, long long c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), f, a, b, c);
    return buf;
}

}  // namespace

int main() {
    Gate gate;

    gate.criterion(1, "below p the pushforward is the full-rank indecomposable",
                   [&](std::string& why) {
        for (auto p : kPrimes) {
            ruled::RuledSurface ns = ruled::nonsplit_surface(ctx_p(p));
            for (int m = 1; m < (int)p; ++m) {
                if (ruled::section_count(ns, m) != 1) {
                    why = fmt("p=%lld m=%lld: h0 != 1", p, m);
                    return false;
                }
                if (ruled::pushforward_type(ns, m) != std::vector<int>{m + 1}) {
                    why = fmt("p=%lld m=%lld: type not {m+1}", p, m);
                    return false;
                }
            }
        }
        return true;
    });

    gate.criterion(2, "at m = p a trivial summand splits off", [&](std::string& why) {
        for (auto p : kPrimes) {
            ruled::RuledSurface ns = ruled::nonsplit_surface(ctx_p(p));
            if (ruled::section_count(ns, (int)p) != 2) {
                why = fmt("p=%lld: h0(pD) != 2", p);
                return false;
            }
            if (ruled::pushforward_type(ns, (int)p) != std::vector<int>{(int)p, 1}) {
                why = fmt("p=%lld: type not {p,1}", p);
                return false;
            }
        }
        return true;
    });

    gate.criterion(3, "section counts respect the scarcity bounds",
                   [&](std::string& why) {
        // h0 < m + 1 holds from m = 1 on; the sharper m + 2 - p form needs
        // the filtration to start at (p-1)D, so it binds from m = p - 1.
        for (auto p : kPrimes) {
            ruled::RuledSurface ns = ruled::nonsplit_surface(ctx_p(p));
            for (int m = 1; m <= 2 * (int)p + 2; ++m) {
                std::size_t h0 = ruled::section_count(ns, m);
                if (h0 > (std::size_t)m) {
                    why = fmt("p=%lld m=%lld: h0 = %lld >= m+1", p, m, (long long)h0);
                    return false;
                }
                if (m >= (int)p - 1 && h0 > (std::size_t)(m + 2 - (int)p)) {
                    why = fmt("p=%lld m=%lld: h0 above m+2-p", p, m);
                    return false;
                }
            }
        }
        return true;
    });

    gate.criterion(4, "the thickened section contradicts a torsion-free direct image",
                   [&](std::string& why) {
        for (auto p : kPrimes) {
            Ctx ctx = ctx_p(p);
            ruled::RuledSurface ns = ruled::nonsplit_surface(ctx);
            if (ruled::thickened_section_h1(ns, (int)p) != 2) {
                why = fmt("p=%lld: thickened h1 != 2", p);
                return false;
            }
            family::NonCmCertificate cert =
                family::non_cm_certificate(family::make_family(ctx, 1));
            if (!cert.at_zero.cm || cert.at_zero.h1_observed != 1 ||
                cert.at_zero.h1_observed != cert.at_zero.torsion_free_value) {
                why = fmt("p=%lld: special fiber not consistent with rank-1 R1", p);
                return false;
            }
            if (cert.at_generic.cm || cert.at_generic.h1_observed != 2 ||
                cert.at_generic.torsion_free_value != 1 || cert.h1_first_thickening != 1) {
                why = fmt("p=%lld: generic fiber certificate wrong", p);
                return false;
            }
        }
        return true;
    });

    gate.criterion(5, "plurigenera jump by at least p - 1 and the cone preserves the jump",
                   [&](std::string& why) {
        for (auto p : kPrimes) {
            family::FamilyConfig fam = family::make_family(ctx_p(p), 1);
            family::PlurigeneraTable table =
                family::plurigenera_table(fam, family::make_cone(fam), 2 * (int)p + 2);
            if (table.rows.empty()) {
                why = fmt("p=%lld: no rows", p);
                return false;
            }
            for (const auto& r : table.rows) {
                if (r.surface_jump < (std::size_t)(p - 1)) {
                    why = fmt("p=%lld m=%lld: surface jump below p-1", p, r.m);
                    return false;
                }
                if (r.threefold_jump != r.surface_jump) {
                    why = fmt("p=%lld m=%lld: cone changed the jump", p, r.m);
                    return false;
                }
            }
        }
        return true;
    });

    gate.criterion(6, "one-parameter section ranks are strictly semicontinuous",
                   [&](std::string& why) {
        for (auto p : kPrimes) {
            family::FamilyConfig fam = family::make_family(ctx_p(p), 1);
            for (int m = 1; m <= 2 * (int)p + 2; ++m) {
                family::ParametricRanks pr = family::parametric_cohomology(fam, m);
                if (pr.generic_rank >= pr.special_rank) {
                    why = fmt("p=%lld m=%lld: no strict drop", p, m);
                    return false;
                }
                if (m == (int)p &&
                    (pr.generic_rank != 2 || pr.special_rank != (std::size_t)(p + 1))) {
                    why = fmt("p=%lld: ranks at m=p not (2, p+1)", p);
                    return false;
                }
            }
        }
        return true;
    });

    gate.criterion(7, "randomized Euler characteristic, duality, and truncation checks",
                   [&](std::string& why) {
        std::mt19937 rng(902516);
        for (auto p : kPrimes) {
            Ctx ctx = ctx_p(p);
            Point O = Point::at_infinity();
            std::vector<Point> pts = ctx->curve().rational_points(kBound);
            Point R = pts.size() > 2 ? pts[2] : ctx->q();
            std::vector<Point> support = {O, ctx->q(), R};
            auto rand_div = [&](int span) {
                Divisor d;
                for (const Point& pt : support) {
                    int mult = (int)(rng() % (2 * span + 1)) - span;
                    if (mult != 0) d = d + Divisor::single(pt, mult);
                }
                return d;
            };
            for (int trial = 0; trial < 50; ++trial) {
                Bundle v = uni::make_Fr(ctx, 1 + (int)(rng() % 3));
                if (rng() % 2) v = cech::sym_power(uni::make_Fr(ctx, 2), 1 + (int)(rng() % 2));
                v = cech::twist_bundle(v, rand_div(2));
                if (rng() % 3 == 0) v = cech::tensor(v, uni::make_Fr(ctx, 2));
                if (rng() % 2) v = cech::dual(v);

                cech::CohomologyResult res = cech::cohomology(v);
                if (!res.stabilized) {
                    why = fmt("p=%lld trial %lld: not stabilized", p, trial);
                    return false;
                }
                if ((long long)res.h0 - (long long)res.h1 != (long long)cech::degree(v)) {
                    why = fmt("p=%lld trial %lld: chi != degree", p, trial);
                    return false;
                }
                cech::CohomologyResult at = cech::cohomology_at(v, res.level);
                cech::CohomologyResult at1 = cech::cohomology_at(v, res.level + 1);
                if (at.h0 != res.h0 || at.h1 != res.h1 || at1.h0 != res.h0 ||
                    at1.h1 != res.h1) {
                    why = fmt("p=%lld trial %lld: truncation N vs N+1 disagree", p, trial);
                    return false;
                }
                cech::CohomologyResult sd = cech::cohomology(cech::dual(v));
                if (sd.h0 != res.h1 || sd.h1 != res.h0) {
                    why = fmt("p=%lld trial %lld: duality mismatch", p, trial);
                    return false;
                }
            }
            // Filtration oracle for the symmetric powers: climb the chain of
            // structure-sheaf quotients, adding a section exactly when the
            // connecting class of the top quotient dies.  Wholly separate
            // from the direct kernel computation it is checked against.
            ruled::RuledSurface ns = ruled::nonsplit_surface(ctx);
            Bundle f2 = uni::make_Fr(ctx, 2);
            std::size_t climbed = 1;  // h0(O)
            for (int m = 1; m <= 2 * (int)p + 2; ++m) {
                Bundle sym = cech::sym_power(f2, m);
                Bundle sub = cech::sym_power(f2, m - 1);
                cech::Cochain top;
                for (std::size_t i = 0; i + 1 < sym.rank; ++i)
                    top.f.push_back(sym.entry(i, sym.rank - 1));
                if (cech::is_coboundary(sub, top)) ++climbed;
                std::size_t h0 = cech::cohomology(sym).h0;
                if (h0 != climbed || h0 != ruled::section_count(ns, m)) {
                    why = fmt("p=%lld m=%lld: filtration oracle disagrees", p, m);
                    return false;
                }
                // Summand counting cross-checks the small range cheaply.
                if (m <= (int)p + 1 && uni::decomposition_type(sym).size() != h0) {
                    why = fmt("p=%lld m=%lld: summand count disagrees", p, m);
                    return false;
                }
            }
        }
        return true;
    });

    gate.criterion(8, "Frobenius pullback splits exactly over supersingular curves",
                   [&](std::string& why) {
        struct CurveSpec {
            std::int64_t p, a1, a2, a3, a4, a6;
        };
        const std::vector<CurveSpec> curves = {
            {2, 0, 0, 1, 0, 0}, {2, 0, 0, 1, 1, 0}, {2, 1, 0, 0, 0, 1}, {2, 1, 1, 0, 0, 1},
            {3, 0, 0, 0, 2, 0}, {3, 0, 0, 0, 1, 1}, {3, 0, 1, 0, 0, 1}, {3, 0, 2, 0, 0, 1},
            {5, 0, 0, 0, 0, 1}, {5, 0, 0, 0, 0, 2}, {5, 0, 0, 0, 1, 1}, {5, 0, 0, 0, 1, 0},
        };
        std::map<std::int64_t, int> ss_count, ord_count;
        for (const auto& cs : curves) {
            WeierstrassCurve c = WeierstrassCurve::from_ints(
                FiniteField::create((std::uint32_t)cs.p, 1), cs.a1, cs.a2, cs.a3, cs.a4,
                cs.a6);
            bool ss = c.is_supersingular(kBound);
            Ctx ctx = CoverContext::make(c);
            bool split =
                cech::cohomology(cech::frobenius_pullback(uni::make_Fr(ctx, 2))).h0 == 2;
            if (split != ss) {
                why = fmt("p=%lld curve a6=%lld: split/supersingular mismatch", cs.p,
                          cs.a6);
                return false;
            }
            (ss ? ss_count : ord_count)[cs.p]++;
        }
        for (auto p : kPrimes)
            if (ss_count[p] < 1 || ord_count[p] < 1 || ss_count[p] + ord_count[p] < 4) {
                why = fmt("p=%lld: curve mix too thin", p);
                return false;
            }
        return true;
    });

    gate.criterion(9, "pair checker verdicts and blow-up discrepancies stay exact",
                   [&](std::string& why) {
        using snc::Rational;
        auto make_pair = [](int n, Rational coeff, Rational mult) {
            snc::StratifiedPair p;
            p.dimension = n;
            p.divisors = {"A", "B"};
            p.strata.push_back({{0}, n - 1, false, mult, false});
            p.strata.push_back({{1}, n - 1, false, mult, false});
            p.strata.push_back({{0, 1}, n - 2, false, mult, false});
            p.delta.push_back({"Delta", coeff});
            return p;
        };
        if (snc::check_condition(make_pair(3, Rational(1, 2), Rational(1, 2))) !=
            snc::Verdict::dlt) {
            why = "half-coefficient pair not dlt";
            return false;
        }
        if (snc::check_condition(make_pair(3, Rational(1), Rational(1))) !=
            snc::Verdict::lc) {
            why = "boundary pair not lc";
            return false;
        }
        if (snc::check_condition(make_pair(3, Rational(3, 2), Rational(3, 2))) !=
            snc::Verdict::condition_violated) {
            why = "overweight pair not flagged";
            return false;
        }

        std::mt19937 rng(414213);
        const Rational deltas[] = {Rational(0), Rational(1, 4), Rational(1, 2),
                                   Rational(3, 4), Rational(1)};
        Rational minus_one(-1);
        for (int n = 2; n <= 4; ++n) {
            for (Rational start : {Rational(1, 2), Rational(1)}) {
                for (int trial = 0; trial < 40; ++trial) {
                    snc::StratifiedPair cur = make_pair(n, Rational(1, 2), start);
                    for (int depth = 0; depth < 4; ++depth) {
                        std::vector<int> through;
                        for (int i = 0; i < (int)cur.divisors.size(); ++i)
                            if (rng() % 3 == 0) through.push_back(i);
                        if ((int)through.size() > n) through.resize(n);
                        Rational d = ((int)through.size() == n) ? Rational(0)
                                                                : deltas[rng() % 5];
                        snc::PointDatum x{through, d};
                        snc::StratifiedPair next;
                        try {
                            next = snc::blowup_step(cur, x);
                        } catch (const ConfigError&) {
                            continue;
                        }
                        Rational a = snc::discrepancy_first_blowup(cur, x);
                        if (a < minus_one) {
                            why = fmt("n=%lld depth=%lld: discrepancy below -1", n, depth);
                            return false;
                        }
                        // Strictly interior centers must stay strictly above -1.
                        if ((int)through.size() < n && d < Rational(1) && !(a > minus_one)) {
                            why = fmt("n=%lld depth=%lld: strict center hit -1", n, depth);
                            return false;
                        }
                        cur = next;
                    }
                }
            }
        }
        return true;
    });

    gate.criterion(10, "the built-in cone-family configuration is dlt on every fiber",
                   [&](std::string& why) {
        for (auto p : kPrimes) {
            Ctx ctx = ctx_p(p);
            for (int mbar : {1, 2}) {
                family::FamilyConfig fam = family::make_family(ctx, mbar);
                snc::FamilyPair fp = snc::paper_config(fam, family::make_cone(fam));
                for (const auto& fv : snc::family_check(fp))
                    if (fv.verdict != snc::Verdict::dlt) {
                        why = fmt("p=%lld mbar=%lld: fiber not dlt", p, mbar);
                        return false;
                    }
            }
        }
        return true;
    });

    std::printf("%d/%d criteria passed\n", gate.passed, gate.total);
    return gate.passed == gate.total ? 0 : 1;
}
