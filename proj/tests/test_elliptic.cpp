#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "charp/elliptic.hpp"

using namespace charp;
using namespace charp::ec;
using gf::Field;
using gf::FiniteField;
using gf::FqPoly;

namespace {

constexpr std::uint64_t kBound = 1u << 20;

WeierstrassCurve curve(std::int64_t p, int n, std::int64_t a1, std::int64_t a2,
                       std::int64_t a3, std::int64_t a4, std::int64_t a6) {
    return WeierstrassCurve::from_ints(FiniteField::create(p, n), a1, a2, a3, a4, a6);
}

// All rational points where f can fail to be regular or where D sits.
std::vector<Point> support_candidates(const WeierstrassCurve& c, const Divisor& d,
                                      const CurveFunction& f) {
    std::set<Point> s;
    s.insert(Point::at_infinity());
    for (const auto& [p, m] : d.coeffs()) {
        (void)m;
        s.insert(p);
    }
    for (const Point& p : c.rational_points(kBound))
        if (!p.infinity && f.r().eval(p.x) == 0) s.insert(p);
    return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("point counts over small fields") {
    CHECK(curve(2, 1, 0, 0, 1, 0, 0).rational_points(kBound).size() == 3);  // y^2+y=x^3
    CHECK(curve(2, 1, 1, 0, 0, 0, 1).rational_points(kBound).size() == 4);  // y^2+xy=x^3+1
    CHECK(curve(3, 1, 0, 0, 0, 1, 0).rational_points(kBound).size() == 4);  // y^2=x^3+x
    CHECK(curve(2, 1, 0, 0, 1, 0, 0).count_points(1, kBound) == 3);
}

TEST_CASE("group table on a three point curve") {
    WeierstrassCurve c = curve(2, 1, 0, 0, 1, 0, 0);
    Point O = Point::at_infinity(), P = Point::affine(0, 0), Q = Point::affine(0, 1);
    CHECK(c.negate(P) == Q);
    CHECK(c.add(O, P) == P);
    CHECK(c.add(P, O) == P);
    CHECK(c.add(P, P) == Q);
    CHECK(c.add(P, Q) == O);
    CHECK(c.add(Q, Q) == P);
    CHECK(c.mul(3, P) == O);
    CHECK(c.mul(-1, P) == Q);
}

TEST_CASE("group axioms exhaustively on small curves") {
    std::vector<WeierstrassCurve> curves;
    curves.push_back(curve(2, 1, 0, 0, 1, 0, 0));
    curves.push_back(curve(2, 1, 1, 0, 0, 0, 1));
    curves.push_back(curve(3, 1, 0, 0, 0, 1, 0));
    curves.push_back(curve(3, 1, 0, 1, 0, 0, 1));
    curves.push_back(curve(5, 1, 0, 0, 0, 1, 1));
    {
        Field f2 = FiniteField::create(2, 1);
        Field f4 = FiniteField::create(2, 2);
        gf::FieldEmbedding e(f2, f4);
        curves.push_back(curve(2, 1, 0, 0, 1, 0, 0).base_change(e));
    }
    for (const auto& c : curves) {
        auto pts = c.rational_points(kBound);
        for (const Point& p : pts) {
            CHECK(c.on_curve(p));
            CHECK(c.add(p, c.negate(p)) == Point::at_infinity());
            CHECK(c.add(Point::at_infinity(), p) == p);
        }
        for (const Point& p : pts)
            for (const Point& q : pts) {
                Point s = c.add(p, q);
                CHECK(c.on_curve(s));
                CHECK(s == c.add(q, p));
            }
        for (const Point& p : pts)
            for (const Point& q : pts)
                for (const Point& r : pts)
                    CHECK(c.add(c.add(p, q), r) == c.add(p, c.add(q, r)));
        auto n = static_cast<std::int64_t>(pts.size());
        for (const Point& p : pts) CHECK(c.mul(n, p) == Point::at_infinity());
    }
}

TEST_CASE("extension counts follow the zeta recursion") {
    // N_e = q^e + 1 - a_e with a_1 = a, a_2 = a^2 - 2q, a_3 = a^3 - 3qa.
    std::vector<WeierstrassCurve> curves;
    curves.push_back(curve(2, 1, 0, 0, 1, 0, 0));
    curves.push_back(curve(2, 1, 1, 0, 0, 0, 1));
    curves.push_back(curve(3, 1, 0, 0, 0, 1, 0));
    curves.push_back(curve(5, 1, 0, 0, 0, 1, 1));
    curves.push_back(curve(5, 1, 0, 0, 0, 0, 1));
    for (const auto& c : curves) {
        std::int64_t q = static_cast<std::int64_t>(c.field()->q());
        std::int64_t n1 = static_cast<std::int64_t>(c.count_points(1, kBound));
        std::int64_t a = q + 1 - n1;
        std::int64_t a2 = a * a - 2 * q;
        std::int64_t a3 = a * a * a - 3 * q * a;
        CHECK(c.count_points(2, kBound) == static_cast<std::uint64_t>(q * q + 1 - a2));
        CHECK(c.count_points(3, kBound) == static_cast<std::uint64_t>(q * q * q + 1 - a3));
    }
}

TEST_CASE("supersingularity criteria agree") {
    // Characteristic >= 5: the coefficient test must match the trace test.
    for (std::int64_t a4 = 0; a4 < 5; ++a4)
        for (std::int64_t a6 = 0; a6 < 5; ++a6) {
            Field f = FiniteField::create(5, 1);
            std::uint32_t disc;
            try {
                disc = curve(5, 1, 0, 0, 0, a4, a6).discriminant();
            } catch (const ConfigError&) {
                continue;
            }
            (void)disc;
            WeierstrassCurve c = curve(5, 1, 0, 0, 0, a4, a6);
            CHECK(c.supersingular_by_hasse_invariant() == c.supersingular_by_trace(kBound));
        }
    CHECK(curve(5, 1, 0, 0, 0, 0, 1).is_supersingular(kBound));       // y^2=x^3+1
    CHECK_FALSE(curve(5, 1, 0, 0, 0, 1, 1).is_supersingular(kBound));
    CHECK(curve(2, 1, 0, 0, 1, 0, 0).is_supersingular(kBound));       // y^2+y=x^3
    CHECK_FALSE(curve(2, 1, 1, 0, 0, 0, 1).is_supersingular(kBound));
    CHECK(curve(3, 1, 0, 0, 0, 2, 0).is_supersingular(kBound));       // y^2=x^3+2x
    CHECK_FALSE(curve(3, 1, 0, 1, 0, 0, 1).is_supersingular(kBound));
    // Supersingularity is a geometric property: stable under extension.
    {
        Field f5 = FiniteField::create(5, 1);
        Field f25 = FiniteField::create(5, 2);
        gf::FieldEmbedding e(f5, f25);
        WeierstrassCurve ss = curve(5, 1, 0, 0, 0, 0, 1).base_change(e);
        CHECK(ss.supersingular_by_hasse_invariant());
        CHECK(ss.supersingular_by_trace(kBound));
    }
}

TEST_CASE("discriminant and j-invariant") {
    CHECK(curve(5, 1, 0, 0, 0, 1, 0).j_invariant() ==
          FiniteField::create(5, 1)->from_int(1728));
    CHECK(curve(5, 1, 0, 0, 0, 0, 1).j_invariant() == 0);
    CHECK_THROWS_AS(curve(2, 1, 0, 0, 0, 0, 0), ConfigError);  // y^2 = x^3 is singular
    CHECK_THROWS_AS(curve(5, 1, 0, 0, 0, 0, 0), ConfigError);
}

TEST_CASE("frobenius isogeny lands on the target curve") {
    for (const auto& c : {curve(2, 2, 0, 0, 1, 0, 0), curve(3, 2, 0, 1, 0, 0, 1),
                          curve(5, 1, 0, 0, 0, 1, 1)}) {
        Isogeny fr = frobenius_isogeny(c);
        CHECK(fr.degree == c.field()->p());
        CHECK(fr.kind == Isogeny::Kind::RelativeFrobenius);
        for (const Point& p : fr.source.rational_points(kBound)) {
            Point im = fr.apply(p);
            CHECK(c.on_curve(im));
        }
        // Composite of two Frobenius maps has degree p^2.
        Isogeny fr2 = frobenius_isogeny(c, 2);
        CHECK(fr2.degree == c.field()->p() * c.field()->p());
        CHECK(fr2.kind == Isogeny::Kind::CompositeOfFrobenius);
    }
}

TEST_CASE("function field normal form and arithmetic") {
    for (const auto& c : {curve(2, 1, 0, 0, 1, 0, 0), curve(3, 1, 0, 0, 0, 1, 0),
                          curve(5, 1, 0, 0, 0, 1, 1), curve(2, 2, 1, 0, 0, 0, 1)}) {
        const Field& F = c.field();
        CurveFunction x = CurveFunction::coord_x(c);
        CurveFunction y = CurveFunction::coord_y(c);
        // The defining relation collapses to zero in normal form.
        CurveFunction rel = y * y;
        CurveFunction ylin_y =
            CurveFunction(c, FqPoly::zero(F), c.ylin(), FqPoly::constant(F, F->one()));
        CurveFunction cub =
            CurveFunction(c, c.cubic(), FqPoly::zero(F), FqPoly::constant(F, F->one()));
        CHECK((rel + ylin_y - cub).is_zero());
        // Inverses.
        std::mt19937 rng(7);
        for (int trial = 0; trial < 8; ++trial) {
            std::uniform_int_distribution<std::uint32_t> d(0, static_cast<std::uint32_t>(F->q() - 1));
            FqPoly u(F, {d(rng), d(rng), d(rng)});
            FqPoly v(F, {d(rng), d(rng)});
            FqPoly r(F, {d(rng), F->one()});
            CurveFunction f(c, u, v, r);
            if (f.is_zero()) continue;
            CHECK((f * f.inverse()) == CurveFunction::one(c));
        }
        // Field laws on a few elements.
        CurveFunction a = x * y + CurveFunction::one(c);
        CurveFunction b = x + y;
        CHECK((a * b) == (b * a));
        CHECK((a + b) == (b + a));
        CHECK(((a + b) * a) == (a * a + b * a));
        CHECK((a - a).is_zero());
    }
}

TEST_CASE("orders of coordinate functions") {
    for (const auto& c : {curve(5, 1, 0, 0, 0, 1, 0), curve(2, 1, 0, 0, 1, 0, 0),
                          curve(3, 1, 0, 0, 0, 1, 0), curve(3, 2, 0, 1, 0, 0, 1)}) {
        CurveFunction x = CurveFunction::coord_x(c);
        CurveFunction y = CurveFunction::coord_y(c);
        CHECK(x.order_at(Point::at_infinity()) == -2);
        CHECK(y.order_at(Point::at_infinity()) == -3);
        // div(x - x0) = P + (-P) - 2O; the affine part depends on the fiber.
        for (const Point& p : c.rational_points(kBound)) {
            if (p.infinity) continue;
            CurveFunction f = x - CurveFunction::constant(c, p.x);
            int expect = (p == c.negate(p)) ? 2 : 1;
            CHECK(f.order_at(p) == expect);
            CHECK(f.order_at(Point::at_infinity()) == -2);
            // y - y0 vanishes at p as well.
            CurveFunction g = y - CurveFunction::constant(c, p.y);
            CHECK(g.order_at(p) >= 1);
        }
    }
}

TEST_CASE("principal divisors have degree zero") {
    // Sum the orders of x - c over all points of the fiber, passing to an
    // extension where the fiber is rational.
    WeierstrassCurve c0 = curve(5, 1, 0, 0, 0, 1, 1);
    Field f5 = c0.field();
    Field f25 = FiniteField::create(5, 2);
    gf::FieldEmbedding e(f5, f25);
    WeierstrassCurve c = c0.base_change(e);
    CurveFunction x = CurveFunction::coord_x(c);
    for (std::uint32_t c0 = 0; c0 < 5; ++c0) {
        std::uint32_t cc = e.map(c0);
        CurveFunction f = x - CurveFunction::constant(c, cc);
        int total = f.order_at(Point::at_infinity());
        for (const Point& p : c.rational_points(kBound))
            if (!p.infinity && p.x == cc) total += f.order_at(p);
        CHECK(total == 0);
    }
}

TEST_CASE("local expansions satisfy the curve equation") {
    // Including a vertical tangent point, where the uniformizer is y - y0.
    WeierstrassCurve c = curve(5, 1, 0, 0, 0, 1, 0);
    const Field& F = c.field();
    Point vert = Point::affine(0, 0);  // 2-torsion
    REQUIRE(c.on_curve(vert));
    for (const Point& p : c.rational_points(kBound)) {
        if (p.infinity) continue;
        int prec = 9;
        LocalExpansion le(c, p, prec);
        const auto& xs = le.x_series();
        const auto& ys = le.y_series();
        // W(x(t), y(t)) must vanish to full precision.
        auto mul = [&](const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
            std::vector<std::uint32_t> out(prec, 0u);
            for (int i = 0; i < prec; ++i)
                for (int j = 0; i + j < prec; ++j)
                    out[i + j] = F->add(out[i + j], F->mul(a[i], b[j]));
            return out;
        };
        auto x2 = mul(xs, xs);
        auto x3 = mul(x2, xs);
        auto y2 = mul(ys, ys);
        for (int i = 0; i < prec; ++i) {
            std::uint32_t w = F->add(y2[i], F->mul(c.a1(), mul(xs, ys)[i]));
            w = F->add(w, F->mul(c.a3(), ys[i]));
            w = F->sub(w, x3[i]);
            w = F->sub(w, F->mul(c.a2(), x2[i]));
            w = F->sub(w, F->mul(c.a4(), xs[i]));
            if (i == 0) w = F->sub(w, c.a6());
            CHECK(w == 0);
        }
        // The uniformizer has order 1.
        CurveFunction x = CurveFunction::coord_x(c);
        CurveFunction y = CurveFunction::coord_y(c);
        CurveFunction tx = x - CurveFunction::constant(c, p.x);
        CurveFunction ty = y - CurveFunction::constant(c, p.y);
        int o = std::min(le.order(tx), le.order(ty));
        CHECK(o == 1);
    }
}

TEST_CASE("spaces of multiples of the origin") {
    for (const auto& c : {curve(2, 1, 0, 0, 1, 0, 0), curve(5, 1, 0, 0, 0, 1, 1)}) {
        for (int d = 0; d <= 7; ++d) {
            LSpace L(c, Divisor::single(Point::at_infinity(), d));
            CHECK(L.dim() == (d == 0 ? 1 : static_cast<std::size_t>(d)));
            for (std::size_t k = 0; k < L.dim(); ++k)
                CHECK(order_at_infinity(L.function(k)) >= -d);
        }
        LSpace empty(c, Divisor::single(Point::at_infinity(), -1));
        CHECK(empty.dim() == 0);
    }
}

TEST_CASE("Riemann-Roch dimensions for general divisors") {
    std::mt19937 rng(2026);
    for (const auto& c : {curve(3, 2, 0, 0, 0, 1, 0), curve(5, 1, 0, 0, 0, 1, 1),
                          curve(2, 2, 0, 0, 1, 0, 0)}) {
        auto pts = c.rational_points(kBound);
        std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
        std::uniform_int_distribution<int> mdist(-2, 3);
        for (int trial = 0; trial < 25; ++trial) {
            Divisor d;
            for (int j = 0; j < 3; ++j) d.add(pts[pick(rng)], mdist(rng));
            int deg = d.degree();
            if (deg > 8) continue;
            LSpace L(c, d);
            if (deg < 0) {
                CHECK(L.dim() == 0);
            } else if (deg >= 1) {
                CHECK(L.dim() == static_cast<std::size_t>(deg));
            } else {
                CHECK(L.dim() <= 1);
            }
            // Every basis element satisfies div(f) + D >= 0 wherever it can fail.
            for (std::size_t k = 0; k < L.dim(); ++k) {
                const CurveFunction& f = L.function(k);
                CHECK_FALSE(f.is_zero());
                for (const Point& p : support_candidates(c, d, f))
                    CHECK(f.order_at(p) >= -d.mult(p));
            }
            // Basis is linearly independent: coordinates round-trip.
            if (L.dim() > 0) {
                std::uniform_int_distribution<std::uint32_t> cd(
                    0, static_cast<std::uint32_t>(c.field()->q() - 1));
                std::vector<std::uint32_t> coords(L.dim());
                for (auto& v : coords) v = cd(rng);
                CurveFunction f = L.from_coords(coords);
                auto back = L.to_coords(f);
                REQUIRE(back.has_value());
                CHECK(*back == coords);
            }
        }
    }
}

TEST_CASE("expression operator rejects functions outside the space") {
    WeierstrassCurve c = curve(5, 1, 0, 0, 0, 1, 1);
    LSpace L(c, Divisor::single(Point::at_infinity(), 4));
    CurveFunction x = CurveFunction::coord_x(c);
    CurveFunction y = CurveFunction::coord_y(c);
    CHECK(L.to_coords(x).has_value());
    CHECK(L.to_coords(x * x).has_value());
    CHECK(L.to_coords(y).has_value());
    CHECK_FALSE(L.to_coords(x * y).has_value());      // pole order 5
    CHECK_FALSE(L.to_coords(x.inverse()).has_value());  // pole away from O
    // Shifted space: allow a pole at an affine point.
    Point q = c.smallest_affine_point();
    Divisor d = Divisor::single(Point::at_infinity(), 2) + Divisor::single(q, 1);
    LSpace Ls(c, d);
    CHECK(Ls.dim() == 3);
    bool found_affine_pole = false;
    for (std::size_t k = 0; k < Ls.dim(); ++k)
        if (Ls.function(k).order_at(q) < 0) found_affine_pole = true;
    CHECK(found_affine_pole);
}

TEST_CASE("dimension of L(D) is stable under base change") {
    WeierstrassCurve c = curve(2, 1, 0, 0, 1, 0, 0);
    Field f2 = c.field();
    Field f16 = FiniteField::create(2, 4);
    gf::FieldEmbedding e(f2, f16);
    WeierstrassCurve cx = c.base_change(e);
    Point q = c.smallest_affine_point();
    Point qx = Point::affine(e.map(q.x), e.map(q.y));
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; b <= 2; ++b) {
            Divisor d = Divisor::single(Point::at_infinity(), a) + Divisor::single(q, b);
            Divisor dx = Divisor::single(Point::at_infinity(), a) + Divisor::single(qx, b);
            CHECK(LSpace(c, d).dim() == LSpace(cx, dx).dim());
        }
}

TEST_CASE("enumeration bound is enforced") {
    WeierstrassCurve c = curve(2, 1, 0, 0, 1, 0, 0);
    CHECK_THROWS_AS(c.rational_points(1), BoundExceeded);
    CHECK_THROWS_AS(c.count_points(25, kBound), BoundExceeded);
}
