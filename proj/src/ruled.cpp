#include "charp/ruled.hpp"

#include <algorithm>

namespace charp {
namespace ruled {

using cech::KMatrix;
using cech::Section;
using ec::Point;
using ec::WeierstrassCurve;
using gf::Field;
using gf::FieldEmbedding;
using gf::FiniteField;
using gf::FqPoly;

namespace {

Bundle sub_line_quotient(const Bundle& b) {
    // b upper unitriangular: drop the invariant first basis vector.
    std::size_t r = b.rank;
    if (r < 2) throw EngineError("quotient of a rank <= 1 bundle");
    std::vector<CurveFunction> e;
    e.reserve((r - 1) * (r - 1));
    for (std::size_t i = 1; i < r; ++i)
        for (std::size_t j = 1; j < r; ++j) e.push_back(b.entry(i, j));
    return cech::make_bundle(b.ctx, r - 1, std::move(e), b.twist);
}

// Frame reversal e_i -> e_{r-1-i}; turns lower unitriangular transitions
// into upper ones without changing the isomorphism class.
Bundle reverse_frame(const Bundle& b) {
    std::size_t r = b.rank;
    std::vector<CurveFunction> e;
    e.reserve(r * r);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) e.push_back(b.entry(r - 1 - i, r - 1 - j));
    return cech::make_bundle(b.ctx, r, std::move(e), b.twist);
}

CurveFunction embed_fn(const FieldEmbedding& em, const WeierstrassCurve& tgt,
                       const CurveFunction& f) {
    auto mp = [&](const FqPoly& p) {
        std::vector<std::uint32_t> c;
        for (int i = 0; i <= p.degree(); ++i) c.push_back(em.map(p.coeff(i)));
        return FqPoly(tgt.field(), std::move(c));
    };
    return CurveFunction(tgt, mp(f.u()), mp(f.v()), mp(f.r()));
}

// Resultant of two degree-m fiber forms with function coefficients,
// coefficient i belonging to u^(m-i) v^i.
CurveFunction sylvester_resultant(const WeierstrassCurve& c, int m,
                                  const std::vector<CurveFunction>& a,
                                  const std::vector<CurveFunction>& b) {
    std::size_t n = 2 * static_cast<std::size_t>(m);
    KMatrix s(c, n, n);
    for (std::size_t row = 0; row < static_cast<std::size_t>(m); ++row)
        for (std::size_t k = 0; k <= static_cast<std::size_t>(m); ++k) {
            s.set(row, row + k, a[k]);
            s.set(static_cast<std::size_t>(m) + row, row + k, b[k]);
        }
    return s.det();
}

bool is_constant_fn(const CurveFunction& f, std::uint32_t* value) {
    if (f.is_zero()) {
        if (value) *value = 0;
        return true;
    }
    if (!f.v().is_zero() || f.u().degree() > 0 || f.r().degree() > 0) return false;
    if (value) *value = f.u().coeff(0);
    return true;
}

PencilCheck run_pencil(const RuledSurface& s, int m, const std::vector<CurveFunction>& a1,
                       const std::vector<CurveFunction>& a2,
                       const std::vector<CurveFunction>* b1,
                       const std::vector<CurveFunction>* b2) {
    if (m < 1) throw ConfigError("pencil check needs m >= 1");
    const WeierstrassCurve& c = s.ctx->curve();
    PencilCheck out;

    CurveFunction res = sylvester_resultant(c, m, a1, a2);
    std::uint32_t val = 0;
    out.resultant_constant = is_constant_fn(res, &val);
    if (out.resultant_constant && b1 && b2) {
        // Genuine sections: the chart-2 resultant must agree globally.
        CurveFunction res2 = sylvester_resultant(c, m, *b1, *b2);
        if (!(res2 == res)) out.resultant_constant = false;
    }
    if (out.resultant_constant) {
        out.resultant = val;
        out.base_point_free = val != 0;
    } else {
        // A nonconstant resultant vanishes somewhere on the curve.
        out.base_point_free = false;
    }

    // Pointwise cross-check over small extensions: a common fiber root at a
    // sampled point contradicts base_point_free.
    const Field& F = c.field();
    int d = 1;
    std::uint64_t sz = F->q();
    while (d < 4 && sz * F->q() <= 64) {
        ++d;
        sz *= F->q();
    }
    out.sample_extension = d;
    for (int e = 1; e <= d; ++e) {
        WeierstrassCurve cx = c;
        std::vector<CurveFunction> fa = a1, fb = a2;
        if (e > 1) {
            Field ext = FiniteField::create(F->p(), F->degree() * e);
            FieldEmbedding em(F, ext);
            cx = c.base_change(em);
            fa.clear();
            fb.clear();
            for (const auto& f : a1) fa.push_back(embed_fn(em, cx, f));
            for (const auto& f : a2) fb.push_back(embed_fn(em, cx, f));
        }
        const Field& K = cx.field();
        for (const auto& pt : cx.rational_points(1u << 20)) {
            bool usable = !pt.infinity;
            std::vector<std::uint32_t> ca, cb;
            if (usable) {
                auto value_at = [&](const CurveFunction& g) -> std::optional<std::uint32_t> {
                    if (g.is_zero()) return 0u;
                    if (g.pole_order_at(pt) > 0) return std::nullopt;
                    return g.eval(pt);
                };
                for (int k = 0; k <= m; ++k) {
                    auto v1 = value_at(fa[static_cast<std::size_t>(k)]);
                    auto v2 = value_at(fb[static_cast<std::size_t>(k)]);
                    if (!v1 || !v2) {
                        usable = false;
                        break;
                    }
                    ca.push_back(*v1);
                    cb.push_back(*v2);
                }
            }
            if (!usable && pt.infinity && b1 && b2) {
                // At O only the chart-2 components are regular.
                usable = true;
                // Value at O: zero past the degree balance, else the leading
                // coefficient ratio (denominators are monic).
                auto value_at_o = [&](const CurveFunction& g) -> std::optional<std::uint32_t> {
                    if (g.is_zero()) return 0u;
                    int o = ec::order_at_infinity(g);
                    if (o < 0) return std::nullopt;
                    if (o > 0) return 0u;
                    return g.u().coeff(g.u().degree());
                };
                if (e > 1) usable = false;
                for (int k = 0; usable && k <= m; ++k) {
                    auto v1 = value_at_o((*b1)[static_cast<std::size_t>(k)]);
                    auto v2 = value_at_o((*b2)[static_cast<std::size_t>(k)]);
                    if (!v1 || !v2) {
                        usable = false;
                        break;
                    }
                    ca.push_back(*v1);
                    cb.push_back(*v2);
                }
            }
            if (!usable) continue;
            // Shared projective root: common root of the dehomogenized
            // polynomials, or a simultaneous degree drop (root at [1:0]).
            FqPoly pa(K, std::vector<std::uint32_t>(ca.rbegin(), ca.rend()));
            FqPoly pb(K, std::vector<std::uint32_t>(cb.rbegin(), cb.rend()));
            bool common;
            if (pa.is_zero() || pb.is_zero())
                common = true;
            else
                common = FqPoly::gcd(pa, pb).degree() >= 1 || (ca[0] == 0 && cb[0] == 0);
            if (common && out.base_point_free) out.samples_agree = false;
        }
    }
    return out;
}

}  // namespace

RuledSurface split_surface(Ctx ctx) {
    Bundle f = cech::trivial_bundle(ctx, 2);
    return RuledSurface{std::move(ctx), true, std::move(f)};
}

RuledSurface nonsplit_surface(Ctx ctx) {
    Bundle f = uni::make_Fr(ctx, 2);
    return RuledSurface{std::move(ctx), false, std::move(f)};
}

Bundle pushforward(const RuledSurface& s, int m, const Divisor& twist) {
    if (m < 0) throw ConfigError("pushforward needs m >= 0");
    Bundle b = cech::sym_power(s.fiber_bundle, m);
    if (!twist.coeffs().empty()) b = cech::twist_bundle(b, twist);
    return b;
}

std::size_t section_count(const RuledSurface& s, int m, const Divisor& twist) {
    return cech::cohomology(pushforward(s, m, twist)).h0;
}

std::size_t surface_h1(const RuledSurface& s, int m, const Divisor& twist) {
    // R^1 pi_* vanishes for m >= 0, so the Leray sequence degenerates.
    return cech::cohomology(pushforward(s, m, twist)).h1;
}

std::vector<int> pushforward_type(const RuledSurface& s, int m) {
    if (s.split_form) throw ConfigError("pushforward type applies to the nonsplit surface");
    const Field& F = s.ctx->curve().field();
    int p = static_cast<int>(F->p());
    if (m < 0 || m > 2 * p + 2) throw ConfigError("pushforward type needs 0 <= m <= 2p + 2");
    return uni::decomposition_type(pushforward(s, m));
}

Bundle thickening_pushforward(const RuledSurface& s, int k) {
    if (k < 1) throw ConfigError("thickening needs k >= 1");
    return sub_line_quotient(cech::sym_power(s.fiber_bundle, k));
}

std::size_t thickened_section_h1(const RuledSurface& s, int k) {
    return cech::cohomology(thickening_pushforward(s, k)).h1;
}

Bundle r1_pushforward_negative(const RuledSurface& s, int b) {
    if (b < 2) throw ConfigError("R^1 formula needs b >= 2");
    Bundle fd = reverse_frame(cech::dual(s.fiber_bundle));
    Bundle out = cech::sym_power(fd, b - 2);
    // det F is trivial for both surface kinds, so no further twist.
    CurveFunction det =
        KMatrix::from_entries(s.ctx->curve(), 2, 2,
                              {s.fiber_bundle.entry(0, 0), s.fiber_bundle.entry(0, 1),
                               s.fiber_bundle.entry(1, 0), s.fiber_bundle.entry(1, 1)})
            .det();
    if (!(det == CurveFunction::one(s.ctx->curve())))
        throw EngineError("fiber bundle determinant is not trivialized");
    return out;
}

PencilCheck pencil_basepoint_check(const RuledSurface& s, int m) {
    Bundle pf = pushforward(s, m);
    std::vector<Section> secs = cech::h0_sections(pf);
    if (secs.size() != 2) throw ConfigError("pencil check needs a 2-dimensional system");
    return run_pencil(s, m, secs[0].f1, secs[1].f1, &secs[0].f2, &secs[1].f2);
}

PencilCheck pencil_pair_check(const RuledSurface& s, int m,
                              const std::vector<CurveFunction>& s1,
                              const std::vector<CurveFunction>& s2) {
    if (s1.size() != static_cast<std::size_t>(m) + 1 ||
        s2.size() != static_cast<std::size_t>(m) + 1)
        throw ConfigError("fiber form needs m + 1 coefficients");
    return run_pencil(s, m, s1, s2, nullptr, nullptr);
}

}  // namespace ruled
}  // namespace charp
