#include "charp/degeneration.hpp"

#include <algorithm>
#include <utility>

namespace charp {
namespace family {

namespace {

using ec::CurveFunction;
using ec::Divisor;
using ec::Point;
using gf::Field;
using gf::FqPoly;

void require_step(const FamilyConfig& cfg, int m) {
    long long step = cfg.coeff_den();
    if (m <= 0 || m % step != 0)
        throw ConfigError("plurigenus index must be a positive multiple of mbar*p");
}

// Dense matrix over Fq[t].  Row and column operations are unimodular, so
// both the generic rank and the rank at t = 0 survive to the diagonal.
struct PolyMat {
    Field f;
    std::size_t rows, cols;
    std::vector<FqPoly> e;

    PolyMat(const Field& field, std::size_t r, std::size_t c)
        : f(field), rows(r), cols(c), e(r * c, FqPoly::zero(field)) {}

    FqPoly& at(std::size_t i, std::size_t j) { return e[i * cols + j]; }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols; ++j) std::swap(at(a, j), at(b, j));
    }
    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < rows; ++i) std::swap(at(i, a), at(i, b));
    }
};

// Diagonalize by row/column reduction with minimal-degree pivots, then
// restore the divisibility chain by pairwise gcd/lcm on the diagonal.
std::vector<FqPoly> smith_diagonal(PolyMat m) {
    std::size_t r0 = 0;
    std::size_t lim = std::min(m.rows, m.cols);
    while (r0 < lim) {
        std::size_t bi = r0, bj = r0;
        int bd = -1;
        for (std::size_t i = r0; i < m.rows && bd != 0; ++i)
            for (std::size_t j = r0; j < m.cols; ++j) {
                const FqPoly& p = m.at(i, j);
                if (p.is_zero()) continue;
                if (bd < 0 || p.degree() < bd) {
                    bd = p.degree();
                    bi = i;
                    bj = j;
                    if (bd == 0) break;
                }
            }
        if (bd < 0) break;
        m.swap_rows(r0, bi);
        m.swap_cols(r0, bj);
        bool dirty = true;
        while (dirty) {
            dirty = false;
            for (std::size_t i = r0 + 1; i < m.rows; ++i) {
                if (m.at(i, r0).is_zero()) continue;
                FqPoly q = FqPoly::zero(m.f), r = FqPoly::zero(m.f);
                FqPoly::divmod(m.at(i, r0), m.at(r0, r0), q, r);
                if (!q.is_zero())
                    for (std::size_t j = r0; j < m.cols; ++j) {
                        if (m.at(r0, j).is_zero()) continue;
                        m.at(i, j) = m.at(i, j) - q * m.at(r0, j);
                    }
                if (!m.at(i, r0).is_zero()) {
                    // remainder of lower degree than the pivot: promote it
                    m.swap_rows(i, r0);
                    dirty = true;
                }
            }
            for (std::size_t j = r0 + 1; j < m.cols; ++j) {
                if (m.at(r0, j).is_zero()) continue;
                FqPoly q = FqPoly::zero(m.f), r = FqPoly::zero(m.f);
                FqPoly::divmod(m.at(r0, j), m.at(r0, r0), q, r);
                if (!q.is_zero())
                    for (std::size_t i = r0; i < m.rows; ++i) {
                        if (m.at(i, r0).is_zero()) continue;
                        m.at(i, j) = m.at(i, j) - q * m.at(i, r0);
                    }
                if (!m.at(r0, j).is_zero()) {
                    m.swap_cols(j, r0);
                    dirty = true;
                }
            }
        }
        ++r0;
    }
    std::vector<FqPoly> d;
    d.reserve(r0);
    for (std::size_t k = 0; k < r0; ++k) d.push_back(m.at(k, k).monic());
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t i = 0; i + 1 < d.size(); ++i)
            for (std::size_t j = i + 1; j < d.size(); ++j) {
                FqPoly g = FqPoly::gcd(d[i], d[j]);
                if (g == d[i]) continue;
                FqPoly q = FqPoly::zero(m.f), r = FqPoly::zero(m.f);
                FqPoly::divmod(d[i] * d[j], g, q, r);
                d[i] = g;
                d[j] = q.monic();
                moved = true;
            }
    }
    return d;
}

}  // namespace

FamilyConfig make_family(Ctx ctx, int mbar) {
    if (mbar < 1) throw ConfigError("mbar must be at least 1");
    FamilyConfig cfg;
    cfg.split = ruled::split_surface(ctx);
    cfg.nonsplit = ruled::nonsplit_surface(ctx);
    cfg.p = static_cast<std::uint32_t>(ctx->curve().field()->p());
    cfg.mbar = mbar;
    return cfg;
}

ConeModel make_cone(const FamilyConfig& cfg, int ample_degree) {
    (void)cfg;
    if (ample_degree < 1) throw ConfigError("ample degree must be at least 1");
    return ConeModel{ample_degree};
}

std::size_t surface_plurigenus(const FamilyConfig& cfg, int m) {
    require_step(cfg, m);
    return ruled::section_count(cfg.surface(), m);
}

std::size_t threefold_plurigenus(const ConeModel& cone, const FamilyConfig& cfg, int m) {
    require_step(cfg, m);
    std::size_t total = surface_plurigenus(cfg, m);
    for (int r = 1; r <= m; ++r)
        total += static_cast<std::size_t>(m + r + 1) * r * cone.ample_degree;
    return total;
}

PlurigeneraTable plurigenera_table(const FamilyConfig& cfg, const ConeModel& cone, int m_max) {
    PlurigeneraTable tab;
    tab.p = cfg.p;
    tab.mbar = cfg.mbar;
    tab.ample_degree = cone.ample_degree;
    int step = static_cast<int>(cfg.coeff_den());
    if (m_max < step) throw ConfigError("empty plurigenus range");
    for (int m = step; m <= m_max; m += step) {
        PlurigeneraRow row;
        row.m = m;
        row.surface_zero = surface_plurigenus(cfg.at(Fiber::zero), m);
        row.surface_generic = surface_plurigenus(cfg.at(Fiber::generic), m);
        if (row.surface_zero < row.surface_generic)
            throw EngineError("plurigenus dropped at the special fiber");
        row.surface_jump = row.surface_zero - row.surface_generic;
        row.threefold_zero = threefold_plurigenus(cone, cfg.at(Fiber::zero), m);
        row.threefold_generic = threefold_plurigenus(cone, cfg.at(Fiber::generic), m);
        row.threefold_jump = row.threefold_zero - row.threefold_generic;
        tab.rows.push_back(row);
    }
    return tab;
}

ParametricRanks parametric_cohomology(const FamilyConfig& cfg, int m) {
    if (m < 0 || m > 2 * static_cast<int>(cfg.p) + 2)
        throw ConfigError("parametric range is 0 <= m <= 2p + 2");
    Ctx ctx = cfg.nonsplit.ctx;
    const Field& f = ctx->curve().field();
    Point o = Point::at_infinity();

    // The generic member fixes both the truncation level and the pole
    // window; the split member's level is maxed in for the t = 0 read.
    cech::Bundle sym = cech::sym_power(cfg.nonsplit.fiber_bundle, m);
    int level = cech::cohomology(sym).level;
    level = std::max(level, cech::cohomology(cech::trivial_bundle(ctx, sym.rank)).level);
    int ct = 0;
    for (const CurveFunction& e : sym.t) {
        if (e.is_zero()) continue;
        ct = std::max(ct, -std::min(0, ec::order_at_infinity(e)));
        ct = std::max(ct, e.pole_order_at(ctx->q()));
    }

    auto l1 = ctx->l_space(Divisor::single(o, level));
    auto l2 = ctx->l_space(Divisor::single(ctx->q(), level));
    auto lw = ctx->l_space(Divisor::single(o, level + ct) + Divisor::single(ctx->q(), level + ct));
    std::size_t rk = sym.rank;
    std::size_t d1 = l1->dim(), d2 = l2->dim(), dw = lw->dim();

    std::vector<FqPoly> tpow;
    tpow.push_back(FqPoly::constant(f, f->one()));
    for (int d = 1; d <= m; ++d) tpow.push_back(tpow.back() * FqPoly::x(f));

    // d(f1, f2) = f2 - T(t) f1 read in the window basis; the entry of
    // Sym^m T over block (i, j) carries t^(j-i).
    PolyMat mat(f, rk * dw, rk * (d1 + d2));
    for (std::size_t j = 0; j < rk; ++j)
        for (std::size_t k = 0; k < d1; ++k) {
            std::size_t col = j * d1 + k;
            for (std::size_t i = 0; i <= j; ++i) {
                const CurveFunction& e = sym.entry(i, j);
                if (e.is_zero()) continue;
                auto v = lw->to_coords(e * l1->function(k));
                if (!v) throw EngineError("transition image escaped the window");
                const FqPoly& tp = tpow[j - i];
                for (std::size_t r = 0; r < dw; ++r)
                    if ((*v)[r]) mat.at(i * dw + r, col) = tp.scaled(f->neg((*v)[r]));
            }
        }
    for (std::size_t i = 0; i < rk; ++i)
        for (std::size_t k = 0; k < d2; ++k) {
            std::size_t col = rk * d1 + i * d2 + k;
            auto v = lw->to_coords(l2->function(k));
            if (!v) throw EngineError("chart-2 basis escaped the window");
            for (std::size_t r = 0; r < dw; ++r)
                if ((*v)[r]) mat.at(i * dw + r, col) = FqPoly::constant(f, (*v)[r]);
        }

    std::size_t cols = mat.cols;
    std::vector<FqPoly> diag = smith_diagonal(std::move(mat));
    std::size_t at_zero = 0;
    for (const FqPoly& d : diag)
        if (d.coeff(0) != 0) ++at_zero;

    ParametricRanks out;
    out.generic_rank = cols - diag.size();
    out.special_rank = cols - at_zero;
    out.level = level;
    return out;
}

NonCmCertificate non_cm_certificate(const FamilyConfig& cfg) {
    NonCmCertificate cert;
    // t = 0: the fibration to P^1 is the projection of a product, every
    // fiber the reduced elliptic curve, so R^1 is a line bundle.
    cert.at_zero.h1_observed = cech::cohomology(cech::trivial_bundle(cfg.split.ctx, 1)).h1;
    cert.at_zero.torsion_free_value = 1;
    cert.at_zero.cm = cert.at_zero.h1_observed == cert.at_zero.torsion_free_value;
    // t != 0: the p-fold thickening of the section is a fiber of the
    // pencil fibration; torsion-free R^1 of generic rank 1 would force
    // h^1 = 1 there.
    cert.at_generic.h1_observed = ruled::thickened_section_h1(cfg.nonsplit, static_cast<int>(cfg.p));
    cert.at_generic.torsion_free_value = 1;
    cert.at_generic.cm = cert.at_generic.h1_observed <= cert.at_generic.torsion_free_value;
    cert.h1_first_thickening = ruled::thickened_section_h1(cfg.nonsplit, 1);
    return cert;
}

}  // namespace family
}  // namespace charp
