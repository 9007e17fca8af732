#include "charp/cech.hpp"

#include <algorithm>
#include <sstream>

namespace charp {
namespace cech {

using gf::Field;
using gf::FqMatrix;
using gf::FqPoly;

namespace {

constexpr int kLevelCap = 4096;

Divisor with_coeff(const Divisor& d, const Point& p, int v) {
    Divisor out = d;
    out.add(p, v - out.mult(p));
    return out;
}

}  // namespace

// Per-level truncation data.  `image` holds a row-reduced spanning set of
// im(d) inside the C^1 coordinate space, so membership tests are row
// reductions.
struct LevelData {
    int n = 0, m = 0, w = 0;
    std::size_t rank = 0;
    std::shared_ptr<const LSpace> l1, l2, lm, lw;
    std::size_t dim1 = 0, dim2 = 0, dimm = 0, rows = 0;
    FqMatrix image;
    std::vector<std::size_t> pivots;
    std::size_t rank_d = 0;
    std::size_t h0 = 0, h1 = 0;

    // Reduces u against the image rows; u ends zero iff it lies in im(d).
    void reduce(std::vector<std::uint32_t>& u, const Field& f) const {
        for (std::size_t r = 0; r < pivots.size(); ++r) {
            std::uint32_t c = u[pivots[r]];
            if (c == 0) continue;
            for (std::size_t j = pivots[r]; j < rows; ++j) {
                std::uint32_t e = image.at(r, j);
                if (e != 0) u[j] = f->sub(u[j], f->mul(c, e));
            }
        }
    }
};

struct CoverContext::CohCache {
    struct Entry {
        CohomologyResult res;
        std::shared_ptr<LevelData> ld;
    };
    std::map<std::string, Entry> results;
    std::map<std::string, std::shared_ptr<LevelData>> levels;
};

struct EngineAccess {
    static CoverContext::CohCache& cache(CoverContext& c) {
        if (!c.coh_) c.coh_ = std::make_shared<CoverContext::CohCache>();
        return *c.coh_;
    }
};

CoverContext::CoverContext(WeierstrassCurve c) : CoverContext(c, c.smallest_affine_point()) {}

CoverContext::CoverContext(WeierstrassCurve c, Point q) : c_(std::move(c)), q_(q) {
    if (q_.infinity || !c_.on_curve(q_))
        throw ConfigError("cover point must be an affine rational point");
    nq_ = c_.negate(q_);
}

std::shared_ptr<const LSpace> CoverContext::l_space(const Divisor& d) {
    std::string k = d.key();
    auto it = lspaces_.find(k);
    if (it != lspaces_.end()) return it->second;
    auto sp = std::make_shared<const LSpace>(c_, d);
    lspaces_[k] = sp;
    return sp;
}

std::string Bundle::key() const {
    std::ostringstream os;
    os << rank << "#" << det_ord_o << "#" << twist.key() << "#";
    for (const auto& e : t) os << e.key() << "$";
    return os.str();
}

namespace {

CurveFunction fn_zero(const Ctx& ctx) { return CurveFunction::zero(ctx->curve()); }
CurveFunction fn_one(const Ctx& ctx) { return CurveFunction::one(ctx->curve()); }

void require_same_cover(const Bundle& a, const Bundle& b) {
    if (a.ctx != b.ctx) throw ConfigError("bundles live over different cover contexts");
}

// Largest pole order of any transition entry at O or Q.
int transition_pole_bound(const Bundle& v) {
    int ct = 0;
    for (const auto& e : v.t) {
        if (e.is_zero()) continue;
        ct = std::max(ct, -ec::order_at_infinity(e));
        ct = std::max(ct, -e.order_at(v.ctx->q()));
    }
    return std::max(ct, 0);
}

std::shared_ptr<LevelData> build_level(const Bundle& v, int n, int ct) {
    CoverContext& ctx = *v.ctx;
    const WeierstrassCurve& c = ctx.curve();
    const Field& F = c.field();
    Point O = Point::at_infinity();
    const Point& q = ctx.q();

    auto ld = std::make_shared<LevelData>();
    ld->n = n;
    ld->m = n + ct;
    ld->w = (n + 1) / 2;
    ld->rank = v.rank;
    ld->l1 = ctx.l_space(with_coeff(v.twist, O, n));
    ld->l2 = ctx.l_space(with_coeff(v.twist, q, n));
    ld->lm = ctx.l_space(with_coeff(with_coeff(v.twist, O, ld->m), q, ld->m));
    ld->lw = ctx.l_space(with_coeff(with_coeff(v.twist, O, ld->w), q, ld->w));
    ld->dim1 = ld->l1->dim();
    ld->dim2 = ld->l2->dim();
    ld->dimm = ld->lm->dim();
    ld->rows = v.rank * ld->dimm;

    auto must_coords = [&](const CurveFunction& f) {
        auto co = ld->lm->to_coords(f);
        if (!co) throw EngineError("section left the truncated Cech complex");
        return *co;
    };

    // Rows span im(d): images of the chart-1 and chart-2 basis cochains.
    FqMatrix gen(F, v.rank * (ld->dim1 + ld->dim2), ld->rows);
    for (std::size_t j = 0; j < v.rank; ++j)
        for (std::size_t k = 0; k < ld->dim1; ++k) {
            std::size_t row = j * ld->dim1 + k;
            const CurveFunction& f1 = ld->l1->function(k);
            for (std::size_t i = 0; i < v.rank; ++i) {
                const CurveFunction& tij = v.entry(i, j);
                if (tij.is_zero()) continue;
                auto co = must_coords(tij * f1);
                for (std::size_t jj = 0; jj < ld->dimm; ++jj)
                    gen.set(row, i * ld->dimm + jj, co[jj]);
            }
        }
    for (std::size_t i = 0; i < v.rank; ++i)
        for (std::size_t k = 0; k < ld->dim2; ++k) {
            std::size_t row = v.rank * ld->dim1 + i * ld->dim2 + k;
            auto co = must_coords(ld->l2->function(k));
            for (std::size_t jj = 0; jj < ld->dimm; ++jj)
                gen.set(row, i * ld->dimm + jj, co[jj]);
        }
    ld->pivots = gen.rref_in_place();
    ld->rank_d = ld->pivots.size();
    ld->image = std::move(gen);
    ld->h0 = v.rank * (ld->dim1 + ld->dim2) - ld->rank_d;

    // h^1 at this level: window classes modulo the image.
    std::size_t wdim = v.rank * ld->lw->dim();
    FqMatrix residual(F, wdim, ld->rows);
    std::size_t rr = 0;
    for (std::size_t i = 0; i < v.rank; ++i)
        for (std::size_t k = 0; k < ld->lw->dim(); ++k) {
            std::vector<std::uint32_t> u(ld->rows, 0u);
            auto co = must_coords(ld->lw->function(k));
            for (std::size_t jj = 0; jj < ld->dimm; ++jj) u[i * ld->dimm + jj] = co[jj];
            ld->reduce(u, F);
            for (std::size_t jj = 0; jj < ld->rows; ++jj) residual.set(rr, jj, u[jj]);
            ++rr;
        }
    ld->h1 = residual.rank();
    return ld;
}

std::shared_ptr<LevelData> level_for(const Bundle& v, const std::string& key, int n, int ct) {
    auto& cc = EngineAccess::cache(*v.ctx);
    std::string lk = key + "@" + std::to_string(n);
    auto it = cc.levels.find(lk);
    if (it != cc.levels.end()) return it->second;
    auto ld = build_level(v, n, ct);
    cc.levels[lk] = ld;
    return ld;
}

int base_level(const Bundle& v) {
    Point O = Point::at_infinity();
    return std::max({4, v.twist.mult(O) + 2, v.twist.mult(v.ctx->q()) + 2});
}

}  // namespace

Bundle make_bundle(Ctx ctx, std::size_t rank, std::vector<CurveFunction> entries, Divisor twist) {
    if (!ctx) throw ConfigError("bundle needs a cover context");
    if (rank == 0) throw ConfigError("bundle rank must be positive");
    if (entries.size() != rank * rank) throw ConfigError("transition entry count mismatch");
    const WeierstrassCurve& c = ctx->curve();
    const Field& F = c.field();
    const Point& q = ctx->q();
    const Point& nq = ctx->q_negated();
    FqPoly lin(F, {F->neg(q.x), F->one()});
    for (const auto& e : entries) {
        if (e.is_zero()) continue;
        // Canonical denominators of functions regular away from {O, Q} are
        // powers of (x - x_Q); anything else has a pole elsewhere.
        FqPoly pw = FqPoly::constant(F, F->one());
        for (int i = 0; i < e.r().degree(); ++i) pw = pw * lin;
        if (!(e.r() == pw)) throw ConfigError("transition entry has a pole outside the overlap");
        if (e.r().degree() > 0 && !(nq == q) && e.order_at(nq) < 0)
            throw ConfigError("transition entry has a pole outside the overlap");
    }
    KMatrix tm = KMatrix::from_entries(c, rank, rank, entries);
    CurveFunction det = tm.det();
    if (det.is_zero()) throw ConfigError("transition determinant vanishes");
    int oo = det.order_at(Point::at_infinity());
    int oq = det.order_at(q);
    if (!(nq == q) && det.r().degree() > 0) {
        // det is regular off {O, Q}; its only other possible support is -Q.
        if (det.order_at(nq) != 0)
            throw ConfigError("transition determinant degenerates on the overlap");
    }
    if (oo + oq != 0) throw ConfigError("transition determinant degenerates on the overlap");
    return Bundle{std::move(ctx), rank, std::move(entries), std::move(twist), oo};
}

Bundle trivial_bundle(Ctx ctx, std::size_t rank) {
    if (rank == 0) throw ConfigError("bundle rank must be positive");
    std::vector<CurveFunction> e(rank * rank, fn_zero(ctx));
    for (std::size_t i = 0; i < rank; ++i) e[i * rank + i] = fn_one(ctx);
    return Bundle{std::move(ctx), rank, std::move(e), Divisor{}, 0};
}

Bundle line_bundle(Ctx ctx, Divisor d) {
    Bundle b = trivial_bundle(ctx, 1);
    b.twist = std::move(d);
    return b;
}

Bundle tensor(const Bundle& a, const Bundle& b) {
    require_same_cover(a, b);
    std::size_t r = a.rank * b.rank;
    std::vector<CurveFunction> e(r * r, fn_zero(a.ctx));
    for (std::size_t i = 0; i < a.rank; ++i)
        for (std::size_t j = 0; j < a.rank; ++j) {
            if (a.entry(i, j).is_zero()) continue;
            for (std::size_t k = 0; k < b.rank; ++k)
                for (std::size_t l = 0; l < b.rank; ++l) {
                    if (b.entry(k, l).is_zero()) continue;
                    e[(i * b.rank + k) * r + (j * b.rank + l)] = a.entry(i, j) * b.entry(k, l);
                }
        }
    int det_o = a.det_ord_o * static_cast<int>(b.rank) + b.det_ord_o * static_cast<int>(a.rank);
    return Bundle{a.ctx, r, std::move(e), a.twist + b.twist, det_o};
}

Bundle direct_sum(const Bundle& a, const Bundle& b) {
    require_same_cover(a, b);
    if (!(a.twist == b.twist))
        throw ConfigError("direct sum needs matching twist divisors");
    std::size_t r = a.rank + b.rank;
    std::vector<CurveFunction> e(r * r, fn_zero(a.ctx));
    for (std::size_t i = 0; i < a.rank; ++i)
        for (std::size_t j = 0; j < a.rank; ++j) e[i * r + j] = a.entry(i, j);
    for (std::size_t i = 0; i < b.rank; ++i)
        for (std::size_t j = 0; j < b.rank; ++j)
            e[(a.rank + i) * r + (a.rank + j)] = b.entry(i, j);
    return Bundle{a.ctx, r, std::move(e), a.twist, a.det_ord_o + b.det_ord_o};
}

Bundle dual(const Bundle& a) {
    KMatrix tm = KMatrix::from_entries(a.ctx->curve(), a.rank, a.rank, a.t);
    KMatrix inv = tm.inverse();
    std::vector<CurveFunction> e(a.rank * a.rank, fn_zero(a.ctx));
    for (std::size_t i = 0; i < a.rank; ++i)
        for (std::size_t j = 0; j < a.rank; ++j) e[i * a.rank + j] = inv.at(j, i);
    return Bundle{a.ctx, a.rank, std::move(e), a.twist.scaled(-1), -a.det_ord_o};
}

namespace {

std::vector<std::vector<int>> multi_indices(int rank, int total) {
    if (rank == 1) return {{total}};
    std::vector<std::vector<int>> out;
    for (int v = total; v >= 0; --v)
        for (auto rest : multi_indices(rank - 1, total - v)) {
            rest.insert(rest.begin(), v);
            out.push_back(std::move(rest));
        }
    return out;
}

}  // namespace

Bundle sym_power(const Bundle& a, int m) {
    if (m < 0) throw ConfigError("symmetric power needs m >= 0");
    if (m == 0) return trivial_bundle(a.ctx, 1);
    if (m == 1) return a;
    int r = static_cast<int>(a.rank);
    auto basis = multi_indices(r, m);
    std::map<std::vector<int>, std::size_t> pos;
    for (std::size_t i = 0; i < basis.size(); ++i) pos[basis[i]] = i;
    std::size_t dim = basis.size();
    std::vector<CurveFunction> e(dim * dim, fn_zero(a.ctx));
    for (std::size_t ca = 0; ca < dim; ++ca) {
        // Image of e^alpha is the product of the transformed factors.
        std::map<std::vector<int>, CurveFunction> cur;
        cur[std::vector<int>(r, 0)] = fn_one(a.ctx);
        for (int j = 0; j < r; ++j)
            for (int rep = 0; rep < basis[ca][static_cast<std::size_t>(j)]; ++rep) {
                std::map<std::vector<int>, CurveFunction> next;
                for (const auto& [expo, coef] : cur)
                    for (int i = 0; i < r; ++i) {
                        const CurveFunction& tij =
                            a.entry(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                        if (tij.is_zero()) continue;
                        std::vector<int> e2 = expo;
                        ++e2[static_cast<std::size_t>(i)];
                        CurveFunction term = coef * tij;
                        auto it = next.find(e2);
                        if (it == next.end())
                            next.emplace(std::move(e2), std::move(term));
                        else
                            it->second = it->second + term;
                    }
                cur = std::move(next);
            }
        for (const auto& [expo, coef] : cur)
            if (!coef.is_zero()) e[pos.at(expo) * dim + ca] = coef;
    }
    std::int64_t det_mult = static_cast<std::int64_t>(dim) * m / r;
    return Bundle{a.ctx, dim, std::move(e), a.twist.scaled(m),
                  a.det_ord_o * static_cast<int>(det_mult)};
}

Bundle twist_bundle(const Bundle& a, const Divisor& d) {
    Bundle b = a;
    b.twist = a.twist + d;
    return b;
}

Bundle frobenius_pullback(const Bundle& a) {
    const WeierstrassCurve& c = a.ctx->curve();
    const Field& F = c.field();
    std::int64_t p = F->p();
    ec::Isogeny fr = ec::frobenius_isogeny(c);
    const WeierstrassCurve& cs = fr.source;
    const Point& q = a.ctx->q();
    Point qs = Point::affine(F->pth_root(q.x), F->pth_root(q.y));
    Ctx ctx2 = CoverContext::make(cs, qs);

    auto spread = [&](const FqPoly& f) {
        if (f.is_zero()) return FqPoly::zero(F);
        std::vector<std::uint32_t> cc(static_cast<std::size_t>(f.degree()) * p + 1, 0u);
        for (int i = 0; i <= f.degree(); ++i)
            cc[static_cast<std::size_t>(i) * static_cast<std::size_t>(p)] = f.coeff(i);
        return FqPoly(F, std::move(cc));
    };
    CurveFunction ys = CurveFunction::coord_y(cs);
    CurveFunction yp = CurveFunction::one(cs);
    for (std::int64_t i = 0; i < p; ++i) yp = yp * ys;
    auto pull = [&](const CurveFunction& f) {
        if (f.is_zero()) return CurveFunction::zero(cs);
        FqPoly one = FqPoly::constant(F, F->one());
        CurveFunction num(cs, spread(f.u()), FqPoly::zero(F), one);
        if (!f.v().is_zero()) {
            CurveFunction vpart(cs, spread(f.v()), FqPoly::zero(F), one);
            num = num + vpart * yp;
        }
        CurveFunction den(cs, spread(f.r()), FqPoly::zero(F), one);
        return num * den.inverse();
    };
    std::vector<CurveFunction> e;
    e.reserve(a.t.size());
    for (const auto& f : a.t) e.push_back(pull(f));
    Divisor tw;
    for (const auto& [pt, mlt] : a.twist.coeffs()) {
        if (pt.infinity)
            tw.add(pt, mlt * static_cast<int>(p));
        else
            tw.add(Point::affine(F->pth_root(pt.x), F->pth_root(pt.y)),
                   mlt * static_cast<int>(p));
    }
    return Bundle{std::move(ctx2), a.rank, std::move(e), std::move(tw),
                  a.det_ord_o * static_cast<int>(p)};
}

int degree(const Bundle& a) {
    return a.det_ord_o + static_cast<int>(a.rank) * a.twist.degree();
}

CohomologyResult cohomology(const Bundle& v) {
    auto& cc = EngineAccess::cache(*v.ctx);
    std::string key = v.key();
    auto hit = cc.results.find(key);
    if (hit != cc.results.end()) return hit->second.res;

    int ct = transition_pole_bound(v);
    int deg = degree(v);
    int n = base_level(v);
    auto a = level_for(v, key, n, ct);
    auto b = level_for(v, key, 2 * n, ct);
    while (b->n <= kLevelCap) {
        if (a->h0 == b->h0 && a->h1 == b->h1 &&
            static_cast<long>(a->h0) - static_cast<long>(a->h1) == deg) {
            CohomologyResult res{a->h0, a->h1, b->n, true};
            cc.results[key] = {res, b};
            return res;
        }
        a = b;
        b = level_for(v, key, 2 * b->n, ct);
    }
    throw EngineError("cohomology did not stabilize below the level cap");
}

CohomologyResult cohomology_at(const Bundle& v, int level) {
    if (level < 1) throw ConfigError("truncation level must be positive");
    int ct = transition_pole_bound(v);
    auto ld = level_for(v, v.key(), level, ct);
    return CohomologyResult{ld->h0, ld->h1, level, false};
}

namespace {

std::shared_ptr<LevelData> stable_level(const Bundle& v) {
    cohomology(v);
    auto& cc = EngineAccess::cache(*v.ctx);
    return cc.results.at(v.key()).ld;
}

// Coordinates of a cochain in the C^1 space of a level; nullopt when the
// cochain's poles exceed the level bounds.
std::optional<std::vector<std::uint32_t>> cochain_coords(const LevelData& ld,
                                                         const Cochain& c) {
    std::vector<std::uint32_t> u(ld.rows, 0u);
    for (std::size_t i = 0; i < ld.rank; ++i) {
        if (c.f[i].is_zero()) continue;
        auto co = ld.lm->to_coords(c.f[i]);
        if (!co) return std::nullopt;
        for (std::size_t jj = 0; jj < ld.dimm; ++jj) u[i * ld.dimm + jj] = (*co)[jj];
    }
    return u;
}

}  // namespace

Cochain h1_generator(const Bundle& v) {
    auto ld = stable_level(v);
    const Field& F = v.ctx->curve().field();
    if (ld->h1 == 0) throw EngineError("H^1 vanishes; no generator");
    for (std::size_t i = 0; i < v.rank; ++i)
        for (std::size_t k = 0; k < ld->lw->dim(); ++k) {
            auto co = ld->lm->to_coords(ld->lw->function(k));
            if (!co) throw EngineError("window function left the complex");
            std::vector<std::uint32_t> u(ld->rows, 0u);
            for (std::size_t jj = 0; jj < ld->dimm; ++jj) u[i * ld->dimm + jj] = (*co)[jj];
            ld->reduce(u, F);
            if (std::any_of(u.begin(), u.end(), [](std::uint32_t x) { return x != 0; })) {
                Cochain c;
                c.f.assign(v.rank, CurveFunction::zero(v.ctx->curve()));
                c.f[i] = ld->lw->function(k);
                return c;
            }
        }
    throw EngineError("no window representative generates H^1");
}

bool is_coboundary(const Bundle& v, const Cochain& c) {
    if (c.f.size() != v.rank) throw ConfigError("cochain component count mismatch");
    const Field& F = v.ctx->curve().field();
    auto ld = stable_level(v);
    int ct = transition_pole_bound(v);
    std::string key = v.key();
    std::optional<bool> prev;
    int n = ld->n;
    while (n <= kLevelCap) {
        auto cur_ld = (n == ld->n) ? ld : level_for(v, key, n, ct);
        auto u = cochain_coords(*cur_ld, c);
        if (u) {
            cur_ld->reduce(*u, F);
            bool zero = std::all_of(u->begin(), u->end(),
                                    [](std::uint32_t x) { return x == 0; });
            if (zero) return true;  // once a coboundary, always a coboundary
            if (prev && !*prev) return false;
            prev = false;
        }
        n *= 2;
    }
    throw EngineError("coboundary test did not stabilize below the level cap");
}

std::vector<Section> h0_sections(const Bundle& v) {
    CohomologyResult res = cohomology(v);
    auto ld = stable_level(v);
    const Field& F = v.ctx->curve().field();
    // Oriented matrix of d: columns are domain basis cochains.
    std::size_t cols = v.rank * (ld->dim1 + ld->dim2);
    FqMatrix d(F, ld->rows, cols);
    for (std::size_t j = 0; j < v.rank; ++j)
        for (std::size_t k = 0; k < ld->dim1; ++k) {
            std::size_t col = j * ld->dim1 + k;
            for (std::size_t i = 0; i < v.rank; ++i) {
                const CurveFunction& tij = v.entry(i, j);
                if (tij.is_zero()) continue;
                auto co = ld->lm->to_coords(tij * ld->l1->function(k));
                if (!co) throw EngineError("section left the truncated Cech complex");
                for (std::size_t jj = 0; jj < ld->dimm; ++jj)
                    d.set(i * ld->dimm + jj, col, F->neg((*co)[jj]));
            }
        }
    for (std::size_t i = 0; i < v.rank; ++i)
        for (std::size_t k = 0; k < ld->dim2; ++k) {
            std::size_t col = v.rank * ld->dim1 + i * ld->dim2 + k;
            auto co = ld->lm->to_coords(ld->l2->function(k));
            if (!co) throw EngineError("section left the truncated Cech complex");
            for (std::size_t jj = 0; jj < ld->dimm; ++jj)
                d.set(i * ld->dimm + jj, col, (*co)[jj]);
        }
    gf::KernelBasis kb = d.kernel();
    if (kb.vectors.size() != res.h0)
        throw EngineError("kernel dimension disagrees with stabilized h0");
    std::vector<Section> out;
    for (const auto& x : kb.vectors) {
        Section s;
        for (std::size_t j = 0; j < v.rank; ++j) {
            std::vector<std::uint32_t> sl(x.begin() + static_cast<std::ptrdiff_t>(j * ld->dim1),
                                          x.begin() + static_cast<std::ptrdiff_t>((j + 1) * ld->dim1));
            s.f1.push_back(ld->l1->from_coords(sl));
        }
        std::size_t off = v.rank * ld->dim1;
        for (std::size_t i = 0; i < v.rank; ++i) {
            std::vector<std::uint32_t> sl(
                x.begin() + static_cast<std::ptrdiff_t>(off + i * ld->dim2),
                x.begin() + static_cast<std::ptrdiff_t>(off + (i + 1) * ld->dim2));
            s.f2.push_back(ld->l2->from_coords(sl));
        }
        out.push_back(std::move(s));
    }
    return out;
}

KMatrix::KMatrix(const WeierstrassCurve& c, std::size_t rows, std::size_t cols)
    : c_(c), rows_(rows), cols_(cols), e_(rows * cols, CurveFunction::zero(c)) {}

KMatrix KMatrix::from_entries(const WeierstrassCurve& c, std::size_t rows, std::size_t cols,
                              std::vector<CurveFunction> e) {
    if (e.size() != rows * cols) throw ConfigError("matrix entry count mismatch");
    KMatrix m(c, rows, cols);
    m.e_ = std::move(e);
    return m;
}

KMatrix KMatrix::operator*(const KMatrix& o) const {
    if (cols_ != o.rows_) throw EngineError("matrix product shape mismatch");
    KMatrix out(c_, rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            if (at(i, k).is_zero()) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) {
                if (o.at(k, j).is_zero()) continue;
                out.set(i, j, out.at(i, j) + at(i, k) * o.at(k, j));
            }
        }
    return out;
}

std::size_t KMatrix::rank() const {
    KMatrix m = *this;
    std::size_t rk = 0;
    for (std::size_t col = 0; col < cols_ && rk < rows_; ++col) {
        std::size_t piv = rows_;
        for (std::size_t i = rk; i < rows_; ++i)
            if (!m.at(i, col).is_zero()) {
                piv = i;
                break;
            }
        if (piv == rows_) continue;
        for (std::size_t j = 0; j < cols_; ++j) std::swap(m.e_[piv * cols_ + j], m.e_[rk * cols_ + j]);
        CurveFunction pinv = m.at(rk, col).inverse();
        for (std::size_t i = rk + 1; i < rows_; ++i) {
            if (m.at(i, col).is_zero()) continue;
            CurveFunction f = m.at(i, col) * pinv;
            for (std::size_t j = col; j < cols_; ++j)
                m.set(i, j, m.at(i, j) - f * m.at(rk, j));
        }
        ++rk;
    }
    return rk;
}

CurveFunction KMatrix::det() const {
    if (rows_ != cols_) throw EngineError("determinant of a non-square matrix");
    KMatrix m = *this;
    const Field& F = c_.field();
    CurveFunction acc = CurveFunction::one(c_);
    for (std::size_t col = 0; col < cols_; ++col) {
        std::size_t piv = rows_;
        for (std::size_t i = col; i < rows_; ++i)
            if (!m.at(i, col).is_zero()) {
                piv = i;
                break;
            }
        if (piv == rows_) return CurveFunction::zero(c_);
        if (piv != col) {
            for (std::size_t j = 0; j < cols_; ++j)
                std::swap(m.e_[piv * cols_ + j], m.e_[col * cols_ + j]);
            acc = acc.scaled(F->neg(F->one()));
        }
        CurveFunction pinv = m.at(col, col).inverse();
        for (std::size_t i = col + 1; i < rows_; ++i) {
            if (m.at(i, col).is_zero()) continue;
            CurveFunction f = m.at(i, col) * pinv;
            for (std::size_t j = col; j < cols_; ++j)
                m.set(i, j, m.at(i, j) - f * m.at(col, j));
        }
        acc = acc * m.at(col, col);
    }
    return acc;
}

KMatrix KMatrix::inverse() const {
    if (rows_ != cols_) throw EngineError("inverse of a non-square matrix");
    KMatrix m = *this;
    KMatrix inv(c_, rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) inv.set(i, i, CurveFunction::one(c_));
    for (std::size_t col = 0; col < cols_; ++col) {
        std::size_t piv = rows_;
        for (std::size_t i = col; i < rows_; ++i)
            if (!m.at(i, col).is_zero()) {
                piv = i;
                break;
            }
        if (piv == rows_) throw EngineError("singular transition matrix");
        if (piv != col)
            for (std::size_t j = 0; j < cols_; ++j) {
                std::swap(m.e_[piv * cols_ + j], m.e_[col * cols_ + j]);
                std::swap(inv.e_[piv * cols_ + j], inv.e_[col * cols_ + j]);
            }
        CurveFunction pinv = m.at(col, col).inverse();
        for (std::size_t j = 0; j < cols_; ++j) {
            m.set(col, j, m.at(col, j) * pinv);
            inv.set(col, j, inv.at(col, j) * pinv);
        }
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == col || m.at(i, col).is_zero()) continue;
            CurveFunction f = m.at(i, col);
            for (std::size_t j = 0; j < cols_; ++j) {
                m.set(i, j, m.at(i, j) - f * m.at(col, j));
                inv.set(i, j, inv.at(i, j) - f * inv.at(col, j));
            }
        }
    }
    return inv;
}

}  // namespace cech
}  // namespace charp
