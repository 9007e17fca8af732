#pragma once

// Cech cohomology of vector bundles on an elliptic curve E with respect to
// the two-chart cover U1 = E \ {O}, U2 = E \ {Q}.  A bundle is a transition
// matrix over the overlap plus a twist divisor carried into every section
// space.  Cohomology is computed at a finite truncation level and certified
// by agreement under doubling together with the Riemann-Roch count.

#include <functional>
#include <memory>

#include "charp/elliptic.hpp"

namespace charp {
namespace cech {

using ec::CurveFunction;
using ec::Divisor;
using ec::LSpace;
using ec::Point;
using ec::WeierstrassCurve;

class CoverContext;
using Ctx = std::shared_ptr<CoverContext>;

// Shared per-cover state: section space and cohomology caches.  All engine
// entry points funnel through one context so repeated queries are cheap.
class CoverContext {
  public:
    // Q defaults to the lexicographically smallest affine rational point.
    explicit CoverContext(WeierstrassCurve c);
    CoverContext(WeierstrassCurve c, Point q);

    const WeierstrassCurve& curve() const { return c_; }
    const Point& q() const { return q_; }
    const Point& q_negated() const { return nq_; }

    std::shared_ptr<const LSpace> l_space(const Divisor& d);

    static Ctx make(WeierstrassCurve c) { return std::make_shared<CoverContext>(std::move(c)); }
    static Ctx make(WeierstrassCurve c, Point q) {
        return std::make_shared<CoverContext>(std::move(c), std::move(q));
    }

  private:
    WeierstrassCurve c_;
    Point q_, nq_;
    std::map<std::string, std::shared_ptr<const LSpace>> lspaces_;

    struct CohCache;
    std::shared_ptr<CohCache> coh_;
    friend struct EngineAccess;
};

struct Bundle {
    Ctx ctx;
    std::size_t rank = 0;
    std::vector<CurveFunction> t;  // row-major transition, t[i * rank + j]
    Divisor twist;
    int det_ord_o = 0;  // order at O of det(t), tracked through constructions

    const CurveFunction& entry(std::size_t i, std::size_t j) const { return t[i * rank + j]; }
    std::string key() const;
};

// Validates the transition: entries regular away from {O, Q}, determinant
// invertible on the overlap.  Throws ConfigError on violation.
Bundle make_bundle(Ctx ctx, std::size_t rank, std::vector<CurveFunction> entries, Divisor twist);

Bundle trivial_bundle(Ctx ctx, std::size_t rank = 1);
Bundle line_bundle(Ctx ctx, Divisor d);

Bundle tensor(const Bundle& a, const Bundle& b);
Bundle direct_sum(const Bundle& a, const Bundle& b);  // twists must agree
Bundle dual(const Bundle& a);
Bundle sym_power(const Bundle& a, int m);
Bundle twist_bundle(const Bundle& a, const Divisor& d);

// Pullback along the degree-p relative Frobenius.  The result lives on the
// curve with p-th-rooted coefficients, over its own cover context.
Bundle frobenius_pullback(const Bundle& a);

int degree(const Bundle& a);

struct CohomologyResult {
    std::size_t h0 = 0, h1 = 0;
    int level = 0;
    bool stabilized = false;
};

// Adaptive: doubles the truncation level until (h0, h1) repeats and
// h0 - h1 equals the degree.  Throws EngineError if no level certifies.
CohomologyResult cohomology(const Bundle& v);
// Single uncertified level, mainly for diagnostics and tests.
CohomologyResult cohomology_at(const Bundle& v, int level);

// A 1-cochain: one function per component, with poles only at O and Q.
struct Cochain {
    std::vector<CurveFunction> f;
};

// Representative of a nonzero class in H^1(V); throws if H^1 = 0.
Cochain h1_generator(const Bundle& v);
// Whether the class of c in H^1(V) vanishes, certified at the stable level.
bool is_coboundary(const Bundle& v, const Cochain& c);

// A global section, as matching per-chart component functions: f2 = T f1.
struct Section {
    std::vector<CurveFunction> f1, f2;
};

// Basis of H^0(V), computed at the stable level.
std::vector<Section> h0_sections(const Bundle& v);

// Dense matrix over the function field; enough linear algebra for transition
// inverses and rank computations.
class KMatrix {
  public:
    KMatrix(const WeierstrassCurve& c, std::size_t rows, std::size_t cols);
    static KMatrix from_entries(const WeierstrassCurve& c, std::size_t rows, std::size_t cols,
                                std::vector<CurveFunction> e);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const CurveFunction& at(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }
    void set(std::size_t i, std::size_t j, CurveFunction v) { e_[i * cols_ + j] = std::move(v); }

    KMatrix operator*(const KMatrix& o) const;
    std::size_t rank() const;
    CurveFunction det() const;
    KMatrix inverse() const;

  private:
    WeierstrassCurve c_;
    std::size_t rows_, cols_;
    std::vector<CurveFunction> e_;
};

}  // namespace cech
}  // namespace charp
