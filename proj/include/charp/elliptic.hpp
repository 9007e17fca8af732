#pragma once

// Elliptic curves in long Weierstrass form over GF(p^n), including p = 2, 3:
// group law, exhaustive point counting, supersingularity, the function field
// in a canonical normal form, local expansions at rational points, and bases
// of Riemann-Roch spaces L(D).

#include <map>
#include <optional>

#include "charp/gf.hpp"

namespace charp {
namespace ec {

using gf::Field;
using gf::FqMatrix;
using gf::FqPoly;

struct Point {
    bool infinity = true;
    std::uint32_t x = 0, y = 0;

    static Point at_infinity() { return Point{}; }
    static Point affine(std::uint32_t x, std::uint32_t y) { return Point{false, x, y}; }

    bool operator==(const Point& o) const {
        if (infinity != o.infinity) return false;
        return infinity || (x == o.x && y == o.y);
    }
    // Infinity first, then lexicographic on (x, y) codes.
    bool operator<(const Point& o) const {
        if (infinity != o.infinity) return infinity;
        if (x != o.x) return x < o.x;
        return y < o.y;
    }
};

class WeierstrassCurve {
  public:
    // Coefficients a1, a2, a3, a4, a6 as element codes.
    WeierstrassCurve(Field f, std::uint32_t a1, std::uint32_t a2, std::uint32_t a3,
                     std::uint32_t a4, std::uint32_t a6);
    static WeierstrassCurve from_ints(const Field& f, std::int64_t a1, std::int64_t a2,
                                      std::int64_t a3, std::int64_t a4, std::int64_t a6);

    const Field& field() const { return f_; }
    std::uint32_t a1() const { return a1_; }
    std::uint32_t a2() const { return a2_; }
    std::uint32_t a3() const { return a3_; }
    std::uint32_t a4() const { return a4_; }
    std::uint32_t a6() const { return a6_; }

    std::uint32_t discriminant() const;
    std::uint32_t j_invariant() const;

    bool on_curve(const Point& p) const;
    Point negate(const Point& p) const;
    Point add(const Point& p, const Point& q) const;
    Point mul(std::int64_t n, const Point& p) const;

    // x^3 + a2 x^2 + a4 x + a6 and a1 x + a3; y^2 = cubic() - ylin() * y.
    const FqPoly& cubic() const { return cubic_; }
    const FqPoly& ylin() const { return ylin_; }

    // All rational points, O first, affine points in code order.
    std::vector<Point> rational_points(std::uint64_t enum_bound) const;
    // #E(F_{q^e}) by exhaustive x-enumeration over the extension field.
    std::uint64_t count_points(int extension_degree, std::uint64_t enum_bound) const;
    // Lexicographically smallest affine rational point.
    Point smallest_affine_point() const;

    bool is_supersingular(std::uint64_t enum_bound) const;
    // Coefficient test on the short form; characteristic >= 5 only.
    bool supersingular_by_hasse_invariant() const;
    // Trace-mod-p test from the point count; any characteristic.
    bool supersingular_by_trace(std::uint64_t enum_bound) const;

    WeierstrassCurve base_change(const gf::FieldEmbedding& e) const;

    bool operator==(const WeierstrassCurve& o) const;
    std::string describe() const;

  private:
    Field f_;
    std::uint32_t a1_, a2_, a3_, a4_, a6_;
    FqPoly cubic_, ylin_;

    // Roots of y^2 + b y = c listed in code order.
    std::vector<std::uint32_t> quadratic_roots(std::uint32_t b, std::uint32_t c,
                                               const std::vector<std::uint32_t>& sqrt_tab,
                                               const std::vector<std::uint32_t>& as_tab) const;
    std::uint64_t count_for(const WeierstrassCurve& c) const;
};

// Degree-p^k purely inseparable covering map (x, y) -> (x^(p^k), y^(p^k)).
struct Isogeny {
    enum class Kind { RelativeFrobenius, CompositeOfFrobenius };
    WeierstrassCurve source;
    WeierstrassCurve target;
    Kind kind;
    int power;
    std::int64_t degree;

    Point apply(const Point& p) const;
};

// The relative Frobenius onto E: source curve has p-th-rooted coefficients.
Isogeny frobenius_isogeny(const WeierstrassCurve& target, int power = 1);

// Formal divisor with rational support.
class Divisor {
  public:
    Divisor() = default;
    explicit Divisor(std::map<Point, int> coeffs);
    static Divisor single(const Point& p, int mult = 1);

    int mult(const Point& p) const;
    Divisor& add(const Point& p, int mult);
    Divisor operator+(const Divisor& o) const;
    Divisor operator-(const Divisor& o) const;
    Divisor scaled(int k) const;
    int degree() const;
    // Sum of positive multiplicities.
    int positive_degree() const;
    const std::map<Point, int>& coeffs() const { return c_; }
    bool operator==(const Divisor& o) const { return c_ == o.c_; }
    std::string key() const;  // canonical serialization, cache key

  private:
    std::map<Point, int> c_;
    void prune();
};

// Element of the function field in the canonical form (u(x) + v(x) y) / r(x)
// with gcd(u, v, r) = 1 and r monic.  Unique, so equality is structural.
class CurveFunction {
  public:
    CurveFunction() = default;
    CurveFunction(WeierstrassCurve c, FqPoly u, FqPoly v, FqPoly r);
    static CurveFunction zero(const WeierstrassCurve& c);
    static CurveFunction one(const WeierstrassCurve& c);
    static CurveFunction constant(const WeierstrassCurve& c, std::uint32_t v);
    static CurveFunction coord_x(const WeierstrassCurve& c);
    static CurveFunction coord_y(const WeierstrassCurve& c);

    const WeierstrassCurve& curve() const { return *c_; }
    const FqPoly& u() const { return u_; }
    const FqPoly& v() const { return v_; }
    const FqPoly& r() const { return r_; }
    bool is_zero() const { return u_.is_zero() && v_.is_zero(); }

    CurveFunction operator+(const CurveFunction& o) const;
    CurveFunction operator-(const CurveFunction& o) const;
    CurveFunction operator*(const CurveFunction& o) const;
    CurveFunction scaled(std::uint32_t k) const;
    CurveFunction inverse() const;
    bool operator==(const CurveFunction& o) const;

    // Valuation at a rational point; throws on the zero function.
    int order_at(const Point& p) const;
    int pole_order_at(const Point& p) const;
    // Value at an affine point that is neither zero of r nor pole.
    std::uint32_t eval(const Point& p) const;

    std::string to_string() const;
    std::string key() const;

  private:
    std::shared_ptr<const WeierstrassCurve> c_;
    FqPoly u_, v_, r_;
    void canonicalize();
};

// Truncated Laurent expansions of x and y in the local uniformizer at a
// rational affine point: x - x0 when the tangent is not vertical, else
// y - y0.  Supplies expansions of arbitrary functions to finite precision.
class LocalExpansion {
  public:
    LocalExpansion(const WeierstrassCurve& c, const Point& p, int prec);

    const Point& point() const { return p_; }
    int precision() const { return prec_; }

    // Laurent coefficients of f, indices val..val+prec-1.
    struct Series {
        int val = 0;  // exponent of the first stored coefficient
        std::vector<std::uint32_t> c;
    };
    Series expand(const CurveFunction& f) const;
    Series expand_numerator(const FqPoly& u, const FqPoly& v) const;
    int order(const CurveFunction& f) const;

    const std::vector<std::uint32_t>& x_series() const { return xs_; }
    const std::vector<std::uint32_t>& y_series() const { return ys_; }

  private:
    const WeierstrassCurve c_;
    Point p_;
    int prec_;
    std::vector<std::uint32_t> xs_, ys_;  // power series of x and y in t

    std::vector<std::uint32_t> compose(const FqPoly& f) const;
};

// Pole order at O of u(x) + v(x) y; exact because the pole orders of the
// monomials x^i and x^i y have distinct parities.
int pole_order_at_infinity(const FqPoly& u, const FqPoly& v);
int order_at_infinity(const CurveFunction& f);

// Basis of L(D) = { f : div(f) + D >= 0 } with an expression operator onto
// basis coordinates.  Built inside the monomial frame of L(N0 * O) after
// clearing affine poles with a shift polynomial g = prod (x - x_P)^D(P).
class LSpace {
  public:
    LSpace(const WeierstrassCurve& c, const Divisor& d);

    const Divisor& divisor() const { return d_; }
    std::size_t dim() const { return funcs_.size(); }
    const CurveFunction& function(std::size_t k) const { return funcs_[k]; }
    const std::vector<CurveFunction>& basis() const { return funcs_; }

    // Coordinates of f in this basis, or nullopt when f is outside the span.
    std::optional<std::vector<std::uint32_t>> to_coords(const CurveFunction& f) const;
    CurveFunction from_coords(const std::vector<std::uint32_t>& coords) const;

  private:
    WeierstrassCurve c_;
    Divisor d_;
    FqPoly g_;                 // shift clearing affine poles
    int frame_bound_ = 0;      // N0
    std::size_t frame_dim_ = 0;
    std::vector<std::vector<std::uint32_t>> frame_basis_;  // frame coords per basis vector
    std::vector<std::size_t> free_cols_;                   // coordinate readout positions
    std::vector<CurveFunction> funcs_;

    std::optional<std::vector<std::uint32_t>> frame_coords(const CurveFunction& f) const;
};

std::size_t frame_dimension(int n);
// Pole order at O of the k-th frame monomial (0, 2, 3, 4, ...).
int frame_monomial_order(std::size_t k);

}  // namespace ec
}  // namespace charp
