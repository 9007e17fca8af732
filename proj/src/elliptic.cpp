#include "charp/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace charp {
namespace ec {

namespace {

using Ser = std::vector<std::uint32_t>;

Ser ser_mul(const Field& f, const Ser& a, const Ser& b, std::size_t prec) {
    Ser out(prec, 0u);
    for (std::size_t i = 0; i < a.size() && i < prec; ++i) {
        if (a[i] == 0) continue;
        std::size_t lim = std::min(b.size(), prec - i);
        for (std::size_t j = 0; j < lim; ++j) {
            if (b[j] == 0) continue;
            out[i + j] = f->add(out[i + j], f->mul(a[i], b[j]));
        }
    }
    return out;
}

// Coefficients of f(x0 + t) as a polynomial in t.
Ser shift_poly(const FqPoly& f, std::uint32_t x0) {
    const Field& F = f.field();
    Ser res;  // Horner against (x0 + t)
    for (int i = f.degree(); i >= 0; --i) {
        Ser next(res.size() + 1, 0u);
        for (std::size_t j = 0; j < res.size(); ++j) {
            next[j] = F->add(next[j], F->mul(res[j], x0));
            next[j + 1] = F->add(next[j + 1], res[j]);
        }
        if (next.empty()) next.push_back(0u);
        next[0] = F->add(next[0], f.coeff(i));
        res = std::move(next);
    }
    if (res.empty()) res.push_back(0u);
    return res;
}

Ser pad(Ser s, std::size_t prec) {
    s.resize(prec, 0u);
    return s;
}

FqPoly poly_from_codes(const Field& f, std::vector<std::uint32_t> c) {
    return FqPoly(f, std::move(c));
}

}  // namespace

WeierstrassCurve::WeierstrassCurve(Field f, std::uint32_t a1, std::uint32_t a2,
                                   std::uint32_t a3, std::uint32_t a4, std::uint32_t a6)
    : f_(std::move(f)), a1_(a1), a2_(a2), a3_(a3), a4_(a4), a6_(a6) {
    if (!f_) throw ConfigError("curve needs a field");
    for (std::uint32_t c : {a1, a2, a3, a4, a6})
        if (c >= f_->q()) throw ConfigError("curve coefficient out of range");
    cubic_ = poly_from_codes(f_, {a6_, a4_, a2_, f_->one()});
    ylin_ = poly_from_codes(f_, {a3_, a1_});
    if (discriminant() == 0) throw ConfigError("singular Weierstrass equation");
}

WeierstrassCurve WeierstrassCurve::from_ints(const Field& f, std::int64_t a1, std::int64_t a2,
                                             std::int64_t a3, std::int64_t a4, std::int64_t a6) {
    return WeierstrassCurve(f, f->from_int(a1), f->from_int(a2), f->from_int(a3),
                            f->from_int(a4), f->from_int(a6));
}

std::uint32_t WeierstrassCurve::discriminant() const {
    const Field& F = f_;
    auto mi = [&](std::int64_t v) { return F->from_int(v); };
    std::uint32_t b2 = F->add(F->mul(a1_, a1_), F->mul(mi(4), a2_));
    std::uint32_t b4 = F->add(F->mul(mi(2), a4_), F->mul(a1_, a3_));
    std::uint32_t b6 = F->add(F->mul(a3_, a3_), F->mul(mi(4), a6_));
    std::uint32_t b8 = F->add(F->mul(F->mul(a1_, a1_), a6_), F->mul(mi(4), F->mul(a2_, a6_)));
    b8 = F->sub(b8, F->mul(a1_, F->mul(a3_, a4_)));
    b8 = F->add(b8, F->mul(a2_, F->mul(a3_, a3_)));
    b8 = F->sub(b8, F->mul(a4_, a4_));
    std::uint32_t d = F->neg(F->mul(F->mul(b2, b2), b8));
    d = F->sub(d, F->mul(mi(8), F->mul(b4, F->mul(b4, b4))));
    d = F->sub(d, F->mul(mi(27), F->mul(b6, b6)));
    d = F->add(d, F->mul(mi(9), F->mul(b2, F->mul(b4, b6))));
    return d;
}

std::uint32_t WeierstrassCurve::j_invariant() const {
    const Field& F = f_;
    auto mi = [&](std::int64_t v) { return F->from_int(v); };
    std::uint32_t b2 = F->add(F->mul(a1_, a1_), F->mul(mi(4), a2_));
    std::uint32_t b4 = F->add(F->mul(mi(2), a4_), F->mul(a1_, a3_));
    std::uint32_t c4 = F->sub(F->mul(b2, b2), F->mul(mi(24), b4));
    return F->div(F->mul(c4, F->mul(c4, c4)), discriminant());
}

bool WeierstrassCurve::on_curve(const Point& p) const {
    if (p.infinity) return true;
    const Field& F = f_;
    std::uint32_t lhs = F->add(F->mul(p.y, p.y), F->mul(ylin_.eval(p.x), p.y));
    return lhs == cubic_.eval(p.x);
}

Point WeierstrassCurve::negate(const Point& p) const {
    if (p.infinity) return p;
    return Point::affine(p.x, f_->neg(f_->add(p.y, ylin_.eval(p.x))));
}

Point WeierstrassCurve::add(const Point& p, const Point& q) const {
    const Field& F = f_;
    if (p.infinity) return q;
    if (q.infinity) return p;
    if (q == negate(p)) return Point::at_infinity();
    std::uint32_t lam;
    if (p.x != q.x) {
        lam = F->div(F->sub(q.y, p.y), F->sub(q.x, p.x));
    } else {
        //  p == q and the tangent is not vertical
        std::uint32_t num = F->sub(F->add(F->mul(F->from_int(3), F->mul(p.x, p.x)),
                                          F->add(F->mul(F->from_int(2), F->mul(a2_, p.x)), a4_)),
                                   F->mul(a1_, p.y));
        std::uint32_t den = F->add(F->mul(F->from_int(2), p.y), ylin_.eval(p.x));
        lam = F->div(num, den);
    }
    std::uint32_t nu = F->sub(p.y, F->mul(lam, p.x));
    std::uint32_t x3 = F->sub(F->sub(F->add(F->mul(lam, lam), F->mul(a1_, lam)), a2_),
                              F->add(p.x, q.x));
    std::uint32_t y3 = F->sub(F->neg(F->add(F->mul(F->add(lam, a1_), x3), nu)), a3_);
    return Point::affine(x3, y3);
}

Point WeierstrassCurve::mul(std::int64_t n, const Point& p) const {
    Point base = p;
    if (n < 0) {
        base = negate(base);
        n = -n;
    }
    Point acc = Point::at_infinity();
    while (n > 0) {
        if (n & 1) acc = add(acc, base);
        base = add(base, base);
        n >>= 1;
    }
    return acc;
}

std::vector<std::uint32_t> WeierstrassCurve::quadratic_roots(
    std::uint32_t b, std::uint32_t c, const std::vector<std::uint32_t>& sqrt_tab,
    const std::vector<std::uint32_t>& as_tab) const {
    const Field& F = f_;
    constexpr std::uint32_t kNone = 0xffffffffu;
    std::vector<std::uint32_t> roots;
    if (F->p() == 2) {
        if (b == 0) {
            roots.push_back(sqrt_tab[c]);
        } else {
            // y = b z turns y^2 + b y = c into z^2 + z = c / b^2
            std::uint32_t u = F->div(c, F->mul(b, b));
            std::uint32_t z = as_tab[u];
            if (z != kNone) {
                roots.push_back(F->mul(b, z));
                roots.push_back(F->mul(b, F->add(z, F->one())));
            }
        }
    } else {
        std::uint32_t disc = F->add(F->mul(b, b), F->mul(F->from_int(4), c));
        std::uint32_t half = F->inv(F->from_int(2));
        if (disc == 0) {
            roots.push_back(F->mul(F->neg(b), half));
        } else {
            std::uint32_t s = sqrt_tab[disc];
            if (s != kNone) {
                roots.push_back(F->mul(F->sub(s, b), half));
                roots.push_back(F->mul(F->sub(F->neg(s), b), half));
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<Point> WeierstrassCurve::rational_points(std::uint64_t enum_bound) const {
    const Field& F = f_;
    if (F->q() > enum_bound)
        throw BoundExceeded("field size " + std::to_string(F->q()) +
                            " exceeds enumeration bound " + std::to_string(enum_bound));
    constexpr std::uint32_t kNone = 0xffffffffu;
    std::uint32_t q = static_cast<std::uint32_t>(F->q());
    std::vector<std::uint32_t> sqrt_tab(q, kNone), as_tab;
    for (std::uint32_t a = 0; a < q; ++a) {
        std::uint32_t s = F->mul(a, a);
        if (sqrt_tab[s] == kNone) sqrt_tab[s] = a;
    }
    if (F->p() == 2) {
        as_tab.assign(q, kNone);
        for (std::uint32_t z = 0; z < q; ++z) {
            std::uint32_t im = F->add(F->mul(z, z), z);
            if (as_tab[im] == kNone) as_tab[im] = z;
        }
    }
    std::vector<Point> pts;
    pts.push_back(Point::at_infinity());
    for (std::uint32_t x = 0; x < q; ++x)
        for (std::uint32_t y : quadratic_roots(ylin_.eval(x), cubic_.eval(x), sqrt_tab, as_tab))
            pts.push_back(Point::affine(x, y));
    return pts;
}

Point WeierstrassCurve::smallest_affine_point() const {
    auto pts = rational_points(std::max<std::uint64_t>(f_->q(), 1));
    for (const Point& p : pts)
        if (!p.infinity) return p;
    throw EngineError("curve has no affine rational point over " + f_->name() +
                      "; extend the base field first");
}

std::uint64_t WeierstrassCurve::count_for(const WeierstrassCurve& c) const {
    return c.rational_points(std::numeric_limits<std::uint64_t>::max()).size();
}

std::uint64_t WeierstrassCurve::count_points(int extension_degree, std::uint64_t enum_bound) const {
    if (extension_degree < 1) throw ConfigError("extension degree must be >= 1");
    const Field& F = f_;
    double bits = static_cast<double>(F->degree()) * extension_degree *
                  std::log2(static_cast<double>(F->p()));
    if (bits > 62 || std::pow(static_cast<double>(F->p()),
                              static_cast<double>(F->degree()) * extension_degree) >
                         static_cast<double>(enum_bound))
        throw BoundExceeded("extension field exceeds enumeration bound");
    if (extension_degree == 1) return count_for(*this);
    gf::Field ext = gf::FiniteField::create(F->p(), F->degree() * extension_degree);
    gf::FieldEmbedding e(F, ext);
    return count_for(base_change(e));
}

bool WeierstrassCurve::supersingular_by_hasse_invariant() const {
    const Field& F = f_;
    if (F->p() < 5)
        throw ConfigError("coefficient criterion needs characteristic >= 5");
    // Complete the square: y -> y - (a1 x + a3)/2 gives y^2 = f(x).
    auto mi = [&](std::int64_t v) { return F->from_int(v); };
    std::uint32_t b2 = F->add(F->mul(a1_, a1_), F->mul(mi(4), a2_));
    std::uint32_t b4 = F->add(F->mul(mi(2), a4_), F->mul(a1_, a3_));
    std::uint32_t b6 = F->add(F->mul(a3_, a3_), F->mul(mi(4), a6_));
    FqPoly f = poly_from_codes(
        F, {F->div(b6, mi(4)), F->div(b4, mi(2)), F->div(b2, mi(4)), F->one()});
    FqPoly pw = FqPoly::constant(F, F->one());
    for (std::int64_t i = 0; i < (F->p() - 1) / 2; ++i) pw = pw * f;
    return pw.coeff(static_cast<int>(F->p() - 1)) == 0;
}

bool WeierstrassCurve::supersingular_by_trace(std::uint64_t enum_bound) const {
    std::uint64_t n = count_points(1, enum_bound);
    std::int64_t trace = static_cast<std::int64_t>(f_->q()) + 1 - static_cast<std::int64_t>(n);
    return trace % f_->p() == 0;
}

bool WeierstrassCurve::is_supersingular(std::uint64_t enum_bound) const {
    if (f_->p() >= 5) return supersingular_by_hasse_invariant();
    return supersingular_by_trace(enum_bound);
}

WeierstrassCurve WeierstrassCurve::base_change(const gf::FieldEmbedding& e) const {
    const Field& s = e.source();
    if (s->p() != f_->p() || s->degree() != f_->degree() || s->modulus() != f_->modulus())
        throw ConfigError("embedding source mismatch");
    return WeierstrassCurve(e.target(), e.map(a1_), e.map(a2_), e.map(a3_), e.map(a4_),
                            e.map(a6_));
}

bool WeierstrassCurve::operator==(const WeierstrassCurve& o) const {
    return f_->p() == o.f_->p() && f_->degree() == o.f_->degree() &&
           f_->modulus() == o.f_->modulus() && a1_ == o.a1_ && a2_ == o.a2_ &&
           a3_ == o.a3_ && a4_ == o.a4_ && a6_ == o.a6_;
}

std::string WeierstrassCurve::describe() const {
    const Field& F = f_;
    std::ostringstream os;
    os << "y^2";
    if (a1_ != 0) os << " + (" << F->to_string(a1_) << ")xy";
    if (a3_ != 0) os << " + (" << F->to_string(a3_) << ")y";
    os << " = x^3";
    if (a2_ != 0) os << " + (" << F->to_string(a2_) << ")x^2";
    if (a4_ != 0) os << " + (" << F->to_string(a4_) << ")x";
    if (a6_ != 0) os << " + (" << F->to_string(a6_) << ")";
    os << " over " << F->name();
    return os.str();
}

Point Isogeny::apply(const Point& p) const {
    if (!source.on_curve(p)) throw EngineError("point not on the source curve");
    if (p.infinity) return p;
    const Field& F = source.field();
    std::uint32_t x = p.x, y = p.y;
    for (int i = 0; i < power; ++i) {
        x = F->frobenius(x);
        y = F->frobenius(y);
    }
    return Point::affine(x, y);
}

Isogeny frobenius_isogeny(const WeierstrassCurve& target, int power) {
    if (power < 1) throw ConfigError("Frobenius power must be >= 1");
    const Field& F = target.field();
    auto root = [&](std::uint32_t a) {
        for (int i = 0; i < power; ++i) a = F->pth_root(a);
        return a;
    };
    WeierstrassCurve src(F, root(target.a1()), root(target.a2()), root(target.a3()),
                         root(target.a4()), root(target.a6()));
    std::int64_t deg = 1;
    for (int i = 0; i < power; ++i) deg *= F->p();
    return Isogeny{src, target,
                   power == 1 ? Isogeny::Kind::RelativeFrobenius
                              : Isogeny::Kind::CompositeOfFrobenius,
                   power, deg};
}

Divisor::Divisor(std::map<Point, int> coeffs) : c_(std::move(coeffs)) { prune(); }

Divisor Divisor::single(const Point& p, int mult) {
    Divisor d;
    d.add(p, mult);
    return d;
}

void Divisor::prune() {
    for (auto it = c_.begin(); it != c_.end();)
        it = it->second == 0 ? c_.erase(it) : std::next(it);
}

int Divisor::mult(const Point& p) const {
    auto it = c_.find(p);
    return it == c_.end() ? 0 : it->second;
}

Divisor& Divisor::add(const Point& p, int mult) {
    if (mult != 0) {
        int v = (c_[p] += mult);
        if (v == 0) c_.erase(p);
    }
    return *this;
}

Divisor Divisor::operator+(const Divisor& o) const {
    Divisor d = *this;
    for (const auto& [p, m] : o.c_) d.add(p, m);
    return d;
}

Divisor Divisor::operator-(const Divisor& o) const {
    Divisor d = *this;
    for (const auto& [p, m] : o.c_) d.add(p, -m);
    return d;
}

Divisor Divisor::scaled(int k) const {
    Divisor d;
    if (k != 0)
        for (const auto& [p, m] : c_) d.add(p, k * m);
    return d;
}

int Divisor::degree() const {
    int s = 0;
    for (const auto& [p, m] : c_) s += m;
    return s;
}

int Divisor::positive_degree() const {
    int s = 0;
    for (const auto& [p, m] : c_)
        if (m > 0) s += m;
    return s;
}

std::string Divisor::key() const {
    std::ostringstream os;
    for (const auto& [p, m] : c_) {
        if (p.infinity)
            os << "O";
        else
            os << p.x << "." << p.y;
        os << ":" << m << ";";
    }
    return os.str();
}

CurveFunction::CurveFunction(WeierstrassCurve c, FqPoly u, FqPoly v, FqPoly r)
    : c_(std::make_shared<WeierstrassCurve>(std::move(c))),
      u_(std::move(u)),
      v_(std::move(v)),
      r_(std::move(r)) {
    if (r_.is_zero()) throw EngineError("zero denominator");
    canonicalize();
}

CurveFunction CurveFunction::zero(const WeierstrassCurve& c) {
    const Field& F = c.field();
    return CurveFunction(c, FqPoly::zero(F), FqPoly::zero(F),
                         FqPoly::constant(F, F->one()));
}

CurveFunction CurveFunction::one(const WeierstrassCurve& c) { return constant(c, c.field()->one()); }

CurveFunction CurveFunction::constant(const WeierstrassCurve& c, std::uint32_t v) {
    const Field& F = c.field();
    return CurveFunction(c, FqPoly::constant(F, v), FqPoly::zero(F),
                         FqPoly::constant(F, F->one()));
}

CurveFunction CurveFunction::coord_x(const WeierstrassCurve& c) {
    const Field& F = c.field();
    return CurveFunction(c, FqPoly::x(F), FqPoly::zero(F), FqPoly::constant(F, F->one()));
}

CurveFunction CurveFunction::coord_y(const WeierstrassCurve& c) {
    const Field& F = c.field();
    return CurveFunction(c, FqPoly::zero(F), FqPoly::constant(F, F->one()),
                         FqPoly::constant(F, F->one()));
}

void CurveFunction::canonicalize() {
    const Field& F = r_.field();
    if (u_.is_zero() && v_.is_zero()) {
        r_ = FqPoly::constant(F, F->one());
        return;
    }
    FqPoly d = FqPoly::gcd(FqPoly::gcd(u_, v_), r_);
    if (d.degree() > 0) {
        FqPoly q, rem;
        FqPoly::divmod(u_, d, q, rem);
        u_ = q;
        FqPoly::divmod(v_, d, q, rem);
        v_ = q;
        FqPoly::divmod(r_, d, q, rem);
        r_ = q;
    }
    std::uint32_t lead = r_.leading();
    if (lead != F->one()) {
        std::uint32_t li = F->inv(lead);
        u_ = u_.scaled(li);
        v_ = v_.scaled(li);
        r_ = r_.scaled(li);
    }
}

CurveFunction CurveFunction::operator+(const CurveFunction& o) const {
    return CurveFunction(*c_, u_ * o.r_ + o.u_ * r_, v_ * o.r_ + o.v_ * r_, r_ * o.r_);
}

CurveFunction CurveFunction::operator-(const CurveFunction& o) const {
    return *this + o.scaled(r_.field()->neg(r_.field()->one()));
}

CurveFunction CurveFunction::operator*(const CurveFunction& o) const {
    // (u1 + v1 y)(u2 + v2 y) with y^2 = cubic - ylin * y
    const FqPoly& cub = c_->cubic();
    const FqPoly& yl = c_->ylin();
    FqPoly vv = v_ * o.v_;
    FqPoly nu = u_ * o.u_ + vv * cub;
    FqPoly nv = u_ * o.v_ + v_ * o.u_ - vv * yl;
    return CurveFunction(*c_, nu, nv, r_ * o.r_);
}

CurveFunction CurveFunction::scaled(std::uint32_t k) const {
    return CurveFunction(*c_, u_.scaled(k), v_.scaled(k), r_);
}

CurveFunction CurveFunction::inverse() const {
    if (is_zero()) throw EngineError("inverse of the zero function");
    const FqPoly& cub = c_->cubic();
    const FqPoly& yl = c_->ylin();
    // (u + v y)^-1 = r * conj / norm, conj = (u - v ylin) - v y
    FqPoly norm = u_ * u_ - u_ * v_ * yl - v_ * v_ * cub;
    if (norm.is_zero()) throw EngineError("norm vanished; inconsistent function");
    return CurveFunction(*c_, r_ * (u_ - v_ * yl), (r_ * v_).scaled(r_.field()->neg(r_.field()->one())),
                         norm);
}

bool CurveFunction::operator==(const CurveFunction& o) const {
    return u_ == o.u_ && v_ == o.v_ && r_ == o.r_;
}

std::uint32_t CurveFunction::eval(const Point& p) const {
    if (p.infinity) throw EngineError("evaluation at infinity");
    const Field& F = r_.field();
    std::uint32_t rv = r_.eval(p.x);
    if (rv == 0) throw EngineError("evaluation at a pole of the representative");
    return F->div(F->add(u_.eval(p.x), F->mul(v_.eval(p.x), p.y)), rv);
}

int pole_order_at_infinity(const FqPoly& u, const FqPoly& v) {
    if (u.is_zero() && v.is_zero()) throw EngineError("pole order of the zero function");
    int o = 0;
    if (!u.is_zero()) o = std::max(o, 2 * u.degree());
    if (!v.is_zero()) o = std::max(o, 3 + 2 * v.degree());
    return o;
}

int order_at_infinity(const CurveFunction& f) {
    if (f.is_zero()) throw EngineError("order of the zero function");
    return -pole_order_at_infinity(f.u(), f.v()) + 2 * f.r().degree();
}

int CurveFunction::order_at(const Point& p) const {
    if (is_zero()) throw EngineError("order of the zero function");
    if (p.infinity) return order_at_infinity(*this);
    if (!c_->on_curve(p)) throw EngineError("order at a point off the curve");
    int prec = std::max(pole_order_at_infinity(u_, v_), 2 * r_.degree()) + 2;
    LocalExpansion le(*c_, p, prec);
    return le.order(*this);
}

int CurveFunction::pole_order_at(const Point& p) const {
    int o = order_at(p);
    return o < 0 ? -o : 0;
}

std::string CurveFunction::to_string() const {
    std::ostringstream os;
    os << "(" << u_.to_string();
    if (!v_.is_zero()) os << " + (" << v_.to_string() << ")y";
    os << ")";
    if (r_.degree() > 0 || r_.leading() != r_.field()->one()) os << "/(" << r_.to_string() << ")";
    return os.str();
}

std::string CurveFunction::key() const {
    std::ostringstream os;
    auto dump = [&](const FqPoly& f) {
        for (int i = 0; i <= f.degree(); ++i) os << f.coeff(i) << ",";
        os << "|";
    };
    dump(u_);
    dump(v_);
    dump(r_);
    return os.str();
}

LocalExpansion::LocalExpansion(const WeierstrassCurve& c, const Point& p, int prec)
    : c_(c), p_(p), prec_(prec) {
    if (p.infinity) throw EngineError("expansion point must be affine");
    if (!c.on_curve(p)) throw EngineError("expansion point off the curve");
    if (prec < 1) throw EngineError("expansion precision must be positive");
    const Field& F = c.field();
    std::size_t n = static_cast<std::size_t>(prec);
    std::uint32_t x0 = p.x, y0 = p.y;
    std::uint32_t wy = F->add(F->mul(F->from_int(2), y0), c.ylin().eval(x0));
    if (wy != 0) {
        // t = x - x0; solve W(x0 + t, y(t)) = 0 for y by successive
        // linearization.  G is kept exactly equal to W on the partial series.
        xs_.assign(n, 0u);
        xs_[0] = x0;
        if (n > 1) xs_[1] = F->one();
        Ser L = pad(shift_poly(c.ylin(), x0), n);
        Ser C = pad(shift_poly(c.cubic(), x0), n);
        ys_.assign(n, 0u);
        ys_[0] = y0;
        Ser G(n, 0u);
        G[0] = F->sub(F->add(F->mul(y0, y0), F->mul(L[0], y0)), C[0]);
        for (std::size_t i = 1; i < n; ++i) G[i] = F->sub(F->mul(L[i], y0), C[i]);
        Ser GY = L;  // dG/dY = 2 y + L
        GY[0] = F->add(GY[0], F->mul(F->from_int(2), y0));
        std::uint32_t wy_inv = F->inv(wy);
        for (std::size_t k = 1; k < n; ++k) {
            std::uint32_t cf = F->neg(F->mul(G[k], wy_inv));
            if (cf == 0) continue;
            for (std::size_t i = 0; k + i < n; ++i)
                if (GY[i] != 0) G[k + i] = F->add(G[k + i], F->mul(cf, GY[i]));
            if (2 * k < n) G[2 * k] = F->add(G[2 * k], F->mul(cf, cf));
            ys_[k] = cf;
            GY[k] = F->add(GY[k], F->mul(F->from_int(2), cf));
        }
    } else {
        // Vertical tangent: t = y - y0, solve the cubic for x(t).  The update
        // terms follow the exact expansion of a cubic under X -> X + c t^k.
        ys_.assign(n, 0u);
        ys_[0] = y0;
        if (n > 1) ys_[1] = F->one();
        std::uint32_t a1 = c.a1(), a2 = c.a2(), a3 = c.a3(), a4 = c.a4(), a6 = c.a6();
        Ser A1(n, 0u), A0(n, 0u);
        A1[0] = F->sub(F->mul(a1, y0), a4);
        if (n > 1) A1[1] = a1;
        A0[0] = F->sub(F->add(F->mul(y0, y0), F->mul(a3, y0)), a6);
        if (n > 1) A0[1] = F->add(F->mul(F->from_int(2), y0), a3);
        if (n > 2) A0[2] = F->one();
        std::uint32_t A2c = F->neg(a2);
        std::uint32_t A3c = F->neg(F->one());
        xs_.assign(n, 0u);
        xs_[0] = x0;
        Ser X2(n, 0u);
        X2[0] = F->mul(x0, x0);
        Ser G(n, 0u);
        for (std::size_t i = 0; i < n; ++i) G[i] = F->add(A0[i], F->mul(A1[i], x0));
        G[0] = F->add(G[0], F->add(F->mul(A3c, F->mul(x0, X2[0])), F->mul(A2c, X2[0])));
        std::uint32_t wx = F->add(F->add(F->mul(F->from_int(3), F->mul(A3c, X2[0])),
                                         F->mul(F->from_int(2), F->mul(A2c, x0))),
                                  A1[0]);
        if (wx == 0) throw EngineError("singular point in expansion");
        std::uint32_t wx_inv = F->inv(wx);
        std::uint32_t three = F->from_int(3), two = F->from_int(2);
        for (std::size_t k = 1; k < n; ++k) {
            std::uint32_t cf = F->neg(F->mul(G[k], wx_inv));
            if (cf == 0) continue;
            for (std::size_t i = 0; k + i < n; ++i) {
                std::uint32_t d1 = F->add(F->add(F->mul(three, F->mul(A3c, X2[i])),
                                                 F->mul(two, F->mul(A2c, xs_[i]))),
                                          A1[i]);
                if (d1 != 0) G[k + i] = F->add(G[k + i], F->mul(cf, d1));
            }
            std::uint32_t cf2 = F->mul(cf, cf);
            for (std::size_t i = 0; 2 * k + i < n; ++i) {
                std::uint32_t d2 = F->mul(three, F->mul(A3c, xs_[i]));
                if (i == 0) d2 = F->add(d2, A2c);
                if (d2 != 0) G[2 * k + i] = F->add(G[2 * k + i], F->mul(cf2, d2));
            }
            if (3 * k < n) G[3 * k] = F->add(G[3 * k], F->mul(F->mul(cf2, cf), A3c));
            for (std::size_t i = 0; k + i < n; ++i)
                if (xs_[i] != 0) X2[k + i] = F->add(X2[k + i], F->mul(two, F->mul(cf, xs_[i])));
            if (2 * k < n) X2[2 * k] = F->add(X2[2 * k], cf2);
            xs_[k] = cf;
        }
    }
}

std::vector<std::uint32_t> LocalExpansion::compose(const FqPoly& f) const {
    const Field& F = c_.field();
    std::size_t n = static_cast<std::size_t>(prec_);
    Ser res(n, 0u);
    for (int i = f.degree(); i >= 0; --i) {
        res = ser_mul(F, res, xs_, n);
        res[0] = F->add(res[0], f.coeff(i));
    }
    return res;
}

LocalExpansion::Series LocalExpansion::expand_numerator(const FqPoly& u, const FqPoly& v) const {
    const Field& F = c_.field();
    std::size_t n = static_cast<std::size_t>(prec_);
    Ser s = compose(u);
    Ser vs = ser_mul(F, compose(v), ys_, n);
    for (std::size_t i = 0; i < n; ++i) s[i] = F->add(s[i], vs[i]);
    return Series{0, std::move(s)};
}

LocalExpansion::Series LocalExpansion::expand(const CurveFunction& f) const {
    const Field& F = c_.field();
    if (f.is_zero()) return Series{0, {}};
    Ser num = expand_numerator(f.u(), f.v()).c;
    Ser den = compose(f.r());
    auto first_nonzero = [](const Ser& s) {
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] != 0) return static_cast<int>(i);
        return -1;
    };
    int nk = first_nonzero(num), dk = first_nonzero(den);
    if (nk < 0 || dk < 0)
        throw EngineError("expansion precision exhausted before a nonzero coefficient");
    std::size_t len = static_cast<std::size_t>(prec_ - std::max(nk, dk));
    Series out;
    out.val = nk - dk;
    out.c.assign(len, 0u);
    std::uint32_t d0 = F->inv(den[dk]);
    for (std::size_t i = 0; i < len; ++i) {
        std::uint32_t acc = num[nk + i];
        for (std::size_t j = 0; j < i; ++j)
            if (out.c[j] != 0 && den[dk + i - j] != 0)
                acc = F->sub(acc, F->mul(out.c[j], den[dk + i - j]));
        out.c[i] = F->mul(acc, d0);
    }
    return out;
}

int LocalExpansion::order(const CurveFunction& f) const { return expand(f).val; }

std::size_t frame_dimension(int n) {
    if (n < 0) return 0;
    if (n <= 1) return 1;
    return static_cast<std::size_t>(n);
}

int frame_monomial_order(std::size_t k) { return k == 0 ? 0 : static_cast<int>(k) + 1; }

namespace {

// Frame monomial k as (exponent of x, carries y).
std::pair<int, bool> frame_monomial(std::size_t k) {
    int o = frame_monomial_order(k);
    if (o % 2 == 0) return {o / 2, false};
    return {(o - 3) / 2, true};
}

std::size_t frame_index(int order) {
    return order == 0 ? 0 : static_cast<std::size_t>(order - 1);
}

}  // namespace

LSpace::LSpace(const WeierstrassCurve& c, const Divisor& d) : c_(c), d_(d) {
    const Field& F = c.field();
    g_ = FqPoly::constant(F, F->one());
    if (d.degree() < 0) return;

    // Clear affine poles allowed by D with g = prod (x - x_P)^D(P).
    std::vector<std::pair<Point, int>> affine_pos;
    int shift_total = 0;
    for (const auto& [p, m] : d.coeffs()) {
        if (p.infinity || m <= 0) continue;
        affine_pos.push_back({p, m});
        shift_total += m;
        FqPoly lin = poly_from_codes(F, {F->neg(p.x), F->one()});
        for (int i = 0; i < m; ++i) g_ = g_ * lin;
    }
    frame_bound_ = d.mult(Point::at_infinity()) + 2 * shift_total;
    if (frame_bound_ < 0) return;
    frame_dim_ = frame_dimension(frame_bound_);

    // Remaining conditions: at each affine point R, h = f * g must vanish to
    // order ord_R(g) - D(R).
    std::map<Point, int> req;
    auto ord_of_g = [&](const Point& r) {
        int o = 0;
        for (const auto& [p, m] : affine_pos)
            if (p.x == r.x) o += (p == c.negate(p) ? 2 : 1) * m;
        return o;
    };
    for (const auto& [p, m] : d.coeffs())
        if (!p.infinity) req[p] = ord_of_g(p) - m;
    for (const auto& [p, m] : affine_pos) {
        (void)m;
        Point np = c.negate(p);
        if (!req.count(np)) req[np] = ord_of_g(np) - d.mult(np);
    }
    std::size_t n_rows = 0;
    for (const auto& [p, r] : req)
        if (r > 0) n_rows += static_cast<std::size_t>(r);

    FqMatrix cond(F, n_rows, frame_dim_);
    std::size_t row = 0;
    for (const auto& [p, r] : req) {
        if (r <= 0) continue;
        LocalExpansion le(c, p, r);
        std::size_t nprec = static_cast<std::size_t>(r);
        // Series of x^i and x^i y at p, built iteratively.
        std::vector<Ser> xpow;
        xpow.push_back(pad({F->one()}, nprec));
        int max_xexp = frame_bound_ / 2;
        for (int i = 1; i <= max_xexp; ++i)
            xpow.push_back(ser_mul(F, xpow.back(), pad(le.x_series(), nprec), nprec));
        Ser ys = pad(le.y_series(), nprec);
        for (std::size_t j = 0; j < frame_dim_; ++j) {
            auto [xe, has_y] = frame_monomial(j);
            Ser s = has_y ? ser_mul(F, xpow[static_cast<std::size_t>(xe)], ys, nprec)
                          : xpow[static_cast<std::size_t>(xe)];
            for (int i = 0; i < r; ++i) cond.set(row + static_cast<std::size_t>(i), j, s[i]);
        }
        row += static_cast<std::size_t>(r);
    }

    gf::KernelBasis kb = cond.kernel();
    frame_basis_ = std::move(kb.vectors);
    {
        FqMatrix probe = cond;
        auto pivots = probe.rref_in_place();
        std::vector<bool> is_pivot(frame_dim_, false);
        for (auto pc : pivots) is_pivot[pc] = true;
        for (std::size_t j = 0; j < frame_dim_; ++j)
            if (!is_pivot[j]) free_cols_.push_back(j);
    }
    for (const auto& vec : frame_basis_) {
        std::vector<std::uint32_t> uc, vc;
        for (std::size_t j = 0; j < frame_dim_; ++j) {
            if (vec[j] == 0) continue;
            auto [xe, has_y] = frame_monomial(j);
            auto& tgt = has_y ? vc : uc;
            if (tgt.size() <= static_cast<std::size_t>(xe))
                tgt.resize(static_cast<std::size_t>(xe) + 1, 0u);
            tgt[static_cast<std::size_t>(xe)] = vec[j];
        }
        funcs_.push_back(CurveFunction(c, FqPoly(F, std::move(uc)), FqPoly(F, std::move(vc)), g_));
    }
}

std::optional<std::vector<std::uint32_t>> LSpace::frame_coords(const CurveFunction& f) const {
    const Field& F = c_.field();
    if (frame_dim_ == 0) return std::nullopt;
    // h = f * g must be polynomial in x, y with pole order <= N0 at infinity.
    CurveFunction h = f * CurveFunction(c_, g_, FqPoly::zero(F), FqPoly::constant(F, F->one()));
    if (h.r().degree() != 0) return std::nullopt;
    std::vector<std::uint32_t> w(frame_dim_, 0u);
    auto place = [&](const FqPoly& poly, bool has_y) -> bool {
        for (int i = 0; i <= poly.degree(); ++i) {
            std::uint32_t cf = poly.coeff(i);
            if (cf == 0) continue;
            int o = has_y ? 3 + 2 * i : 2 * i;
            if (o > frame_bound_) return false;
            w[frame_index(o)] = cf;
        }
        return true;
    };
    if (!place(h.u(), false) || !place(h.v(), true)) return std::nullopt;
    return w;
}

std::optional<std::vector<std::uint32_t>> LSpace::to_coords(const CurveFunction& f) const {
    const Field& F = c_.field();
    if (f.is_zero()) return std::vector<std::uint32_t>(funcs_.size(), 0u);
    auto wo = frame_coords(f);
    if (!wo) return std::nullopt;
    const auto& w = *wo;
    std::vector<std::uint32_t> coords(funcs_.size(), 0u);
    for (std::size_t k = 0; k < funcs_.size(); ++k) coords[k] = w[free_cols_[k]];
    // Verify membership: the coordinates must reproduce every frame entry.
    std::vector<std::uint32_t> chk(frame_dim_, 0u);
    for (std::size_t k = 0; k < coords.size(); ++k) {
        if (coords[k] == 0) continue;
        for (std::size_t j = 0; j < frame_dim_; ++j)
            if (frame_basis_[k][j] != 0)
                chk[j] = F->add(chk[j], F->mul(coords[k], frame_basis_[k][j]));
    }
    if (chk != w) return std::nullopt;
    return coords;
}

CurveFunction LSpace::from_coords(const std::vector<std::uint32_t>& coords) const {
    const Field& F = c_.field();
    if (coords.size() != funcs_.size()) throw EngineError("coordinate size mismatch");
    std::vector<std::uint32_t> w(frame_dim_, 0u);
    for (std::size_t k = 0; k < coords.size(); ++k) {
        if (coords[k] == 0) continue;
        for (std::size_t j = 0; j < frame_dim_; ++j)
            if (frame_basis_[k][j] != 0)
                w[j] = F->add(w[j], F->mul(coords[k], frame_basis_[k][j]));
    }
    std::vector<std::uint32_t> uc, vc;
    for (std::size_t j = 0; j < frame_dim_; ++j) {
        if (w[j] == 0) continue;
        auto [xe, has_y] = frame_monomial(j);
        auto& tgt = has_y ? vc : uc;
        if (tgt.size() <= static_cast<std::size_t>(xe))
            tgt.resize(static_cast<std::size_t>(xe) + 1, 0u);
        tgt[static_cast<std::size_t>(xe)] = w[j];
    }
    return CurveFunction(c_, FqPoly(F, std::move(uc)), FqPoly(F, std::move(vc)), g_);
}

}  // namespace ec
}  // namespace charp
