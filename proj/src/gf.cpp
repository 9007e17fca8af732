#include "charp/gf.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace charp {
namespace gf {

namespace {

bool is_prime(std::int64_t p) {
    if (p < 2) return false;
    for (std::int64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

constexpr std::uint64_t kTableLimit = 1024;
constexpr std::uint64_t kFieldSizeLimit = 1ull << 31;

}  // namespace

Field FiniteField::create(std::int64_t p, int n, const std::vector<std::int64_t>& modulus) {
    if (!is_prime(p))
        throw ConfigError("field characteristic must be prime, got " + std::to_string(p));
    if (n < 1) throw ConfigError("field extension degree must be >= 1");

    std::uint64_t q = 1;
    for (int i = 0; i < n; ++i) {
        q *= static_cast<std::uint64_t>(p);
        if (q > kFieldSizeLimit) throw BoundExceeded("field size exceeds supported limit");
    }

    auto F = std::shared_ptr<FiniteField>(new FiniteField());
    F->p_ = p;
    F->n_ = n;
    F->q_ = q;

    // Prime-field scaffold used while validating or searching the modulus.
    auto Fp = std::shared_ptr<FiniteField>(new FiniteField());
    Fp->p_ = p;
    Fp->n_ = 1;
    Fp->q_ = static_cast<std::uint64_t>(p);
    Fp->modulus_ = {0u, 1u};

    if (!modulus.empty()) {
        if (static_cast<int>(modulus.size()) != n + 1)
            throw ConfigError("modulus must list n+1 coefficients");
        std::vector<std::uint32_t> m(n + 1);
        for (int i = 0; i <= n; ++i) {
            std::int64_t c = ((modulus[i] % p) + p) % p;
            m[i] = static_cast<std::uint32_t>(c);
        }
        if (m[n] != 1u) throw ConfigError("modulus must be monic");
        if (n > 1) {
            FqPoly f(Fp, m);
            if (!is_irreducible_prime_field(f)) throw ConfigError("modulus is reducible");
        }
        F->modulus_ = std::move(m);
    } else if (n == 1) {
        F->modulus_ = {0u, 1u};
    } else {
        // Lexicographic search: constant term varies fastest, matching code order.
        bool found = false;
        for (std::uint64_t k = 0; k < q && !found; ++k) {
            std::vector<std::uint32_t> m(n + 1, 0u);
            std::uint64_t t = k;
            for (int i = 0; i < n; ++i) {
                m[i] = static_cast<std::uint32_t>(t % p);
                t /= p;
            }
            m[n] = 1u;
            FqPoly f(Fp, m);
            if (is_irreducible_prime_field(f)) {
                F->modulus_ = std::move(m);
                found = true;
            }
        }
        if (!found) throw EngineError("no irreducible modulus found");  // cannot happen
    }

    if (q <= kTableLimit) {
        F->add_table_.resize(q * q);
        F->mul_table_.resize(q * q);
        F->inv_table_.assign(q, 0u);
        for (std::uint64_t a = 0; a < q; ++a) {
            for (std::uint64_t b = 0; b < q; ++b) {
                std::int64_t da[64], db[64], s[64];
                F->decode(static_cast<std::uint32_t>(a), da);
                F->decode(static_cast<std::uint32_t>(b), db);
                for (int i = 0; i < n; ++i) s[i] = (da[i] + db[i]) % p;
                F->add_table_[a * q + b] = static_cast<std::uint16_t>(F->encode(s));
                F->mul_table_[a * q + b] = static_cast<std::uint16_t>(
                    F->mul_generic(static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)));
            }
        }
        for (std::uint64_t a = 1; a < q; ++a)
            F->inv_table_[a] = F->inv_generic(static_cast<std::uint32_t>(a));
    }
    return F;
}

std::string FiniteField::name() const {
    if (n_ == 1) return "GF(" + std::to_string(p_) + ")";
    return "GF(" + std::to_string(p_) + "^" + std::to_string(n_) + ")";
}

void FiniteField::decode(std::uint32_t a, std::int64_t* out) const {
    std::uint64_t t = a;
    for (int i = 0; i < n_; ++i) {
        out[i] = static_cast<std::int64_t>(t % p_);
        t /= p_;
    }
}

std::uint32_t FiniteField::encode(const std::int64_t* c) const {
    std::uint64_t code = 0, mult = 1;
    for (int i = 0; i < n_; ++i) {
        code += static_cast<std::uint64_t>(c[i]) * mult;
        mult *= p_;
    }
    return static_cast<std::uint32_t>(code);
}

std::uint32_t FiniteField::add(std::uint32_t a, std::uint32_t b) const {
    if (!add_table_.empty()) return add_table_[static_cast<std::uint64_t>(a) * q_ + b];
    std::int64_t da[64], db[64], s[64];
    decode(a, da);
    decode(b, db);
    for (int i = 0; i < n_; ++i) s[i] = (da[i] + db[i]) % p_;
    return encode(s);
}

std::uint32_t FiniteField::neg(std::uint32_t a) const {
    std::int64_t da[64], s[64];
    decode(a, da);
    for (int i = 0; i < n_; ++i) s[i] = (p_ - da[i]) % p_;
    return encode(s);
}

std::uint32_t FiniteField::sub(std::uint32_t a, std::uint32_t b) const {
    return add(a, neg(b));
}

std::uint32_t FiniteField::mul_generic(std::uint32_t a, std::uint32_t b) const {
    std::int64_t da[64], db[64];
    decode(a, da);
    decode(b, db);
    std::int64_t prod[128] = {0};
    for (int i = 0; i < n_; ++i) {
        if (da[i] == 0) continue;
        for (int j = 0; j < n_; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
    }
    // Reduce by the monic modulus.
    for (int d = 2 * n_ - 2; d >= n_; --d) {
        std::int64_t c = prod[d];
        if (c == 0) continue;
        prod[d] = 0;
        for (int i = 0; i < n_; ++i) {
            std::int64_t m = modulus_[i];
            prod[d - n_ + i] = ((prod[d - n_ + i] - c * m) % p_ + p_) % p_;
        }
    }
    return encode(prod);
}

std::uint32_t FiniteField::mul(std::uint32_t a, std::uint32_t b) const {
    if (!mul_table_.empty()) return mul_table_[static_cast<std::uint64_t>(a) * q_ + b];
    return mul_generic(a, b);
}

std::uint32_t FiniteField::pow(std::uint32_t a, std::uint64_t e) const {
    std::uint32_t r = one(), base = a;
    while (e) {
        if (e & 1) r = mul(r, base);
        base = mul(base, base);
        e >>= 1;
    }
    return r;
}

std::uint32_t FiniteField::inv_generic(std::uint32_t a) const {
    if (a == 0) throw Error("division by zero in " + name());
    return pow(a, q_ - 2);
}

std::uint32_t FiniteField::inv(std::uint32_t a) const {
    if (a == 0) throw Error("division by zero in " + name());
    if (!inv_table_.empty()) return inv_table_[a];
    return inv_generic(a);
}

std::uint32_t FiniteField::div(std::uint32_t a, std::uint32_t b) const {
    return mul(a, inv(b));
}

std::uint32_t FiniteField::frobenius(std::uint32_t a) const {
    return pow(a, static_cast<std::uint64_t>(p_));
}

std::uint32_t FiniteField::pth_root(std::uint32_t a) const {
    std::uint32_t r = a;
    for (int i = 0; i < n_ - 1; ++i) r = frobenius(r);
    return r;
}

std::uint32_t FiniteField::from_int(std::int64_t v) const {
    std::int64_t c[64] = {0};
    c[0] = ((v % p_) + p_) % p_;
    return encode(c);
}

std::vector<std::int64_t> FiniteField::coeffs(std::uint32_t a) const {
    std::vector<std::int64_t> out(n_);
    decode(a, out.data());
    return out;
}

std::string FiniteField::to_string(std::uint32_t a) const {
    if (n_ == 1) return std::to_string(a);
    auto c = coeffs(a);
    std::ostringstream os;
    os << "[";
    for (int i = 0; i < n_; ++i) os << (i ? "," : "") << c[i];
    os << "]";
    return os.str();
}

FieldEmbedding::FieldEmbedding(Field src, Field dst) : src_(std::move(src)), dst_(std::move(dst)) {
    if (src_->p() != dst_->p() || dst_->degree() % src_->degree() != 0)
        throw ConfigError("no embedding " + src_->name() + " -> " + dst_->name());
    int n = src_->degree();
    // Image of the source generator: smallest root of the source modulus.
    std::uint32_t gen = 0;
    if (n == 1) {
        gen = dst_->one();  // unused
    } else {
        bool found = false;
        for (std::uint64_t c = 0; c < dst_->q() && !found; ++c) {
            std::uint32_t x = static_cast<std::uint32_t>(c);
            std::uint32_t acc = 0, xp = dst_->one();
            for (int i = 0; i <= n; ++i) {
                std::uint32_t mi = dst_->from_int(src_->modulus()[i]);
                acc = dst_->add(acc, dst_->mul(mi, xp));
                xp = dst_->mul(xp, x);
            }
            if (acc == 0) {
                gen = x;
                found = true;
            }
        }
        if (!found) throw EngineError("modulus has no root in target field");
    }
    gen_powers_.resize(n);
    std::uint32_t pw = dst_->one();
    for (int i = 0; i < n; ++i) {
        gen_powers_[i] = pw;
        pw = dst_->mul(pw, gen);
    }
}

std::uint32_t FieldEmbedding::map(std::uint32_t a) const {
    auto c = src_->coeffs(a);
    std::uint32_t out = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
        out = dst_->add(out, dst_->mul(dst_->from_int(c[i]), gen_powers_[i]));
    return out;
}

// ---------------------------------------------------------------- FqPoly --

FqPoly::FqPoly(Field f, std::vector<std::uint32_t> c) : f_(std::move(f)), c_(std::move(c)) {
    trim();
}

void FqPoly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

FqPoly FqPoly::constant(const Field& f, std::uint32_t c) {
    return FqPoly(f, std::vector<std::uint32_t>{c});
}

FqPoly FqPoly::x(const Field& f) {
    return FqPoly(f, std::vector<std::uint32_t>{0u, f->one()});
}

std::uint32_t FqPoly::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(c_.size())) return 0;
    return c_[i];
}

std::uint32_t FqPoly::leading() const {
    return c_.empty() ? 0 : c_.back();
}

FqPoly FqPoly::operator+(const FqPoly& o) const {
    const Field& F = f_ ? f_ : o.f_;
    std::vector<std::uint32_t> r(std::max(c_.size(), o.c_.size()), 0u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = F->add(coeff(i), o.coeff(i));
    return FqPoly(F, std::move(r));
}

FqPoly FqPoly::operator-(const FqPoly& o) const {
    const Field& F = f_ ? f_ : o.f_;
    std::vector<std::uint32_t> r(std::max(c_.size(), o.c_.size()), 0u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = F->sub(coeff(i), o.coeff(i));
    return FqPoly(F, std::move(r));
}

FqPoly FqPoly::operator*(const FqPoly& o) const {
    const Field& F = f_ ? f_ : o.f_;
    if (is_zero() || o.is_zero()) return FqPoly(F);
    std::vector<std::uint32_t> r(c_.size() + o.c_.size() - 1, 0u);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (std::size_t j = 0; j < o.c_.size(); ++j)
            r[i + j] = F->add(r[i + j], F->mul(c_[i], o.c_[j]));
    }
    return FqPoly(F, std::move(r));
}

FqPoly FqPoly::scaled(std::uint32_t c) const {
    std::vector<std::uint32_t> r(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) r[i] = f_->mul(c_[i], c);
    return FqPoly(f_, std::move(r));
}

bool FqPoly::operator==(const FqPoly& o) const {
    return c_ == o.c_;
}

std::uint32_t FqPoly::eval(std::uint32_t x) const {
    std::uint32_t acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = f_->add(f_->mul(acc, x), c_[i]);
    return acc;
}

FqPoly FqPoly::derivative() const {
    if (c_.size() <= 1) return FqPoly(f_);
    std::vector<std::uint32_t> r(c_.size() - 1, 0u);
    for (std::size_t i = 1; i < c_.size(); ++i)
        r[i - 1] = f_->mul(c_[i], f_->from_int(static_cast<std::int64_t>(i)));
    return FqPoly(f_, std::move(r));
}

FqPoly FqPoly::monic() const {
    if (is_zero()) return *this;
    return scaled(f_->inv(leading()));
}

void FqPoly::divmod(const FqPoly& a, const FqPoly& b, FqPoly& q, FqPoly& r) {
    if (b.is_zero()) throw Error("polynomial division by zero");
    const Field& F = b.f_;
    std::vector<std::uint32_t> rem = a.c_;
    int db = b.degree();
    std::uint32_t lead_inv = F->inv(b.leading());
    std::vector<std::uint32_t> quot;
    if (static_cast<int>(rem.size()) - 1 >= db)
        quot.assign(rem.size() - db, 0u);
    for (int d = static_cast<int>(rem.size()) - 1; d >= db; --d) {
        std::uint32_t c = rem[d];
        if (c == 0) continue;
        std::uint32_t f = F->mul(c, lead_inv);
        quot[d - db] = f;
        for (int i = 0; i <= db; ++i)
            rem[d - db + i] = F->sub(rem[d - db + i], F->mul(f, b.c_[i]));
    }
    q = FqPoly(F, std::move(quot));
    r = FqPoly(F, std::move(rem));
}

FqPoly FqPoly::rem(const FqPoly& a, const FqPoly& b) {
    FqPoly q, r;
    divmod(a, b, q, r);
    return r;
}

FqPoly FqPoly::gcd(FqPoly a, FqPoly b) {
    while (!b.is_zero()) {
        FqPoly r = rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return a.is_zero() ? a : a.monic();
}

FqPoly FqPoly::powmod(const FqPoly& a, std::uint64_t e, const FqPoly& m) {
    FqPoly base = rem(a, m);
    FqPoly r = constant(m.field(), m.field()->one());
    while (e) {
        if (e & 1) r = rem(r * base, m);
        base = rem(base * base, m);
        e >>= 1;
    }
    return r;
}

std::string FqPoly::to_string(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = c_.size(); i-- > 0;) {
        if (c_[i] == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << f_->to_string(c_[i]);
        if (i >= 1) os << "*" << var;
        if (i >= 2) os << "^" << i;
    }
    return os.str();
}

bool is_irreducible_prime_field(const FqPoly& f) {
    const Field& F = f.field();
    if (F->degree() != 1) throw ConfigError("irreducibility test expects a prime field");
    int n = f.degree();
    if (n < 1) return false;
    if (n == 1) return true;
    std::uint64_t p = static_cast<std::uint64_t>(F->p());
    FqPoly x = FqPoly::x(F);
    // x^(p^n) == x mod f
    FqPoly t = x;
    for (int i = 0; i < n; ++i) t = FqPoly::powmod(t, p, f);
    if (!(FqPoly::rem(t - x, f).is_zero())) return false;
    // gcd(x^(p^(n/l)) - x, f) == 1 for every prime l | n
    for (int l = 2; l <= n; ++l) {
        if (n % l != 0) continue;
        bool lp = true;
        for (int d = 2; d * d <= l; ++d)
            if (l % d == 0) lp = false;
        if (!lp) continue;
        FqPoly s = x;
        for (int i = 0; i < n / l; ++i) s = FqPoly::powmod(s, p, f);
        if (FqPoly::gcd(s - x, f).degree() != 0) return false;
    }
    return true;
}

// -------------------------------------------------------------- FqMatrix --

FqMatrix::FqMatrix(Field f, std::size_t rows, std::size_t cols)
    : f_(std::move(f)), rows_(rows), cols_(cols), a_(rows * cols, 0u) {}

FqMatrix FqMatrix::identity(const Field& f, std::size_t n) {
    FqMatrix m(f, n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, f->one());
    return m;
}

FqMatrix FqMatrix::transpose() const {
    FqMatrix m(f_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m.set(j, i, at(i, j));
    return m;
}

FqMatrix FqMatrix::operator*(const FqMatrix& o) const {
    if (cols_ != o.rows_) throw EngineError("matrix product shape mismatch");
    FqMatrix m(f_, rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            std::uint32_t v = at(i, k);
            if (v == 0) continue;
            for (std::size_t j = 0; j < o.cols_; ++j)
                m.set(i, j, f_->add(m.at(i, j), f_->mul(v, o.at(k, j))));
        }
    return m;
}

std::vector<std::uint32_t> FqMatrix::apply(const std::vector<std::uint32_t>& v) const {
    if (v.size() != cols_) throw EngineError("matrix apply shape mismatch");
    std::vector<std::uint32_t> out(rows_, 0u);
    for (std::size_t i = 0; i < rows_; ++i) {
        std::uint32_t acc = 0;
        const std::uint32_t* row = a_.data() + i * cols_;
        for (std::size_t j = 0; j < cols_; ++j)
            if (row[j] != 0 && v[j] != 0) acc = f_->add(acc, f_->mul(row[j], v[j]));
        out[i] = acc;
    }
    return out;
}

void FqMatrix::scale_row(std::size_t row, std::uint32_t factor, std::size_t from_col) {
    std::uint32_t* r = a_.data() + row * cols_;
    if (f_->has_tables()) {
        const std::uint16_t* mt = f_->mul_table() + static_cast<std::uint64_t>(factor) * f_->q();
        for (std::size_t j = from_col; j < cols_; ++j) r[j] = mt[r[j]];
    } else {
        for (std::size_t j = from_col; j < cols_; ++j) r[j] = f_->mul(factor, r[j]);
    }
}

// target -= factor * source, starting at from_col.
void FqMatrix::eliminate_row(std::size_t target, std::size_t source, std::uint32_t factor,
                             std::size_t from_col) {
    if (factor == 0) return;
    std::uint32_t* t = a_.data() + target * cols_;
    const std::uint32_t* s = a_.data() + source * cols_;
    std::uint32_t nf = f_->neg(factor);
    if (f_->has_tables()) {
        const std::uint16_t* mt = f_->mul_table() + static_cast<std::uint64_t>(nf) * f_->q();
        const std::uint16_t* at = f_->add_table();
        std::uint64_t q = f_->q();
        for (std::size_t j = from_col; j < cols_; ++j)
            t[j] = at[static_cast<std::uint64_t>(t[j]) * q + mt[s[j]]];
    } else {
        for (std::size_t j = from_col; j < cols_; ++j)
            t[j] = f_->add(t[j], f_->mul(nf, s[j]));
    }
}

std::size_t FqMatrix::rank() const {
    FqMatrix m = *this;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols_ && rank < rows_; ++col) {
        std::size_t piv = rows_;
        for (std::size_t i = rank; i < rows_; ++i)
            if (m.at(i, col) != 0) {
                piv = i;
                break;
            }
        if (piv == rows_) continue;
        if (piv != rank)
            for (std::size_t j = col; j < cols_; ++j) {
                std::uint32_t tmp = m.at(rank, j);
                m.set(rank, j, m.at(piv, j));
                m.set(piv, j, tmp);
            }
        std::uint32_t inv = f_->inv(m.at(rank, col));
        m.scale_row(rank, inv, col);
        for (std::size_t i = rank + 1; i < rows_; ++i)
            m.eliminate_row(i, rank, m.at(i, col), col);
        ++rank;
    }
    return rank;
}

std::vector<std::size_t> FqMatrix::rref_in_place() {
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols_ && rank < rows_; ++col) {
        std::size_t piv = rows_;
        for (std::size_t i = rank; i < rows_; ++i)
            if (at(i, col) != 0) {
                piv = i;
                break;
            }
        if (piv == rows_) continue;
        if (piv != rank)
            for (std::size_t j = col; j < cols_; ++j) {
                std::uint32_t tmp = at(rank, j);
                set(rank, j, at(piv, j));
                set(piv, j, tmp);
            }
        scale_row(rank, f_->inv(at(rank, col)), col);
        for (std::size_t i = 0; i < rows_; ++i)
            if (i != rank) eliminate_row(i, rank, at(i, col), col);
        pivots.push_back(col);
        ++rank;
    }
    return pivots;
}

KernelBasis FqMatrix::kernel() const {
    FqMatrix m = *this;
    auto pivots = m.rref_in_place();
    std::vector<bool> is_pivot(cols_, false);
    for (auto c : pivots) is_pivot[c] = true;
    KernelBasis out;
    for (std::size_t free_col = 0; free_col < cols_; ++free_col) {
        if (is_pivot[free_col]) continue;
        std::vector<std::uint32_t> v(cols_, 0u);
        v[free_col] = f_->one();
        for (std::size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = f_->neg(m.at(r, free_col));
        out.vectors.push_back(std::move(v));
    }
    return out;
}

std::optional<std::vector<std::uint32_t>> FqMatrix::solve(
    const std::vector<std::uint32_t>& b) const {
    if (b.size() != rows_) throw EngineError("solve shape mismatch");
    FqMatrix m = augmented_col(b);
    auto pivots = m.rref_in_place();
    // Inconsistent iff a pivot lands in the appended column.
    if (!pivots.empty() && pivots.back() == cols_) return std::nullopt;
    std::vector<std::uint32_t> x(cols_, 0u);
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = m.at(r, cols_);
    return x;
}

FqMatrix FqMatrix::inverse() const {
    if (rows_ != cols_) throw EngineError("inverse of non-square matrix");
    FqMatrix m = augmented(identity(f_, rows_));
    auto pivots = m.rref_in_place();
    if (pivots.size() != rows_ || (rows_ > 0 && pivots.back() >= rows_))
        throw EngineError("matrix is singular");
    FqMatrix out(f_, rows_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < rows_; ++j) out.set(i, j, m.at(i, rows_ + j));
    return out;
}

FqMatrix FqMatrix::augmented(const FqMatrix& o) const {
    if (o.rows_ != rows_) throw EngineError("augment shape mismatch");
    FqMatrix m(f_, rows_, cols_ + o.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) m.set(i, j, at(i, j));
        for (std::size_t j = 0; j < o.cols_; ++j) m.set(i, cols_ + j, o.at(i, j));
    }
    return m;
}

FqMatrix FqMatrix::augmented_col(const std::vector<std::uint32_t>& col) const {
    if (col.size() != rows_) throw EngineError("augment shape mismatch");
    FqMatrix m(f_, rows_, cols_ + 1);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) m.set(i, j, at(i, j));
        m.set(i, cols_, col[i]);
    }
    return m;
}

}  // namespace gf
}  // namespace charp
