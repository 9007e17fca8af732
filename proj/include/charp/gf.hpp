#pragma once

// Exact arithmetic over GF(p^n) plus dense linear algebra used by the
// cohomology engine.  Everything here is deterministic: the modulus for an
// extension field is the lexicographically smallest monic irreducible, and
// all eliminations pivot on the first nonzero entry in column order.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace charp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input (CLI maps this to exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

// Internal inconsistency: a postcondition the math guarantees failed.
struct EngineError : Error {
    using Error::Error;
};

// An enumeration bound (CHARP_MAX_FIELD_ENUM) was exceeded.
struct BoundExceeded : Error {
    using Error::Error;
};

namespace gf {

class FiniteField;
using Field = std::shared_ptr<const FiniteField>;

// Elements are stored as integer codes: the element sum c_i * alpha^i maps to
// the integer sum c_i * p^i, so code order is the lexicographic order on
// coefficient tuples read from the constant term up.
class FiniteField : public std::enable_shared_from_this<FiniteField> {
  public:
    // modulus, when given, lists monic coefficients c_0..c_n over GF(p) with
    // c_n = 1.  Without it the lexicographically smallest monic irreducible
    // of degree n is used.
    static Field create(std::int64_t p, int n,
                        const std::vector<std::int64_t>& modulus = {});

    std::int64_t p() const { return p_; }
    int degree() const { return n_; }
    std::uint64_t q() const { return q_; }
    const std::vector<std::uint32_t>& modulus() const { return modulus_; }
    std::string name() const;

    std::uint32_t zero() const { return 0; }
    std::uint32_t one() const { return n_ >= 0 ? 1u : 0u; }

    std::uint32_t add(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t sub(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t neg(std::uint32_t a) const;
    std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t inv(std::uint32_t a) const;
    std::uint32_t div(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;
    // x -> x^p, the absolute Frobenius.
    std::uint32_t frobenius(std::uint32_t a) const;
    // Inverse of Frobenius; total on a finite field.
    std::uint32_t pth_root(std::uint32_t a) const;

    std::uint32_t from_int(std::int64_t v) const;
    std::vector<std::int64_t> coeffs(std::uint32_t a) const;
    std::string to_string(std::uint32_t a) const;

    bool has_tables() const { return !mul_table_.empty(); }
    const std::uint16_t* add_table() const { return add_table_.data(); }
    const std::uint16_t* mul_table() const { return mul_table_.data(); }

  private:
    FiniteField() = default;

    std::int64_t p_ = 0;
    int n_ = 0;
    std::uint64_t q_ = 0;
    std::vector<std::uint32_t> modulus_;  // codes of c_0..c_n over GF(p)

    std::vector<std::uint16_t> add_table_;
    std::vector<std::uint16_t> mul_table_;
    std::vector<std::uint32_t> inv_table_;

    std::uint32_t mul_generic(std::uint32_t a, std::uint32_t b) const;
    std::uint32_t inv_generic(std::uint32_t a) const;
    void decode(std::uint32_t a, std::int64_t* out) const;
    std::uint32_t encode(const std::int64_t* c) const;
};

// Embedding GF(p^n) -> GF(p^m) for n | m.  The generator image is the
// lexicographically smallest root of the source modulus in the target, so
// the embedding is deterministic.
class FieldEmbedding {
  public:
    FieldEmbedding(Field src, Field dst);
    std::uint32_t map(std::uint32_t a) const;
    const Field& source() const { return src_; }
    const Field& target() const { return dst_; }

  private:
    Field src_, dst_;
    std::vector<std::uint32_t> gen_powers_;  // images of alpha^0..alpha^(n-1)
};

// Dense polynomial over one field; coefficient codes, index = degree.
class FqPoly {
  public:
    FqPoly() = default;
    explicit FqPoly(Field f) : f_(std::move(f)) {}
    FqPoly(Field f, std::vector<std::uint32_t> c);

    static FqPoly zero(const Field& f) { return FqPoly(f); }
    static FqPoly constant(const Field& f, std::uint32_t c);
    static FqPoly x(const Field& f);

    const Field& field() const { return f_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    std::uint32_t coeff(int i) const;
    std::uint32_t leading() const;
    const std::vector<std::uint32_t>& coeffs() const { return c_; }

    FqPoly operator+(const FqPoly& o) const;
    FqPoly operator-(const FqPoly& o) const;
    FqPoly operator*(const FqPoly& o) const;
    FqPoly scaled(std::uint32_t c) const;
    bool operator==(const FqPoly& o) const;

    std::uint32_t eval(std::uint32_t x) const;
    FqPoly derivative() const;
    FqPoly monic() const;

    // Division with remainder; divisor must be nonzero.
    static void divmod(const FqPoly& a, const FqPoly& b, FqPoly& q, FqPoly& r);
    static FqPoly gcd(FqPoly a, FqPoly b);  // monic gcd, gcd(0,0) = 0
    static FqPoly rem(const FqPoly& a, const FqPoly& b);
    // a^e mod m by square and multiply.
    static FqPoly powmod(const FqPoly& a, std::uint64_t e, const FqPoly& m);

    std::string to_string(const std::string& var = "x") const;

  private:
    Field f_;
    std::vector<std::uint32_t> c_;
    void trim();
};

// Irreducibility over the prime field GF(p) (used for modulus search and
// validation).  f must be monic of degree >= 1 over a degree-1 field.
bool is_irreducible_prime_field(const FqPoly& f);

struct KernelBasis {
    // Columns are kernel vectors; dim = cols.
    std::vector<std::vector<std::uint32_t>> vectors;
};

// Row-major dense matrix over one finite field.
class FqMatrix {
  public:
    FqMatrix() = default;
    FqMatrix(Field f, std::size_t rows, std::size_t cols);

    const Field& field() const { return f_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::uint32_t at(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }
    void set(std::size_t i, std::size_t j, std::uint32_t v) { a_[i * cols_ + j] = v; }

    static FqMatrix identity(const Field& f, std::size_t n);

    FqMatrix transpose() const;
    FqMatrix operator*(const FqMatrix& o) const;
    FqMatrix mul_vector_matrix() const = delete;
    std::vector<std::uint32_t> apply(const std::vector<std::uint32_t>& v) const;

    // Rank by fraction-free forward elimination with first-nonzero pivoting.
    std::size_t rank() const;
    // Reduced row echelon form; returns pivot column indices.
    std::vector<std::size_t> rref_in_place();
    // Basis of the right kernel {v : Av = 0}.
    KernelBasis kernel() const;
    // One solution of Ax = b, or nullopt when inconsistent.
    std::optional<std::vector<std::uint32_t>> solve(const std::vector<std::uint32_t>& b) const;
    // Inverse; throws EngineError when singular.
    FqMatrix inverse() const;

    // Appends the columns of o (same row count) to the right.
    FqMatrix augmented(const FqMatrix& o) const;
    // Appends a single column.
    FqMatrix augmented_col(const std::vector<std::uint32_t>& col) const;

  private:
    Field f_;
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<std::uint32_t> a_;

    void eliminate_row(std::size_t target, std::size_t source, std::uint32_t factor,
                       std::size_t from_col);
    void scale_row(std::size_t row, std::uint32_t factor, std::size_t from_col);
};

}  // namespace gf
}  // namespace charp
