#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "charp/gf.hpp"

using namespace charp;
using namespace charp::gf;

namespace {

// Brute-force rank oracle: the largest k admitting a nonzero k x k minor.
// Determinants by cofactor expansion, so only usable for tiny matrices.
std::uint32_t det_cofactor(const Field& F, const std::vector<std::vector<std::uint32_t>>& m) {
    std::size_t n = m.size();
    if (n == 1) return m[0][0];
    std::uint32_t acc = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (m[0][j] == 0) continue;
        std::vector<std::vector<std::uint32_t>> sub;
        for (std::size_t i = 1; i < n; ++i) {
            std::vector<std::uint32_t> row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            sub.push_back(std::move(row));
        }
        std::uint32_t term = F->mul(m[0][j], det_cofactor(F, sub));
        acc = (j % 2 == 0) ? F->add(acc, term) : F->sub(acc, term);
    }
    return acc;
}

std::size_t rank_by_minors(const FqMatrix& a) {
    const Field& F = a.field();
    std::size_t maxk = std::min(a.rows(), a.cols());
    for (std::size_t k = maxk; k >= 1; --k) {
        std::vector<std::size_t> ri(k), ci(k);
        // Enumerate k-subsets of rows and columns.
        std::vector<std::size_t> rows(a.rows()), cols(a.cols());
        for (std::size_t i = 0; i < a.rows(); ++i) rows[i] = i;
        for (std::size_t i = 0; i < a.cols(); ++i) cols[i] = i;
        std::vector<bool> rsel(a.rows(), false), csel(a.cols(), false);
        std::fill(rsel.begin(), rsel.begin() + k, true);
        do {
            std::vector<std::size_t> rs;
            for (std::size_t i = 0; i < a.rows(); ++i)
                if (rsel[i]) rs.push_back(i);
            std::fill(csel.begin(), csel.end(), false);
            std::fill(csel.begin(), csel.begin() + k, true);
            do {
                std::vector<std::size_t> cs;
                for (std::size_t i = 0; i < a.cols(); ++i)
                    if (csel[i]) cs.push_back(i);
                std::vector<std::vector<std::uint32_t>> sub(k, std::vector<std::uint32_t>(k));
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t j = 0; j < k; ++j) sub[i][j] = a.at(rs[i], cs[j]);
                if (det_cofactor(F, sub) != 0) return k;
            } while (std::prev_permutation(csel.begin(), csel.end()));
        } while (std::prev_permutation(rsel.begin(), rsel.end()));
    }
    return 0;
}

}  // namespace

TEST_CASE("field creation basics") {
    auto F5 = FiniteField::create(5, 1);
    CHECK(F5->q() == 5);
    CHECK(F5->name() == "GF(5)");

    auto F4 = FiniteField::create(2, 2);
    CHECK(F4->q() == 4);
    // The only monic irreducible quadratic over GF(2): x^2 + x + 1.
    REQUIRE(F4->modulus().size() == 3);
    CHECK(F4->modulus()[0] == 1);
    CHECK(F4->modulus()[1] == 1);
    CHECK(F4->modulus()[2] == 1);

    CHECK_THROWS_AS(FiniteField::create(4, 1), ConfigError);
    CHECK_THROWS_AS(FiniteField::create(5, 1, {1, 2}), ConfigError);  // not monic
}

TEST_CASE("deterministic modulus for GF(3^2) and GF(2^3)") {
    auto F9 = FiniteField::create(3, 2);
    // Lexicographic search from the constant term up: x^2 + 1 is irreducible
    // over GF(3) and precedes every other candidate.
    CHECK(F9->modulus() == std::vector<std::uint32_t>{1, 0, 1});
    auto F8 = FiniteField::create(2, 3);
    // x^3 + 1 and x^3 + x are reducible, x^3 + x + 1 is the first hit.
    CHECK(F8->modulus() == std::vector<std::uint32_t>{1, 1, 0, 1});
}

TEST_CASE("field axioms on sampled elements") {
    for (auto [p, n] : {std::pair<int, int>{2, 1}, {5, 1}, {2, 2}, {3, 2}, {5, 2}}) {
        auto F = FiniteField::create(p, n);
        std::mt19937 rng(17 * p + n);
        std::uniform_int_distribution<std::uint32_t> d(0, static_cast<std::uint32_t>(F->q() - 1));
        for (int it = 0; it < 200; ++it) {
            std::uint32_t a = d(rng), b = d(rng), c = d(rng);
            CHECK(F->add(a, b) == F->add(b, a));
            CHECK(F->mul(a, b) == F->mul(b, a));
            CHECK(F->add(F->add(a, b), c) == F->add(a, F->add(b, c)));
            CHECK(F->mul(F->mul(a, b), c) == F->mul(a, F->mul(b, c)));
            CHECK(F->mul(a, F->add(b, c)) == F->add(F->mul(a, b), F->mul(a, c)));
            CHECK(F->add(a, F->neg(a)) == 0);
            if (a != 0) CHECK(F->mul(a, F->inv(a)) == F->one());
        }
    }
}

TEST_CASE("frobenius is a field homomorphism") {
    for (auto [p, n] : {std::pair<int, int>{2, 2}, {3, 2}, {5, 2}}) {
        auto F = FiniteField::create(p, n);
        for (std::uint64_t a = 0; a < F->q(); ++a)
            for (std::uint64_t b = 0; b < F->q(); ++b) {
                auto ca = static_cast<std::uint32_t>(a), cb = static_cast<std::uint32_t>(b);
                CHECK(F->frobenius(F->add(ca, cb)) == F->add(F->frobenius(ca), F->frobenius(cb)));
                CHECK(F->frobenius(F->mul(ca, cb)) == F->mul(F->frobenius(ca), F->frobenius(cb)));
            }
        for (std::uint64_t a = 0; a < F->q(); ++a) {
            auto ca = static_cast<std::uint32_t>(a);
            CHECK(F->frobenius(F->pth_root(ca)) == ca);
        }
    }
}

TEST_CASE("field embedding respects arithmetic") {
    auto F4 = FiniteField::create(2, 2);
    auto F16 = FiniteField::create(2, 4);
    FieldEmbedding e(F4, F16);
    for (std::uint32_t a = 0; a < 4; ++a)
        for (std::uint32_t b = 0; b < 4; ++b) {
            CHECK(e.map(F4->add(a, b)) == F16->add(e.map(a), e.map(b)));
            CHECK(e.map(F4->mul(a, b)) == F16->mul(e.map(a), e.map(b)));
        }
    CHECK(e.map(F4->one()) == F16->one());
}

TEST_CASE("kernel of (1 2) over GF(5)") {
    auto F = FiniteField::create(5, 1);
    FqMatrix m(F, 1, 2);
    m.set(0, 0, 1);
    m.set(0, 1, 2);
    auto k = m.kernel();
    REQUIRE(k.vectors.size() == 1);
    // The kernel is spanned by (-2, 1) = (3, 1).
    CHECK(k.vectors[0] == std::vector<std::uint32_t>{3, 1});
}

TEST_CASE("rank edge cases") {
    auto F = FiniteField::create(3, 1);
    FqMatrix z(F, 4, 3);
    CHECK(z.rank() == 0);
    CHECK(FqMatrix::identity(F, 5).rank() == 5);
    CHECK(z.kernel().vectors.size() == 3);
}

TEST_CASE("rank agrees with minor enumeration oracle") {
    auto F = FiniteField::create(3, 1);
    std::mt19937 rng(4242);
    std::uniform_int_distribution<std::uint32_t> d(0, 2);
    for (int it = 0; it < 20; ++it) {
        FqMatrix m(F, 6, 4);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j < 4; ++j) m.set(i, j, d(rng));
        CHECK(m.rank() == rank_by_minors(m));
    }
}

TEST_CASE("rank plus kernel dimension equals column count") {
    for (auto [p, n] : {std::pair<int, int>{2, 1}, {5, 1}, {2, 2}}) {
        auto F = FiniteField::create(p, n);
        std::mt19937 rng(91 * p + n);
        std::uniform_int_distribution<std::uint32_t> d(0, static_cast<std::uint32_t>(F->q() - 1));
        for (int it = 0; it < 30; ++it) {
            std::size_t r = 1 + it % 7, c = 1 + (it * 3) % 8;
            FqMatrix m(F, r, c);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < c; ++j) m.set(i, j, d(rng));
            CHECK(m.rank() + m.kernel().vectors.size() == c);
        }
    }
}

TEST_CASE("rank is invariant under row and column permutation") {
    auto F = FiniteField::create(5, 1);
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::uint32_t> d(0, 4);
    for (int it = 0; it < 10; ++it) {
        FqMatrix m(F, 5, 6);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 6; ++j) m.set(i, j, d(rng));
        std::vector<std::size_t> rp{4, 2, 0, 1, 3}, cp{5, 0, 3, 1, 4, 2};
        FqMatrix per(F, 5, 6);
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 6; ++j) per.set(i, j, m.at(rp[i], cp[j]));
        CHECK(m.rank() == per.rank());
    }
}

TEST_CASE("solve and inverse") {
    auto F = FiniteField::create(7, 1);
    FqMatrix m(F, 2, 2);
    m.set(0, 0, 2);
    m.set(0, 1, 3);
    m.set(1, 0, 1);
    m.set(1, 1, 4);
    auto inv = m.inverse();
    auto prod = m * inv;
    CHECK(prod.at(0, 0) == 1);
    CHECK(prod.at(0, 1) == 0);
    CHECK(prod.at(1, 0) == 0);
    CHECK(prod.at(1, 1) == 1);

    auto sol = m.solve({1, 2});
    REQUIRE(sol.has_value());
    auto back = m.apply(*sol);
    CHECK(back == std::vector<std::uint32_t>{1, 2});

    // Inconsistent system: duplicate row, different right-hand side.
    FqMatrix s(F, 2, 1);
    s.set(0, 0, 1);
    s.set(1, 0, 1);
    CHECK_FALSE(s.solve({1, 2}).has_value());
}

TEST_CASE("polynomial arithmetic and gcd") {
    auto F = FiniteField::create(5, 1);
    FqPoly x = FqPoly::x(F);
    FqPoly f = (x + FqPoly::constant(F, 1)) * (x + FqPoly::constant(F, 2));
    FqPoly g = (x + FqPoly::constant(F, 1)) * (x + FqPoly::constant(F, 3));
    auto d = FqPoly::gcd(f, g);
    CHECK(d.degree() == 1);
    CHECK(d.coeff(0) == 1);
    CHECK(d.coeff(1) == 1);
    FqPoly q, r;
    FqPoly::divmod(f, g, q, r);
    CHECK((q * g + r) == f);
}
