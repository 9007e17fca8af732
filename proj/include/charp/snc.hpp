#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "charp/degeneration.hpp"

// Combinatorial lc/dlt checking for SNC pairs.  Multiplicities enter as
// annotations (upper bounds per stratum), never from equations; the
// checker is a sufficient test, so a failed condition yields no claim in
// the other direction.

namespace charp {
namespace snc {

// Exact rational arithmetic on int64 with overflow detection.
class Rational {
  public:
    Rational() = default;
    Rational(long long n) : n_(n), d_(1) {}  // NOLINT: implicit integers wanted
    Rational(long long n, long long d);

    static Rational parse(const std::string& s);  // "a" or "a/b"

    long long num() const { return n_; }
    long long den() const { return d_; }

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator-() const { return Rational(-n_, d_); }

    bool operator==(const Rational& o) const { return n_ == o.n_ && d_ == o.d_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const;
    bool operator<=(const Rational& o) const { return *this < o || *this == o; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator>=(const Rational& o) const { return o <= *this; }

    std::string str() const;

  private:
    long long n_ = 0;
    long long d_ = 1;
};

struct DeltaComponent {
    std::string name;
    Rational coeff;
};

struct Stratum {
    std::vector<int> J;  // sorted divisor indices; empty set stands for the ambient space
    int dim = 0;
    bool contains_delta_component = false;
    Rational max_mult;  // max over the stratum of mult_x(Delta restricted)
    bool base_dependent = false;  // the source annotation referenced the base parameter
};

struct StratifiedPair {
    int dimension = 0;
    std::vector<std::string> divisors;
    std::vector<Stratum> strata;
    std::vector<DeltaComponent> delta;
};

enum class Verdict { dlt, lc, condition_violated };
const char* verdict_name(Verdict v);

// Structural validation: index ranges, dimension drops, one annotation row
// per boundary divisor, positive coefficients.  Throws ConfigError.
void validate_pair(const StratifiedPair& p);

// Condition (1): no delta component contains a stratum component, and all
// stratum multiplicities stay <= 1 (dlt needs < 1 and fractional delta).
// `strict` demands the open inequalities, so equality downgrades the
// result to condition_violated instead of lc.  A condition_violated
// verdict carries no lc refutation; the test is one-directional.
Verdict check_condition(const StratifiedPair& p, bool strict = false);

struct PointDatum {
    std::vector<int> through;  // boundary divisors passing through the center
    Rational mult_delta;       // mult_x(Delta)
};

struct BlowupStep {
    PointDatum center;
    Rational discrepancy;
};

// (n - 1) - mult_x(D) - mult_x(Delta) for the exceptional divisor of the
// point blow-up; >= -1 whenever the pair satisfies condition (1) at x.
Rational discrepancy_first_blowup(const StratifiedPair& p, const PointDatum& x);

// The blown-up pair: the exceptional divisor joins the boundary and every
// new stratum inherits the conservative bound mult <= mult_x(Delta).
// Requires condition (1) at the center; asserts it still holds after.
StratifiedPair blowup_step(const StratifiedPair& p, const PointDatum& x);

struct FamilyFiber {
    std::string kind;  // "generic" or "special"
    std::string fiber_divisor;
    StratifiedPair pair;
};
struct FamilyPair {
    std::vector<FamilyFiber> fibers;
};
struct FiberVerdict {
    std::string kind;
    Verdict verdict = Verdict::condition_violated;
};

// Per-fiber check_condition.  Rejects inputs with no generic row, with a
// fiber divisor missing from the boundary, or with base-parameter-
// dependent annotations; only tables free of the base coordinate make the
// verdict stable under base change.
std::vector<FiberVerdict> family_check(const FamilyPair& f);

// The annotated pair for the cone family (Y, Delta_Y + Z0 + Z'inf + D_Y
// + Y_t).  Z'inf is (1/zprime_scale)(M1 + M2) with M_i general in
// |zprime_scale * Zinf|; the terminal variant replaces D_Y by mbar
// further pencil members.  The pencil disjointness feeding the
// annotations is verified on the actual surfaces first.
FamilyPair paper_config(const family::FamilyConfig& cfg, const family::ConeModel& cone,
                        int zprime_scale = 64, bool terminal_variant = false);

StratifiedPair pair_from_json(const nlohmann::json& j);
nlohmann::json pair_to_json(const StratifiedPair& p);
FamilyPair family_from_json(const nlohmann::json& j);
nlohmann::json family_to_json(const FamilyPair& f);

}  // namespace snc
}  // namespace charp
