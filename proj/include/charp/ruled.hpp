#pragma once

#include <cstdint>
#include <vector>

#include "charp/cech.hpp"
#include "charp/unipotent.hpp"

// Ruled surfaces P(F) -> E for F the split rank-2 bundle or the nonsplit
// extension of O by O.  All surface cohomology is reduced to the base curve
// through pushforwards.

namespace charp {
namespace ruled {

using cech::Bundle;
using cech::Ctx;
using ec::CurveFunction;
using ec::Divisor;

struct RuledSurface {
    Ctx ctx;
    bool split_form = true;
    Bundle fiber_bundle;  // rank 2, the F in P(F)
};

RuledSurface split_surface(Ctx ctx);
RuledSurface nonsplit_surface(Ctx ctx);

// pi_* O_S(mD) tensor O(M), as a bundle on E.
Bundle pushforward(const RuledSurface& s, int m, const Divisor& twist = Divisor{});

// h^0(S, O(mD) tensor pi^* M); fibers are P^1 so h^1 needs no R^1 term for
// m >= 0.
std::size_t section_count(const RuledSurface& s, int m, const Divisor& twist = Divisor{});
std::size_t surface_h1(const RuledSurface& s, int m, const Divisor& twist = Divisor{});

// Decomposition type of pi_* O(mD).
std::vector<int> pushforward_type(const RuledSurface& s, int m);

// pi_* O_{kD} for the thickened section, k >= 1: the quotient of
// pi_* O(kD) by the canonical inclusion of O_E.
Bundle thickening_pushforward(const RuledSurface& s, int k);
std::size_t thickened_section_h1(const RuledSurface& s, int k);

// R^1 pi_* O(-bD) for b >= 2, via Sym^(b-2)(F dual) tensor (det F) dual.
Bundle r1_pushforward_negative(const RuledSurface& s, int b);

struct PencilCheck {
    bool base_point_free = false;
    bool resultant_constant = false;  // the symbolic resultant glued globally
    std::uint32_t resultant = 0;      // its constant value
    bool samples_agree = true;        // pointwise fiber checks matched
    int sample_extension = 1;
};

// Whether the pencil |mD| (which must be 2-dimensional) has empty base
// locus.  Decided by the fiberwise resultant of the two sections, which
// glues to a constant on E; pointwise evaluations over small extension
// fields cross-check the verdict.
PencilCheck pencil_basepoint_check(const RuledSurface& s, int m);

// Same machinery on an explicitly given pair of chart-1 coefficient vectors
// of fiber forms of degree m (for constructed counterexamples).
PencilCheck pencil_pair_check(const RuledSurface& s, int m,
                              const std::vector<CurveFunction>& s1,
                              const std::vector<CurveFunction>& s2);

}  // namespace ruled
}  // namespace charp
