#pragma once

#include <optional>
#include <vector>

#include "charp/cech.hpp"

// Atiyah's indecomposable unipotent bundles F_r and decomposition-type
// identification for arbitrary unipotent bundles.

namespace charp {
namespace uni {

using cech::Bundle;
using cech::Ctx;
using cech::KMatrix;

// The unique indecomposable unipotent bundle of rank r, built as an iterated
// nonsplit extension of the structure sheaf.  Checks h0 = 1 before returning.
Bundle make_Fr(Ctx ctx, int r);

// Whether the transition matrix is upper unitriangular with trivial twist.
bool is_unipotent_shape(const Bundle& u);

// h0(U tensor F_s) for s = 1..smax.
std::vector<std::size_t> invariant_profile(const Bundle& u, int smax);

// The partition (r_1 >= r_2 >= ...) with U isomorphic to the direct sum of
// the F_{r_i}.  Identification is by invariant profile against candidate
// direct sums whose profiles come from the same engine.  rank_bound <= 0
// means the default 2p + 3.
std::vector<int> decomposition_type(const Bundle& u, int rank_bound = 0);

// Endomorphisms of U as chart-1 transition-side matrices; composition is
// matrix product.
std::vector<KMatrix> endomorphism_basis(const Bundle& u);

// Splitting certificate: an idempotent endomorphism other than 0 and the
// identity, if one exists within the searchable coefficient space.
std::optional<KMatrix> find_nontrivial_idempotent(const Bundle& u);

struct UniquenessReport {
    int r = 0;
    std::vector<std::size_t> profile_a, profile_b;
    bool match = false;
};

// Builds F_r along two different chains of extension representatives and
// compares the invariant profiles; a mismatch falsifies the engine.
UniquenessReport verify_atiyah_uniqueness(Ctx ctx, int r);

}  // namespace uni
}  // namespace charp
