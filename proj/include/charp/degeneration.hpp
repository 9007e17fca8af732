#pragma once

#include <cstdint>
#include <vector>

#include "charp/ruled.hpp"

// The degeneration over A^1: the ruled surface is split at t = 0 and the
// nonsplit extension at t != 0.  Plurigenera of the surfaces and of the
// cones over them, the kernel ranks of the Cech differential as a matrix
// over Fq[t], and the Cohen-Macaulay certificate for the cone fibers.

namespace charp {
namespace family {

using cech::Ctx;

enum class Fiber { zero, generic };

struct FamilyConfig {
    ruled::RuledSurface split;     // fiber at t = 0
    ruled::RuledSurface nonsplit;  // fiber at t != 0
    Fiber t = Fiber::generic;
    std::uint32_t p = 0;  // characteristic
    int mbar = 1;         // 2*mbar pencil members, each with coefficient 1/(mbar*p)

    const ruled::RuledSurface& surface() const { return t == Fiber::zero ? split : nonsplit; }
    FamilyConfig at(Fiber f) const {
        FamilyConfig c = *this;
        c.t = f;
        return c;
    }
    int members() const { return 2 * mbar; }
    long long coeff_den() const { return static_cast<long long>(mbar) * p; }
};

FamilyConfig make_family(Ctx ctx, int mbar = 1);

// P(O + L) over the surface with L = O(D) tensor pi^* A, deg A = a >= 1.
// Only the ample degree enters the section counts.
struct ConeModel {
    int ample_degree = 1;
};
ConeModel make_cone(const FamilyConfig& cfg, int ample_degree = 1);

// h^0(S_t, O(mD_t)).  m must be a positive multiple of mbar*p so the
// boundary multiple it stands for rounds exactly.
std::size_t surface_plurigenus(const FamilyConfig& cfg, int m);

// Sum over r = 0..m of h^0(S_t, L^r(mD)); the r >= 1 summands have
// positive degree on the base, hence h^1 = 0 and value (m+r+1)*r*a
// independent of the fiber.
std::size_t threefold_plurigenus(const ConeModel& cone, const FamilyConfig& cfg, int m);

struct PlurigeneraRow {
    int m = 0;
    std::size_t surface_zero = 0, surface_generic = 0, surface_jump = 0;
    std::size_t threefold_zero = 0, threefold_generic = 0, threefold_jump = 0;
};
struct PlurigeneraTable {
    std::uint32_t p = 0;
    int mbar = 1;
    int ample_degree = 1;
    std::vector<PlurigeneraRow> rows;
};
// One row per multiple of mbar*p up to m_max.
PlurigeneraTable plurigenera_table(const FamilyConfig& cfg, const ConeModel& cone, int m_max);

struct ParametricRanks {
    std::size_t generic_rank = 0;  // h^0 of the fiber bundle at generic t
    std::size_t special_rank = 0;  // h^0 at t = 0
    int level = 0;                 // truncation the kernels were read at
};
// Kernel ranks of the Cech differential of Sym^m [[1, t*g], [0, 1]],
// certified by Smith normal form over Fq[t]: the count of invariant
// factors gives the generic rank, the count of those with nonzero
// constant term gives the rank at t = 0.  Requires m <= 2p + 2.
ParametricRanks parametric_cohomology(const FamilyConfig& cfg, int m);

struct FiberCmReport {
    bool cm = false;
    std::size_t h1_observed = 0;
    std::size_t torsion_free_value = 1;
};
struct NonCmCertificate {
    FiberCmReport at_zero;     // reduced fiber of the trivial elliptic fibration
    FiberCmReport at_generic;  // p-fold thickening of the section
    std::size_t h1_first_thickening = 0;  // k = 1 value, both fibers
};
// R^1 of the fibration to P^1 has a 0-dimensional associated point exactly
// when the thickened-fiber h^1 exceeds the rank-1 torsion-free value.
NonCmCertificate non_cm_certificate(const FamilyConfig& cfg);

}  // namespace family
}  // namespace charp
