// Rokhlin towers: (d+1) colours of height-p families of positive contractions
// with measured defects (orthogonality, unit, shift compatibility with the
// left module action, commutation), exact synthesis for cyclic shifts, the
// tent weights d_p with their half-period partition, the truncation lemma
// check, and the nonperiodicity obstruction.

#pragma once

#include <vector>

#include "pimsner/correspondence.hpp"

namespace pimsner {

struct RokhlinTower {
    AlgebraPtr algebra;
    int d = 0; // colour count minus 1
    int p = 0; // height, indices k in Z/p
    std::vector<std::vector<AlgElement>> f; // f[l][k], l in 0..d, k in 0..p-1

    RokhlinTower(AlgebraPtr algebra, int d, int p, std::vector<std::vector<AlgElement>> elems);
    const AlgElement& at(int l, int k) const { return f[l][(k % p + p) % p]; }
};

struct TowerDefects {
    double orth = 0.0;    // max ||f_k^l f_{k'}^l||, k != k'
    double unit = 0.0;    // ||Σ f - 1||
    double shift = 0.0;   // max over z in V of ||z.f_k^l - f_{k+1}^l.z||
    double commute = 0.0; // max ||[f_k^l, a]|| over a in F

    bool admissible(double eps) const {
        return orth < eps && unit < eps && shift < eps && commute < eps;
    }
};

TowerDefects check_tower(const RokhlinTower& t, const Correspondence& h,
                         const std::vector<ModuleVector>& test_vectors,
                         const std::vector<AlgElement>& test_elements);

// towers over C(Z/n) for the cyclic-shift correspondence. d_target = 0 needs
// p | n and gives indicator towers with zero defects; d_target = 1 uses two
// trapezoid-interpolated families whose only nonzero defect is the shift
// defect, of order ~4/n (re-measure with check_tower).
RokhlinTower synthesize_cyclic_tower(int n, int p, int d_target);

// tent weight d_p(k) = 1 - |p-1-2k|/(p-1), 0 for k >= p; p odd
double bump(int p, int k);

// partner index for the exact partition d_p(k) + d_p(partner(p,k)) = 1:
// arithmetic runs mod p-1, the tent's natural period
int bump_partner(int p, int k);

enum class BumpConvention {
    PeriodPMinus1, // sound: pairing mod (p-1), reference sum Σ_{k<p-1} f_k
    PeriodP        // as-displayed: pairing mod p, reference sum Σ_{k<p} f_k
};

struct BumpLemmaResult {
    double gap;
    double bound; // 4 N^2 / (p-1)
};

// gap between Σ_{k=N}^{p-1} d_p(k)(f_k + f_partner) and the reference sum.
// In the sound convention the bound is a theorem and is asserted; the other
// convention reproduces the displayed arithmetic and is reported unasserted.
BumpLemmaResult bump_lemma_check(int p, int big_n, const std::vector<AlgElement>& f,
                                 BumpConvention conv = BumpConvention::PeriodPMinus1);

struct ObstructionReport {
    double orth_defect = 0.0;  // max ||f_1^l f_2^l||
    double unit_defect = 0.0;  // ||Σ_l (f_1^l + f_2^l) - 1||
    double shift_defect = 0.0; // max ||v.f_1^l - f_2^l.v||
    double norm_bound = 0.0;   // 2 (d+1) sqrt(2 eps)
    bool contradiction = false; // norm_bound < 1 - eps
};

// Height-2 aggregated tower {f_1^l, f_2^l} against a unitary bimodule witness
// u: H^{⊗k} -> A. If all three defects were < eps, every ||f_i^l|| < sqrt(2 eps)
// and the unit sum is below 2(d+1)sqrt(2 eps); when that bound is < 1 - eps no
// such tower family can exist, certifying nonperiodicity at this eps.
ObstructionReport nonperiodicity_obstruction(const std::vector<AlgElement>& f1,
                                             const std::vector<AlgElement>& f2,
                                             const Correspondence& power_space, const ModOperator& u,
                                             double eps);

} // namespace pimsner
