#include "pimsner/rokhlin.hpp"

#include <algorithm>
#include <cmath>

#include "pimsner/parallel.hpp"

namespace pimsner {

RokhlinTower::RokhlinTower(AlgebraPtr algebra_, int d_, int p_, std::vector<std::vector<AlgElement>> elems)
    : algebra(std::move(algebra_)), d(d_), p(p_), f(std::move(elems)) {
    if (d < 0 || p < 1) throw ArgumentError("tower needs d >= 0 and p >= 1");
    if (static_cast<int>(f.size()) != d + 1) throw StructuralError("tower colour count mismatch");
    for (const auto& row : f) {
        if (static_cast<int>(row.size()) != p) throw StructuralError("tower height mismatch");
        for (const auto& e : row) {
            if (!e.parent()->same_as(*algebra)) throw StructuralError("tower element over wrong algebra");
            if (!is_positive(e, kPosTol)) throw PositivityError("tower element is not positive");
            if (op_norm(e) > 1.0 + kPosTol) throw PositivityError("tower element is not a contraction");
        }
    }
}

TowerDefects check_tower(const RokhlinTower& t, const Correspondence& h,
                         const std::vector<ModuleVector>& test_vectors,
                         const std::vector<AlgElement>& test_elements) {
    if (!t.algebra->same_as(*h.algebra())) throw StructuralError("tower and correspondence algebra mismatch");
    for (const auto& z : test_vectors)
        if (!z.space()->same_as(*h.space())) throw StructuralError("test vector not in the correspondence");
    TowerDefects out;
    const int p = t.p, d = t.d;
    // orthogonality within each colour
    out.orth = kern::max_index(static_cast<std::int64_t>(d + 1) * p * p, [&](std::int64_t idx) {
        int l = static_cast<int>(idx / (p * p));
        int k = static_cast<int>((idx / p) % p), k2 = static_cast<int>(idx % p);
        if (k == k2) return 0.0;
        return op_norm(t.f[l][k] * t.f[l][k2]);
    });
    AlgElement sum = t.algebra->zero();
    for (int l = 0; l <= d; ++l)
        for (int k = 0; k < p; ++k) sum += t.f[l][k];
    out.unit = op_norm(sum - t.algebra->identity());
    int nz = static_cast<int>(test_vectors.size());
    out.shift = kern::max_index(static_cast<std::int64_t>(d + 1) * p * nz, [&](std::int64_t idx) {
        int l = static_cast<int>(idx / (static_cast<std::int64_t>(p) * nz));
        int k = static_cast<int>((idx / nz) % p);
        const ModuleVector& z = test_vectors[idx % nz];
        ModuleVector lhs = z.right_mul(t.f[l][k]);
        ModuleVector rhs = h.left_mul(t.f[l][(k + 1) % p], z);
        return (lhs - rhs).norm();
    });
    int na = static_cast<int>(test_elements.size());
    out.commute = kern::max_index(static_cast<std::int64_t>(d + 1) * p * na, [&](std::int64_t idx) {
        int l = static_cast<int>(idx / (static_cast<std::int64_t>(p) * na));
        int k = static_cast<int>((idx / na) % p);
        const AlgElement& a = test_elements[idx % na];
        return op_norm(t.f[l][k] * a - a * t.f[l][k]);
    });
    return out;
}

RokhlinTower synthesize_cyclic_tower(int n, int p, int d_target) {
    if (n < 1 || p < 1) throw ArgumentError("synthesize_cyclic_tower: n, p must be >= 1");
    if (d_target != 0 && d_target != 1) throw ArgumentError("synthesize_cyclic_tower: d_target in {0,1}");
    AlgebraPtr alg = ScalarAlgebra::make(std::vector<int>(n, 1));
    if (d_target == 0) {
        if (p > n || n % p != 0) throw InfeasibleError("exact cyclic tower needs p | n");
        // f_k = indicator of {j : j ≡ -k mod p}; then f_k = alpha(f_{k+1}) for
        // the shift alpha(chi_X) = chi_{X+1}, exactly
        std::vector<std::vector<AlgElement>> f(1);
        for (int k = 0; k < p; ++k) {
            std::vector<int> pts;
            for (int j = 0; j < n; ++j)
                if (((j + k) % p) == 0) pts.push_back(j);
            f[0].push_back(alg->indicator(pts));
        }
        return RokhlinTower(alg, 0, p, std::move(f));
    }
    // two-colour interpolation: colour 0 carries residues of j (seam at j=0),
    // colour 1 residues of j - n/2 (seam at n/2); trapezoid mixing profiles
    // vanish on their own colour's seam, so the only defect is the ramp slope
    if (n < 8) throw InfeasibleError("interpolated tower needs n >= 8");
    int w = std::max(1, n / 8);
    int m0 = n / 2;
    auto mu = [&](int j) {
        int dist0 = std::min(j, n - j);
        double ramp = static_cast<double>(m0 - 2 * w);
        double v = (static_cast<double>(dist0) - w) / ramp;
        return std::clamp(v, 0.0, 1.0);
    };
    std::vector<std::vector<AlgElement>> f(2, std::vector<AlgElement>());
    for (int k = 0; k < p; ++k) {
        AlgElement f0 = alg->zero(), f1 = alg->zero();
        for (int j = 0; j < n; ++j) {
            if (((j + k) % p) == 0) f0.block(j)(0, 0) = mu(j);
            if ((((j - m0 + n) % n) + k) % p == 0) f1.block(j)(0, 0) = 1.0 - mu(j);
        }
        f[0].push_back(f0);
        f[1].push_back(f1);
    }
    return RokhlinTower(alg, 1, p, std::move(f));
}

double bump(int p, int k) {
    if (p < 3 || p % 2 == 0) throw ArgumentError("tent weight requires odd p >= 3");
    if (k < 0) throw ArgumentError("tent weight index must be >= 0");
    if (k >= p) return 0.0;
    int pp = p - 1;
    return static_cast<double>(pp - std::abs(pp - 2 * k)) / pp;
}

int bump_partner(int p, int k) {
    if (p < 3 || p % 2 == 0) throw ArgumentError("tent partner requires odd p >= 3");
    return (k + (p - 1) / 2) % (p - 1);
}

BumpLemmaResult bump_lemma_check(int p, int big_n, const std::vector<AlgElement>& f, BumpConvention conv) {
    if (p < 3 || p % 2 == 0) throw ArgumentError("bump_lemma_check requires odd p >= 3");
    if (static_cast<int>(f.size()) != p) throw ArgumentError("bump_lemma_check needs exactly p contractions");
    if (big_n < 0 || big_n > p - 1) throw ArgumentError("bump_lemma_check needs 0 <= N <= p-1");
    const auto& alg = f.front().parent();
    AlgElement lhs = alg->zero();
    for (int k = big_n; k <= p - 1; ++k) {
        int partner = (conv == BumpConvention::PeriodPMinus1) ? bump_partner(p, k) : (k + (p - 1) / 2) % p;
        lhs += (f[k] + f[partner]) * Cplx(bump(p, k));
    }
    AlgElement ref = alg->zero();
    int ref_top = (conv == BumpConvention::PeriodPMinus1) ? p - 2 : p - 1;
    for (int k = 0; k <= ref_top; ++k) ref += f[k];
    BumpLemmaResult out;
    out.gap = op_norm(lhs - ref);
    out.bound = 4.0 * big_n * big_n / (p - 1);
    if (conv == BumpConvention::PeriodPMinus1 && out.gap > out.bound + 1e-9)
        throw InternalError("bump lemma bound violated: gap " + std::to_string(out.gap) + " > " +
                            std::to_string(out.bound));
    return out;
}

ObstructionReport nonperiodicity_obstruction(const std::vector<AlgElement>& f1,
                                             const std::vector<AlgElement>& f2,
                                             const Correspondence& power_space, const ModOperator& u,
                                             double eps) {
    if (f1.empty() || f1.size() != f2.size()) throw ArgumentError("obstruction needs matching colour lists");
    if (eps <= 0) throw ArgumentError("obstruction needs eps > 0");
    const auto& alg = f1.front().parent();
    // witness checks: adjointable unitary with U*U = UU* = id and bimodularity
    if (!u.domain()->same_as(*power_space.space())) throw WitnessError("witness domain mismatch");
    if (u.codomain()->free_rank() != 1) throw WitnessError("witness must land in the identity module");
    ModOperator uu = u.compose(u.adjoint());
    ModOperator uu2 = u.adjoint().compose(u);
    if ((uu - u.codomain()->identity_operator()).frobenius() > 1e-9 ||
        (uu2 - u.domain()->identity_operator()).frobenius() > 1e-9)
        throw WitnessError("witness is not unitary within 1e-9");
    Correspondence ident = Correspondence::identity_corr(alg);
    for (const auto& b : alg->basis()) {
        ModOperator lhs = u.compose(power_space.left_action(b));
        ModOperator rhs = ident.left_action(b).compose(u);
        if ((lhs - rhs).frobenius() > 1e-8) throw WitnessError("witness is not a bimodule map");
    }
    ObstructionReport rep;
    int d = static_cast<int>(f1.size()) - 1;
    AlgElement sum = alg->zero();
    for (size_t l = 0; l < f1.size(); ++l) {
        rep.orth_defect = std::max(rep.orth_defect, op_norm(f1[l] * f2[l]));
        sum += f1[l] + f2[l];
    }
    rep.unit_defect = op_norm(sum - alg->identity());
    // v = U^{-1}(1_A)
    ModuleVector one = ident.space()->basis_vector(0);
    ModuleVector v = u.adjoint().apply(one);
    for (size_t l = 0; l < f1.size(); ++l) {
        ModuleVector lhs = v.right_mul(f1[l]);
        ModuleVector rhs = power_space.left_mul(f2[l], v);
        rep.shift_defect = std::max(rep.shift_defect, (lhs - rhs).norm());
    }
    rep.norm_bound = 2.0 * (d + 1) * std::sqrt(2.0 * eps);
    rep.contradiction = rep.norm_bound < 1.0 - eps;
    return rep;
}

} // namespace pimsner
