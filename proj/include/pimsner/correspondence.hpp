// Correspondences: a module plus a unital *-homomorphism A -> B(H). The
// action is stored structurally (identity / crossed product / twisted free /
// explicit basis-image table / direct sum / interior tensor) and evaluated
// recursively, so tensor powers never expand through the coefficient basis.
//
// Interior tensor products are realized concretely: for x in H, y in K, x⊗y
// has coordinates (ω_K(x_i) y)_i inside the free ambient of rank m_H·m_K,
// the tensor projection is (P_H⊗1)·(1⊗P_K), and the left action of a is
// ω_H(a)⊗1.

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "pimsner/module.hpp"

namespace pimsner {

enum class ActionKind { Identity, CrossedProduct, TwistedFree, Explicit, DirectSum, Tensor };

class Correspondence {
  public:
    Correspondence() = default;

    // left multiplication on the rank-1 free module A
    static Correspondence identity_corr(AlgebraPtr algebra);
    // module A with a.b = alpha(a)b
    static Correspondence crossed_product(const Automorphism& alpha);
    // free rank = #alphas, a.xi_i = xi_i.alpha_i(a)
    static Correspondence twisted_free(std::vector<Automorphism> alphas);
    // arbitrary: images of the matrix-unit basis of A (validated)
    static Correspondence explicit_action(SpacePtr space, std::vector<ModOperator> basis_images);

    bool valid() const { return impl_ != nullptr; }
    const SpacePtr& space() const;
    const AlgebraPtr& algebra() const { return space()->algebra(); }
    int rank() const { return space()->free_rank(); }
    ActionKind kind() const;
    const std::vector<Automorphism>& automorphisms() const;

    AlgMatrix left_action_matrix(const AlgElement& a) const;
    ModOperator left_action(const AlgElement& a) const;
    ModuleVector left_mul(const AlgElement& a, const ModuleVector& x) const;

    // worst deviation from the *-homomorphism laws over the full basis of A
    double action_defect() const;

    struct Impl;
    explicit Correspondence(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    const std::shared_ptr<const Impl>& impl() const { return impl_; }

  private:
    std::shared_ptr<const Impl> impl_;
};

Correspondence crossed_product_corr(const Automorphism& alpha);
Correspondence twisted_free_corr(const std::vector<Automorphism>& alphas);
Correspondence direct_sum_corr(const Correspondence& h, const Correspondence& k);

// S ⊗ 1_K : entrywise image of S under the left action of K (raw AlgMatrix,
// shape rows(S)·m_K x cols(S)·m_K)
AlgMatrix inflate_matrix(const AlgMatrix& s, const Correspondence& k);

// the interior tensor product H ⊗ K as a correspondence
Correspondence tensor_space(const Correspondence& h, const Correspondence& k);

// coordinates of x ⊗ y in the ambient of tensor_space(h, k)
std::vector<AlgElement> tensor_coords(const Correspondence& h, const ModuleVector& x,
                                      const Correspondence& k, const ModuleVector& y);

// x ⊗ y as a vector of tensor_space(h, k)
ModuleVector tensor(const Correspondence& h, const ModuleVector& x, const Correspondence& k,
                    const ModuleVector& y);

class TensorPowerCache {
  public:
    explicit TensorPowerCache(Correspondence base);
    // H^{⊗0} = A (identity correspondence), H^{⊗1} = H, H^{⊗k} = H ⊗ H^{⊗k-1}
    const Correspondence& power(int k) const;
    const Correspondence& base() const { return power(1); }

  private:
    mutable std::vector<Correspondence> powers_;
};

} // namespace pimsner
