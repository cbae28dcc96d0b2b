// Truncated Fock modules F_q(H) = ⊕_{k<q} H^{⊗k}, graded (band) operators
// with per-degree blocks and overflow tracking, creation operators,
// T_x T_y* band products, the span of e_{x,y}⊗1_{H^{⊗k}} below a cutoff p,
// the tent-compression map, quasicentral approximate-unit checks, and
// monotone compression norm sweeps.
//
// Overflow semantics: a graded operator holds blocks (src degree -> tgt
// degree) strictly below the cutoff. col_exact[k] records that column k of
// the represented operator has no components at degrees >= cutoff, so the
// restriction to exact columns is a genuine compression of the untruncated
// operator and its norm is a certified lower bound; row_exact is the mirror
// for adjoints. Composition is exact on non-overflow paths and flags are
// propagated pessimistically.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "pimsner/correspondence.hpp"

namespace pimsner {

// elementary tensor x_1 ⊗ ... ⊗ x_k (k >= 1), or a degree-0 scalar in A
class ElemTensor {
  public:
    explicit ElemTensor(AlgElement scalar);
    explicit ElemTensor(std::vector<ModuleVector> factors);

    int length() const { return static_cast<int>(factors_.size()); }
    bool is_scalar() const { return factors_.empty(); }
    const AlgElement& scalar() const { return scalar_; }
    const std::vector<ModuleVector>& factors() const { return factors_; }

    ElemTensor left_mul(const Correspondence& h, const AlgElement& a) const;  // a . x
    ElemTensor right_mul(const AlgElement& b) const;                          // x . b

  private:
    AlgElement scalar_;
    std::vector<ModuleVector> factors_;
};

class FockTruncation {
  public:
    FockTruncation(std::shared_ptr<TensorPowerCache> cache, int cutoff);
    static std::shared_ptr<const FockTruncation> make(const Correspondence& base, int cutoff);
    // same base powers, new cutoff
    std::shared_ptr<const FockTruncation> with_cutoff(int cutoff) const;

    int cutoff() const { return cutoff_; }
    const Correspondence& power(int k) const { return cache_->power(k); }
    const Correspondence& base() const { return cache_->base(); }
    const AlgebraPtr& algebra() const { return base().algebra(); }
    const std::shared_ptr<TensorPowerCache>& cache() const { return cache_; }

    int degree_rank(int k) const;   // module rank of H^{⊗k} ambient
    int degree_dim(int k) const;    // complex dimension rank * N
    int degree_offset(int k) const; // row offset in the dense window
    int total_dim() const;

    // realizes an elementary tensor as a vector of H^{⊗k}
    ModuleVector realize(const ElemTensor& t) const;

  private:
    std::shared_ptr<TensorPowerCache> cache_;
    int cutoff_;
    std::vector<int> ranks_, dims_, offsets_;
    int total_dim_ = 0;
};

using FockPtr = std::shared_ptr<const FockTruncation>;

class GradedOperator {
  public:
    GradedOperator() = default;
    explicit GradedOperator(FockPtr fock); // zero, fully exact

    static GradedOperator identity(FockPtr fock);
    // left action of a on every degree
    static GradedOperator degree_zero(FockPtr fock, const AlgElement& a);

    const FockPtr& fock() const { return fock_; }
    const std::map<std::pair<int, int>, ModOperator>& blocks() const { return blocks_; }
    bool col_exact(int k) const { return col_exact_[k]; }
    bool row_exact(int k) const { return row_exact_[k]; }

    void add_block(int src, int tgt, ModOperator op);
    void mark_col_overflow(int src) { col_exact_[src] = 0; }
    void mark_row_overflow(int tgt) { row_exact_[tgt] = 0; }

    GradedOperator operator+(const GradedOperator& o) const;
    GradedOperator operator-(const GradedOperator& o) const;
    GradedOperator operator*(Cplx s) const;
    GradedOperator compose(const GradedOperator& rhs) const; // this ∘ rhs
    GradedOperator adjoint() const;

    // dense matrix of all in-window blocks (cutoff compression)
    Mat dense_window() const;
    // spectral norm of the restriction to exact columns: a certified lower
    // bound for the norm of the represented operator
    double certified_norm() const;
    // Frobenius norm over all in-window blocks (upper bounds the window)
    double window_frobenius() const;
    bool fully_exact() const;

  private:
    FockPtr fock_;
    std::map<std::pair<int, int>, ModOperator> blocks_;
    std::vector<char> col_exact_, row_exact_;
};

// T_x for an elementary tensor of length >= 1; degree shift +|x|
GradedOperator creation(const ElemTensor& x, FockPtr fock);

// T_x T_y*, assembled blockwise as e_{x,y} ⊗ 1_{H^{⊗k}} per source degree
GradedOperator band_product(const ElemTensor& x, const ElemTensor& y, FockPtr fock);

// e_{x,y} ⊗ 1_{H^{⊗k}} as the single-block operator of B(F_p)
GradedOperator span_element(const ElemTensor& x, const ElemTensor& y, int k, FockPtr fock);

// the tent weight d_p(k); 0 for k >= p (rokhlin module owns the formula)
double bump(int p, int k);

struct PhiTerm {
    int k;
    double coeff; // sqrt(d_p(k+|x|) d_p(k+|y|))
};

struct PhiImage {
    int p;
    ElemTensor x, y;
    std::vector<PhiTerm> terms;
    GradedOperator op; // element of the p-cutoff span
};

// compression of T_x T_y* by sqrt(Delta) P: Σ_k sqrt(d_p(k+|x|) d_p(k+|y|)) e_{x,y}⊗1_k
PhiImage phi_compression(const ElemTensor& x, const ElemTensor& y, int p, FockPtr fock);

// spanning family of span{e_{x,y}⊗1_k : max(|x|,|y|)+k < p} built from the
// standard module basis tensors with algebra multipliers on the left leg
struct DpSpanElement {
    ElemTensor x, y;
    int k;
    GradedOperator op; // at cutoff p
};

struct DpFamily {
    int p;
    FockPtr fock; // cutoff p
    std::vector<DpSpanElement> elems;
};

// max_len limits |x|,|y| (default p-1); basis tuples over the free generators
DpFamily dp_spanning_family(const Correspondence& h, int p, int max_len = -1);

struct QcReport {
    double defect = 0.0;   // max over spanning elements of ||[q_n, e]||
    bool unital_trivial = false; // fgp route: the unit is the identity
    int p = 0, n = 0;
};

// Quasicentrality of q_n = Σ_{|ζ|<p, indices<=n} e_{ζ,ζ} against the spanning
// family of the p-cutoff span. For twisted-free H the commutators vanish once
// n covers every appearing basis index; for fgp H the check is trivially 0.
QcReport quasicentral_check(const Correspondence& h, int p, int n);

struct SweepRow {
    int q;
    double lower_bound;
    bool converged;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double final_value = 0.0;
    bool converged = false;
};

// monotone lower bounds ||P_q T P_q|| for a family of operators constructible
// at each cutoff; converged when three consecutive values differ < tol
SweepResult compression_norm_sweep(const std::function<GradedOperator(int)>& family,
                                   const std::vector<int>& q_values, double tol = 1e-6);

} // namespace pimsner
