// Finitely generated projective Hilbert C*-modules over a ScalarAlgebra,
// carried as (free rank, projection) pairs, and adjointable operators between
// them as matrices over A compressed by the two projections. Norms go through
// the faithful representation: a rank-m module over A ⊆ M_N(C) embeds in
// C^{mN x N}, an operator in M_{mN}(C).

#pragma once

#include <optional>
#include <vector>

#include "pimsner/algebra.hpp"

namespace pimsner {

// dense matrix over A, row-major
struct AlgMatrix {
    int rows = 0, cols = 0;
    std::vector<AlgElement> data;

    AlgMatrix() = default;
    AlgMatrix(int r, int c, const AlgElement& fill);
    AlgElement& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    const AlgElement& at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    AlgMatrix adjoint() const;
    AlgMatrix operator+(const AlgMatrix& o) const;
    AlgMatrix operator-(const AlgMatrix& o) const;
    AlgMatrix operator*(Cplx s) const;
    Mat dense(const ScalarAlgebra& alg) const; // rows*N x cols*N
    double frobenius() const;
};

// y = a * b over AlgElements; runs through the kernels layer
AlgMatrix gemm(const AlgMatrix& a, const AlgMatrix& b);
AlgMatrix gemm_serial(const AlgMatrix& a, const AlgMatrix& b); // reference

class ModuleSpace;
using SpacePtr = std::shared_ptr<const ModuleSpace>;

class ModuleVector {
  public:
    ModuleVector() = default;
    ModuleVector(SpacePtr space, std::vector<AlgElement> coords);

    const SpacePtr& space() const { return space_; }
    const std::vector<AlgElement>& coords() const { return coords_; }
    const AlgElement& coord(int i) const { return coords_[i]; }

    ModuleVector operator+(const ModuleVector& o) const;
    ModuleVector operator-(const ModuleVector& o) const;
    ModuleVector operator*(Cplx s) const;
    ModuleVector right_mul(const AlgElement& a) const; // x . a
    double norm() const;                               // sqrt(op_norm(<x,x>))
    Mat dense() const;                                 // mN x N

  private:
    SpacePtr space_;
    std::vector<AlgElement> coords_;
};

class ModOperator {
  public:
    ModOperator() = default;
    ModOperator(SpacePtr domain, SpacePtr codomain, AlgMatrix m, bool compress = true);

    const SpacePtr& domain() const { return domain_; }
    const SpacePtr& codomain() const { return codomain_; }
    const AlgMatrix& matrix() const { return mat_; }

    ModuleVector apply(const ModuleVector& x) const;
    ModOperator compose(const ModOperator& rhs) const; // this ∘ rhs
    ModOperator adjoint() const;
    ModOperator operator+(const ModOperator& o) const;
    ModOperator operator-(const ModOperator& o) const;
    ModOperator operator*(Cplx s) const;

    Mat dense() const; // codomain rank*N x domain rank*N
    double norm() const;
    double frobenius() const;
    bool is_zero(double tol) const;

  private:
    SpacePtr domain_, codomain_;
    AlgMatrix mat_;
};

class ModuleSpace : public std::enable_shared_from_this<ModuleSpace> {
  public:
    // free module A^m
    static SpacePtr free(AlgebraPtr algebra, int rank);
    // projective: range of P inside A^m; P must be idempotent self-adjoint
    static SpacePtr projective(AlgebraPtr algebra, AlgMatrix projection);

    const AlgebraPtr& algebra() const { return algebra_; }
    int free_rank() const { return rank_; }
    bool is_free() const { return !projection_.has_value(); }
    const AlgMatrix& projection_matrix() const; // identity materialized if free
    ModOperator projection_operator() const;

    ModuleVector zero_vector() const;
    ModuleVector basis_vector(int i) const; // free modules only
    ModuleVector make_vector(std::vector<AlgElement> coords) const;
    ModuleVector compress(std::vector<AlgElement> coords) const; // P . coords
    ModuleVector random_vector(Rng& rng) const;

    ModOperator identity_operator() const;
    ModOperator zero_operator() const;
    // left multiplication by a on every coordinate (the free-module A-action
    // on A^m; correspondences override this with their own left action)
    ModOperator coordinatewise_mult(const AlgElement& a) const;

    bool same_as(const ModuleSpace& o) const;

  private:
    ModuleSpace(AlgebraPtr algebra, int rank, std::optional<AlgMatrix> projection);
    AlgebraPtr algebra_;
    int rank_;
    std::optional<AlgMatrix> projection_;
    mutable std::optional<AlgMatrix> identity_cache_;
};

AlgElement inner(const ModuleVector& x, const ModuleVector& y);
ModOperator rank_one(const ModuleVector& x, const ModuleVector& y); // e_{x,y}
double operator_norm(const ModOperator& t);

} // namespace pimsner
