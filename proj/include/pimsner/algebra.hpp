// Finite-dimensional C*-algebras A = ⊕_i M_{n_i}(C), their elements, norms,
// positivity and functional calculus, and automorphisms given as a block
// permutation plus per-block unitary conjugation. The faithful representation
// is the block-diagonal embedding into M_N(C), N = Σ n_i; all norms are exact
// to float precision through it.

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pimsner/rng.hpp"

namespace pimsner {

using Cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

// Error taxonomy; the CLI maps these to exit codes.
struct Error : std::runtime_error {
    explicit Error(const std::string& m) : std::runtime_error(m) {}
};
struct StructuralError : Error {
    explicit StructuralError(const std::string& m) : Error(m) {}
};
struct PositivityError : Error {
    explicit PositivityError(const std::string& m) : Error(m) {}
};
struct ArgumentError : Error {
    explicit ArgumentError(const std::string& m) : Error(m) {}
};
struct InfeasibleError : Error {
    explicit InfeasibleError(const std::string& m) : Error(m) {}
};
struct WitnessError : Error {
    explicit WitnessError(const std::string& m) : Error(m) {}
};
struct InputError : Error {
    explicit InputError(const std::string& m) : Error(m) {}
};
struct InternalError : Error {
    explicit InternalError(const std::string& m) : Error(m) {}
};

constexpr double kPosTol = 1e-10; // eigenvalue clipping threshold

class ScalarAlgebra;
using AlgebraPtr = std::shared_ptr<const ScalarAlgebra>;

class AlgElement {
  public:
    AlgElement() = default;
    AlgElement(AlgebraPtr parent, std::vector<Mat> blocks);

    const AlgebraPtr& parent() const { return parent_; }
    const std::vector<Mat>& blocks() const { return blocks_; }
    Mat& block(int i) { return blocks_[i]; }
    const Mat& block(int i) const { return blocks_[i]; }

    AlgElement operator+(const AlgElement& o) const;
    AlgElement operator-(const AlgElement& o) const;
    AlgElement operator*(const AlgElement& o) const;
    AlgElement operator*(Cplx s) const;
    AlgElement& operator+=(const AlgElement& o);
    AlgElement adjoint() const;

    bool is_zero(double tol = 0.0) const;
    bool is_selfadjoint(double tol = kPosTol) const;

    // block-diagonal image in M_N(C)
    Mat dense() const;

    double norm() const;      // largest singular value over blocks
    double frobenius() const; // upper bound for norm(), cheap exact-zero checks
    double min_eigenvalue() const; // over blocks; requires self-adjoint

  private:
    AlgebraPtr parent_;
    std::vector<Mat> blocks_;
};

class ScalarAlgebra : public std::enable_shared_from_this<ScalarAlgebra> {
  public:
    static AlgebraPtr make(std::vector<int> block_sizes);

    const std::vector<int>& blocks() const { return blocks_; }
    int num_blocks() const { return static_cast<int>(blocks_.size()); }
    int rep_dim() const { return rep_dim_; }     // N = Σ n_i
    int total_dim() const { return total_dim_; } // Σ n_i²
    int block_offset(int i) const { return offsets_[i]; }

    AlgElement zero() const;
    AlgElement identity() const;
    AlgElement scalar(Cplx c) const;
    // indicator of a set of 1x1 blocks (commutative C(X) usage)
    AlgElement indicator(const std::vector<int>& points) const;
    // matrix-unit basis element: block b, entry (r, s)
    AlgElement matrix_unit(int b, int r, int s) const;
    // all matrix units, in a fixed order (the linear basis of A)
    std::vector<AlgElement> basis() const;
    // coefficients of a in the matrix-unit basis (same order as basis())
    std::vector<Cplx> coefficients(const AlgElement& a) const;

    AlgElement random_element(Rng& rng) const;
    AlgElement random_selfadjoint(Rng& rng) const;
    AlgElement random_positive_contraction(Rng& rng) const;
    Mat random_block_unitary(int n, Rng& rng) const;

    bool same_as(const ScalarAlgebra& o) const { return blocks_ == o.blocks_; }

  private:
    explicit ScalarAlgebra(std::vector<int> block_sizes);
    std::vector<int> blocks_;
    std::vector<int> offsets_;
    int rep_dim_ = 0;
    int total_dim_ = 0;
};

// op norm of a itself (exact through the faithful representation)
double op_norm(const AlgElement& a);

bool is_positive(const AlgElement& a, double tol = kPosTol);

// positive square root through per-block eigendecomposition; eigenvalues in
// [-kPosTol, 0) are clipped to 0, below that is a positivity error
AlgElement sqrt_positive(const AlgElement& a);

class Automorphism {
  public:
    // alpha(a)_j = U_j * a_{perm[j]} * U_j^*, with n_{perm[j]} == n_j
    Automorphism(AlgebraPtr parent, std::vector<int> perm, std::vector<Mat> unitaries);

    static Automorphism identity(AlgebraPtr parent);
    // cyclic shift on C(Z/n): shift(chi_{k}) = chi_{k+1}
    static Automorphism cyclic_shift(AlgebraPtr parent);
    static Automorphism random(AlgebraPtr parent, Rng& rng);

    const AlgebraPtr& parent() const { return parent_; }
    AlgElement apply(const AlgElement& a) const;
    AlgElement apply_inverse(const AlgElement& a) const;
    Automorphism inverse() const;
    Automorphism compose(const Automorphism& inner) const; // this ∘ inner
    Automorphism power(int k) const;                       // k may be negative

    const std::vector<int>& perm() const { return perm_; }
    const std::vector<Mat>& unitaries() const { return unitaries_; }

  private:
    AlgebraPtr parent_;
    std::vector<int> perm_;
    std::vector<Mat> unitaries_;
};

AlgElement apply_automorphism(const Automorphism& alpha, const AlgElement& a);

// dense-matrix helpers shared across the library
double spectral_norm(const Mat& m);
double min_eig_selfadjoint(const Mat& m);

} // namespace pimsner
