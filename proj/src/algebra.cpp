#include "pimsner/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <numeric>

#include "pimsner/parallel.hpp"

namespace pimsner {

double spectral_norm(const Mat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    // sigma_max = sqrt(lambda_max(M^* M)); stabler than Jacobi SVD for our sizes
    Mat g = m.adjoint() * m;
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    double top = es.eigenvalues().maxCoeff();
    return top > 0 ? std::sqrt(top) : 0.0;
}

double min_eig_selfadjoint(const Mat& m) {
    if (m.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

AlgElement::AlgElement(AlgebraPtr parent, std::vector<Mat> blocks)
    : parent_(std::move(parent)), blocks_(std::move(blocks)) {
    if (!parent_) throw StructuralError("element without parent algebra");
    if (static_cast<int>(blocks_.size()) != parent_->num_blocks())
        throw StructuralError("element block count mismatch");
    for (int i = 0; i < parent_->num_blocks(); ++i) {
        int n = parent_->blocks()[i];
        if (blocks_[i].rows() != n || blocks_[i].cols() != n)
            throw StructuralError("element block shape mismatch");
    }
}

static void check_same_parent(const AlgElement& a, const AlgElement& b) {
    if (!a.parent() || !b.parent() || !a.parent()->same_as(*b.parent()))
        throw StructuralError("algebra mismatch between elements");
}

AlgElement AlgElement::operator+(const AlgElement& o) const {
    check_same_parent(*this, o);
    std::vector<Mat> out(blocks_.size());
    for (size_t i = 0; i < blocks_.size(); ++i) out[i] = blocks_[i] + o.blocks_[i];
    return AlgElement(parent_, std::move(out));
}

AlgElement AlgElement::operator-(const AlgElement& o) const {
    check_same_parent(*this, o);
    std::vector<Mat> out(blocks_.size());
    for (size_t i = 0; i < blocks_.size(); ++i) out[i] = blocks_[i] - o.blocks_[i];
    return AlgElement(parent_, std::move(out));
}

AlgElement AlgElement::operator*(const AlgElement& o) const {
    check_same_parent(*this, o);
    std::vector<Mat> out(blocks_.size());
    for (size_t i = 0; i < blocks_.size(); ++i) out[i] = blocks_[i] * o.blocks_[i];
    return AlgElement(parent_, std::move(out));
}

AlgElement AlgElement::operator*(Cplx s) const {
    std::vector<Mat> out(blocks_.size());
    for (size_t i = 0; i < blocks_.size(); ++i) out[i] = blocks_[i] * s;
    return AlgElement(parent_, std::move(out));
}

AlgElement& AlgElement::operator+=(const AlgElement& o) {
    check_same_parent(*this, o);
    for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
    return *this;
}

AlgElement AlgElement::adjoint() const {
    std::vector<Mat> out(blocks_.size());
    for (size_t i = 0; i < blocks_.size(); ++i) out[i] = blocks_[i].adjoint();
    return AlgElement(parent_, std::move(out));
}

bool AlgElement::is_zero(double tol) const {
    for (const auto& b : blocks_)
        if (b.cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

bool AlgElement::is_selfadjoint(double tol) const {
    for (const auto& b : blocks_)
        if ((b - b.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    return true;
}

Mat AlgElement::dense() const {
    int n = parent_->rep_dim();
    Mat m = Mat::Zero(n, n);
    for (int i = 0; i < parent_->num_blocks(); ++i) {
        int off = parent_->block_offset(i);
        int sz = parent_->blocks()[i];
        m.block(off, off, sz, sz) = blocks_[i];
    }
    return m;
}

double AlgElement::norm() const {
    double m = 0;
    for (const auto& b : blocks_) m = std::max(m, spectral_norm(b));
    return m;
}

double AlgElement::frobenius() const {
    double s = 0;
    for (const auto& b : blocks_) s += b.squaredNorm();
    return std::sqrt(s);
}

double AlgElement::min_eigenvalue() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks_) m = std::min(m, min_eig_selfadjoint(b));
    return m;
}

ScalarAlgebra::ScalarAlgebra(std::vector<int> block_sizes) : blocks_(std::move(block_sizes)) {
    if (blocks_.empty()) throw StructuralError("algebra needs at least one block");
    offsets_.resize(blocks_.size());
    for (size_t i = 0; i < blocks_.size(); ++i) {
        if (blocks_[i] < 1) throw StructuralError("block sizes must be >= 1");
        offsets_[i] = rep_dim_;
        rep_dim_ += blocks_[i];
        total_dim_ += blocks_[i] * blocks_[i];
    }
}

AlgebraPtr ScalarAlgebra::make(std::vector<int> block_sizes) {
    return AlgebraPtr(new ScalarAlgebra(std::move(block_sizes)));
}

AlgElement ScalarAlgebra::zero() const {
    std::vector<Mat> b;
    b.reserve(blocks_.size());
    for (int n : blocks_) b.push_back(Mat::Zero(n, n));
    return AlgElement(shared_from_this(), std::move(b));
}

AlgElement ScalarAlgebra::identity() const { return scalar(1.0); }

AlgElement ScalarAlgebra::scalar(Cplx c) const {
    std::vector<Mat> b;
    b.reserve(blocks_.size());
    for (int n : blocks_) b.push_back(Mat::Identity(n, n) * c);
    return AlgElement(shared_from_this(), std::move(b));
}

AlgElement ScalarAlgebra::indicator(const std::vector<int>& points) const {
    AlgElement e = zero();
    for (int p : points) {
        if (p < 0 || p >= num_blocks() || blocks_[p] != 1)
            throw ArgumentError("indicator points must address 1x1 blocks");
        e.block(p)(0, 0) = 1.0;
    }
    return e;
}

AlgElement ScalarAlgebra::matrix_unit(int b, int r, int s) const {
    if (b < 0 || b >= num_blocks() || r < 0 || s < 0 || r >= blocks_[b] || s >= blocks_[b])
        throw ArgumentError("matrix unit out of range");
    AlgElement e = zero();
    e.block(b)(r, s) = 1.0;
    return e;
}

std::vector<AlgElement> ScalarAlgebra::basis() const {
    std::vector<AlgElement> out;
    out.reserve(total_dim_);
    for (int b = 0; b < num_blocks(); ++b)
        for (int r = 0; r < blocks_[b]; ++r)
            for (int s = 0; s < blocks_[b]; ++s) out.push_back(matrix_unit(b, r, s));
    return out;
}

std::vector<Cplx> ScalarAlgebra::coefficients(const AlgElement& a) const {
    std::vector<Cplx> out;
    out.reserve(total_dim_);
    for (int b = 0; b < num_blocks(); ++b)
        for (int r = 0; r < blocks_[b]; ++r)
            for (int s = 0; s < blocks_[b]; ++s) out.push_back(a.block(b)(r, s));
    return out;
}

AlgElement ScalarAlgebra::random_element(Rng& rng) const {
    std::vector<Mat> b;
    b.reserve(blocks_.size());
    for (int n : blocks_) {
        Mat m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) = rng.cgauss() / std::sqrt(2.0 * n);
        b.push_back(std::move(m));
    }
    return AlgElement(shared_from_this(), std::move(b));
}

AlgElement ScalarAlgebra::random_selfadjoint(Rng& rng) const {
    AlgElement a = random_element(rng);
    return (a + a.adjoint()) * Cplx(0.5);
}

AlgElement ScalarAlgebra::random_positive_contraction(Rng& rng) const {
    AlgElement a = random_element(rng);
    AlgElement p = a.adjoint() * a;
    double n = p.norm();
    if (n < 1e-14) return zero();
    return p * Cplx(rng.uniform(0.2, 1.0) / n);
}

Mat ScalarAlgebra::random_block_unitary(int n, Rng& rng) const {
    Mat g(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) g(r, c) = rng.cgauss();
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    // fix phases so the factorization is unique and the stream deterministic
    for (int i = 0; i < n; ++i) {
        Cplx d = r(i, i);
        double ad = std::abs(d);
        q.col(i) *= (ad < 1e-300) ? Cplx(1.0) : d / ad;
    }
    return q;
}

double op_norm(const AlgElement& a) { return a.norm(); }

bool is_positive(const AlgElement& a, double tol) {
    if (!a.is_selfadjoint(tol)) return false;
    return a.min_eigenvalue() >= -tol;
}

AlgElement sqrt_positive(const AlgElement& a) {
    if (!a.is_selfadjoint(kPosTol)) throw PositivityError("sqrt_positive: element is not self-adjoint");
    std::vector<Mat> out(a.blocks().size());
    for (size_t i = 0; i < a.blocks().size(); ++i) {
        Eigen::SelfAdjointEigenSolver<Mat> es(a.blocks()[i]);
        Eigen::VectorXd ev = es.eigenvalues();
        for (int j = 0; j < ev.size(); ++j) {
            if (ev(j) < -kPosTol) throw PositivityError("sqrt_positive: eigenvalue below -1e-10");
            if (ev(j) < 0) ev(j) = 0;
        }
        out[i] = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    }
    return AlgElement(a.parent(), std::move(out));
}

Automorphism::Automorphism(AlgebraPtr parent, std::vector<int> perm, std::vector<Mat> unitaries)
    : parent_(std::move(parent)), perm_(std::move(perm)), unitaries_(std::move(unitaries)) {
    int nb = parent_->num_blocks();
    if (static_cast<int>(perm_.size()) != nb || static_cast<int>(unitaries_.size()) != nb)
        throw StructuralError("automorphism data size mismatch");
    std::vector<char> seen(nb, 0);
    for (int j = 0; j < nb; ++j) {
        int s = perm_[j];
        if (s < 0 || s >= nb || seen[s]) throw StructuralError("automorphism permutation invalid");
        seen[s] = 1;
        if (parent_->blocks()[s] != parent_->blocks()[j])
            throw StructuralError("automorphism permutes blocks of different size");
        int n = parent_->blocks()[j];
        if (unitaries_[j].rows() != n || unitaries_[j].cols() != n)
            throw StructuralError("automorphism unitary shape mismatch");
        if ((unitaries_[j].adjoint() * unitaries_[j] - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
            throw StructuralError("automorphism block matrix is not unitary");
    }
}

Automorphism Automorphism::identity(AlgebraPtr parent) {
    int nb = parent->num_blocks();
    std::vector<int> perm(nb);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Mat> us;
    us.reserve(nb);
    for (int n : parent->blocks()) us.push_back(Mat::Identity(n, n));
    return Automorphism(std::move(parent), std::move(perm), std::move(us));
}

Automorphism Automorphism::cyclic_shift(AlgebraPtr parent) {
    int nb = parent->num_blocks();
    for (int n : parent->blocks())
        if (n != 1) throw ArgumentError("cyclic_shift expects C(Z/n), all blocks 1x1");
    // alpha(chi_X) = chi_{X+1}  <=>  alpha(a)_j = a_{j-1 mod n}
    std::vector<int> perm(nb);
    for (int j = 0; j < nb; ++j) perm[j] = (j - 1 + nb) % nb;
    std::vector<Mat> us(nb, Mat::Identity(1, 1));
    return Automorphism(std::move(parent), std::move(perm), std::move(us));
}

Automorphism Automorphism::random(AlgebraPtr parent, Rng& rng) {
    int nb = parent->num_blocks();
    // random permutation among equal-size blocks (Fisher-Yates within size classes)
    std::vector<int> perm(nb);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = nb - 1; i > 0; --i) {
        int j = static_cast<int>(rng.index(i + 1));
        if (parent->blocks()[perm[i]] == parent->blocks()[perm[j]]) std::swap(perm[i], perm[j]);
    }
    std::vector<Mat> us;
    us.reserve(nb);
    for (int j = 0; j < nb; ++j) us.push_back(parent->random_block_unitary(parent->blocks()[j], rng));
    return Automorphism(std::move(parent), std::move(perm), std::move(us));
}

AlgElement Automorphism::apply(const AlgElement& a) const {
    if (!a.parent()->same_as(*parent_)) throw StructuralError("automorphism parent mismatch");
    std::vector<Mat> out(perm_.size());
    for (size_t j = 0; j < perm_.size(); ++j)
        out[j] = unitaries_[j] * a.block(perm_[j]) * unitaries_[j].adjoint();
    return AlgElement(parent_, std::move(out));
}

AlgElement Automorphism::apply_inverse(const AlgElement& b) const {
    if (!b.parent()->same_as(*parent_)) throw StructuralError("automorphism parent mismatch");
    std::vector<Mat> out(perm_.size());
    for (size_t j = 0; j < perm_.size(); ++j)
        out[perm_[j]] = unitaries_[j].adjoint() * b.block(j) * unitaries_[j];
    return AlgElement(parent_, std::move(out));
}

Automorphism Automorphism::inverse() const {
    int nb = static_cast<int>(perm_.size());
    std::vector<int> inv(nb);
    std::vector<Mat> us(nb);
    for (int j = 0; j < nb; ++j) {
        inv[perm_[j]] = j;
        us[perm_[j]] = unitaries_[j].adjoint();
    }
    return Automorphism(parent_, std::move(inv), std::move(us));
}

Automorphism Automorphism::compose(const Automorphism& inner) const {
    // (this ∘ inner)(a)_j = U_j inner(a)_{perm[j]} U_j^*
    //                     = U_j V_{perm[j]} a_{q[perm[j]]} V_{perm[j]}^* U_j^*
    int nb = static_cast<int>(perm_.size());
    std::vector<int> perm(nb);
    std::vector<Mat> us(nb);
    for (int j = 0; j < nb; ++j) {
        perm[j] = inner.perm_[perm_[j]];
        us[j] = unitaries_[j] * inner.unitaries_[perm_[j]];
    }
    return Automorphism(parent_, std::move(perm), std::move(us));
}

Automorphism Automorphism::power(int k) const {
    Automorphism base = (k >= 0) ? *this : inverse();
    int reps = std::abs(k);
    Automorphism acc = Automorphism::identity(parent_);
    for (int i = 0; i < reps; ++i) acc = acc.compose(base);
    return acc;
}

AlgElement apply_automorphism(const Automorphism& alpha, const AlgElement& a) { return alpha.apply(a); }

} // namespace pimsner
