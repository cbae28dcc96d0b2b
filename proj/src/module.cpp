#include "pimsner/module.hpp"

#include "pimsner/parallel.hpp"

namespace pimsner {

AlgMatrix::AlgMatrix(int r, int c, const AlgElement& fill) : rows(r), cols(c) {
    data.assign(static_cast<size_t>(r) * c, fill);
}

AlgMatrix AlgMatrix::adjoint() const {
    AlgMatrix out;
    out.rows = cols;
    out.cols = rows;
    out.data.resize(data.size());
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) out.at(c, r) = at(r, c).adjoint();
    return out;
}

AlgMatrix AlgMatrix::operator+(const AlgMatrix& o) const {
    if (rows != o.rows || cols != o.cols) throw StructuralError("AlgMatrix shape mismatch in +");
    AlgMatrix out = *this;
    for (size_t i = 0; i < data.size(); ++i) out.data[i] += o.data[i];
    return out;
}

AlgMatrix AlgMatrix::operator-(const AlgMatrix& o) const {
    if (rows != o.rows || cols != o.cols) throw StructuralError("AlgMatrix shape mismatch in -");
    AlgMatrix out = *this;
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = out.data[i] - o.data[i];
    return out;
}

AlgMatrix AlgMatrix::operator*(Cplx s) const {
    AlgMatrix out = *this;
    for (auto& e : out.data) e = e * s;
    return out;
}

Mat AlgMatrix::dense(const ScalarAlgebra& alg) const {
    int n = alg.rep_dim();
    Mat m = Mat::Zero(static_cast<Eigen::Index>(rows) * n, static_cast<Eigen::Index>(cols) * n);
    kern::for_index(static_cast<std::int64_t>(rows) * cols, [&](std::int64_t idx) {
        int r = static_cast<int>(idx / cols), c = static_cast<int>(idx % cols);
        m.block(static_cast<Eigen::Index>(r) * n, static_cast<Eigen::Index>(c) * n, n, n) = data[idx].dense();
    });
    return m;
}

double AlgMatrix::frobenius() const {
    double s = 0;
    for (const auto& e : data) {
        double f = e.frobenius();
        s += f * f;
    }
    return std::sqrt(s);
}

AlgMatrix gemm_serial(const AlgMatrix& a, const AlgMatrix& b) {
    if (a.cols != b.rows) throw StructuralError("AlgMatrix shape mismatch in gemm");
    const auto& alg = *a.data.front().parent();
    AlgMatrix out(a.rows, b.cols, alg.zero());
    kern::for_index_serial(static_cast<std::int64_t>(a.rows) * b.cols, [&](std::int64_t idx) {
        int r = static_cast<int>(idx / b.cols), c = static_cast<int>(idx % b.cols);
        AlgElement acc = alg.zero();
        for (int k = 0; k < a.cols; ++k) acc += a.at(r, k) * b.at(k, c);
        out.data[idx] = acc;
    });
    return out;
}

AlgMatrix gemm(const AlgMatrix& a, const AlgMatrix& b) {
    if (a.cols != b.rows) throw StructuralError("AlgMatrix shape mismatch in gemm");
    const auto& alg = *a.data.front().parent();
    AlgMatrix out(a.rows, b.cols, alg.zero());
    // each output entry is accumulated serially by one task: results are
    // identical to gemm_serial for any thread count
    kern::for_index(static_cast<std::int64_t>(a.rows) * b.cols, [&](std::int64_t idx) {
        int r = static_cast<int>(idx / b.cols), c = static_cast<int>(idx % b.cols);
        AlgElement acc = alg.zero();
        for (int k = 0; k < a.cols; ++k) acc += a.at(r, k) * b.at(k, c);
        out.data[idx] = acc;
    });
    return out;
}

ModuleSpace::ModuleSpace(AlgebraPtr algebra, int rank, std::optional<AlgMatrix> projection)
    : algebra_(std::move(algebra)), rank_(rank), projection_(std::move(projection)) {
    if (rank_ < 1) throw StructuralError("module rank must be >= 1");
    if (projection_) {
        const AlgMatrix& p = *projection_;
        if (p.rows != rank_ || p.cols != rank_) throw StructuralError("projection shape mismatch");
        AlgMatrix diff_sa = p - p.adjoint();
        AlgMatrix diff_idem = gemm(p, p) - p;
        if (diff_sa.frobenius() > 1e-10 || diff_idem.frobenius() > 1e-10)
            throw StructuralError("projection is not an idempotent self-adjoint within 1e-10");
    }
}

SpacePtr ModuleSpace::free(AlgebraPtr algebra, int rank) {
    return SpacePtr(new ModuleSpace(std::move(algebra), rank, std::nullopt));
}

SpacePtr ModuleSpace::projective(AlgebraPtr algebra, AlgMatrix projection) {
    return SpacePtr(new ModuleSpace(std::move(algebra), projection.rows, std::move(projection)));
}

const AlgMatrix& ModuleSpace::projection_matrix() const {
    if (projection_) return *projection_;
    if (!identity_cache_) {
        AlgMatrix id(rank_, rank_, algebra_->zero());
        for (int i = 0; i < rank_; ++i) id.at(i, i) = algebra_->identity();
        identity_cache_ = std::move(id);
    }
    return *identity_cache_;
}

ModOperator ModuleSpace::projection_operator() const {
    return ModOperator(shared_from_this(), shared_from_this(), projection_matrix(), false);
}

ModuleVector ModuleSpace::zero_vector() const {
    return ModuleVector(shared_from_this(), std::vector<AlgElement>(rank_, algebra_->zero()));
}

ModuleVector ModuleSpace::basis_vector(int i) const {
    if (!is_free()) throw StructuralError("basis_vector requires a free module");
    if (i < 0 || i >= rank_) throw ArgumentError("basis index out of range");
    std::vector<AlgElement> c(rank_, algebra_->zero());
    c[i] = algebra_->identity();
    return ModuleVector(shared_from_this(), std::move(c));
}

ModuleVector ModuleSpace::make_vector(std::vector<AlgElement> coords) const {
    return ModuleVector(shared_from_this(), std::move(coords));
}

ModuleVector ModuleSpace::compress(std::vector<AlgElement> coords) const {
    if (static_cast<int>(coords.size()) != rank_) throw StructuralError("coordinate count mismatch");
    if (is_free()) return ModuleVector(shared_from_this(), std::move(coords));
    const AlgMatrix& p = *projection_;
    std::vector<AlgElement> out(rank_, algebra_->zero());
    for (int r = 0; r < rank_; ++r)
        for (int c = 0; c < rank_; ++c) out[r] += p.at(r, c) * coords[c];
    return ModuleVector(shared_from_this(), std::move(out));
}

ModuleVector ModuleSpace::random_vector(Rng& rng) const {
    std::vector<AlgElement> c;
    c.reserve(rank_);
    for (int i = 0; i < rank_; ++i) c.push_back(algebra_->random_element(rng));
    return compress(std::move(c));
}

ModOperator ModuleSpace::identity_operator() const {
    return ModOperator(shared_from_this(), shared_from_this(), projection_matrix(), false);
}

ModOperator ModuleSpace::zero_operator() const {
    return ModOperator(shared_from_this(), shared_from_this(), AlgMatrix(rank_, rank_, algebra_->zero()), false);
}

ModOperator ModuleSpace::coordinatewise_mult(const AlgElement& a) const {
    AlgMatrix m(rank_, rank_, algebra_->zero());
    for (int i = 0; i < rank_; ++i) m.at(i, i) = a;
    return ModOperator(shared_from_this(), shared_from_this(), std::move(m), !is_free());
}

bool ModuleSpace::same_as(const ModuleSpace& o) const {
    if (!algebra_->same_as(*o.algebra_) || rank_ != o.rank_ || is_free() != o.is_free()) return false;
    if (!is_free() && (projection_matrix() - o.projection_matrix()).frobenius() > 1e-9) return false;
    return true;
}

ModuleVector::ModuleVector(SpacePtr space, std::vector<AlgElement> coords)
    : space_(std::move(space)), coords_(std::move(coords)) {
    if (static_cast<int>(coords_.size()) != space_->free_rank())
        throw StructuralError("vector coordinate count mismatch");
}

static void check_same_space(const ModuleVector& x, const ModuleVector& y) {
    if (!x.space() || !y.space() || !x.space()->same_as(*y.space()))
        throw StructuralError("module space mismatch");
}

ModuleVector ModuleVector::operator+(const ModuleVector& o) const {
    check_same_space(*this, o);
    std::vector<AlgElement> c(coords_.size(), space_->algebra()->zero());
    for (size_t i = 0; i < coords_.size(); ++i) c[i] = coords_[i] + o.coords_[i];
    return ModuleVector(space_, std::move(c));
}

ModuleVector ModuleVector::operator-(const ModuleVector& o) const {
    check_same_space(*this, o);
    std::vector<AlgElement> c(coords_.size(), space_->algebra()->zero());
    for (size_t i = 0; i < coords_.size(); ++i) c[i] = coords_[i] - o.coords_[i];
    return ModuleVector(space_, std::move(c));
}

ModuleVector ModuleVector::operator*(Cplx s) const {
    std::vector<AlgElement> c(coords_);
    for (auto& e : c) e = e * s;
    return ModuleVector(space_, std::move(c));
}

ModuleVector ModuleVector::right_mul(const AlgElement& a) const {
    std::vector<AlgElement> c(coords_);
    for (auto& e : c) e = e * a;
    return ModuleVector(space_, std::move(c));
}

double ModuleVector::norm() const { return std::sqrt(std::max(0.0, op_norm(inner(*this, *this)))); }

Mat ModuleVector::dense() const {
    int n = space_->algebra()->rep_dim();
    Mat m(static_cast<Eigen::Index>(coords_.size()) * n, n);
    for (size_t i = 0; i < coords_.size(); ++i) m.block(static_cast<Eigen::Index>(i) * n, 0, n, n) = coords_[i].dense();
    return m;
}

AlgElement inner(const ModuleVector& x, const ModuleVector& y) {
    check_same_space(x, y);
    AlgElement acc = x.space()->algebra()->zero();
    for (size_t i = 0; i < x.coords().size(); ++i) acc += x.coords()[i].adjoint() * y.coords()[i];
    return acc;
}

ModOperator::ModOperator(SpacePtr domain, SpacePtr codomain, AlgMatrix m, bool compress)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), mat_(std::move(m)) {
    if (mat_.rows != codomain_->free_rank() || mat_.cols != domain_->free_rank())
        throw StructuralError("operator matrix shape mismatch");
    if (compress && (!domain_->is_free() || !codomain_->is_free())) {
        if (!codomain_->is_free()) mat_ = gemm(codomain_->projection_matrix(), mat_);
        if (!domain_->is_free()) mat_ = gemm(mat_, domain_->projection_matrix());
    }
}

ModuleVector ModOperator::apply(const ModuleVector& x) const {
    if (!x.space()->same_as(*domain_)) throw StructuralError("operator domain mismatch");
    std::vector<AlgElement> out(mat_.rows, codomain_->algebra()->zero());
    for (int r = 0; r < mat_.rows; ++r)
        for (int c = 0; c < mat_.cols; ++c) out[r] += mat_.at(r, c) * x.coord(c);
    return ModuleVector(codomain_, std::move(out));
}

ModOperator ModOperator::compose(const ModOperator& rhs) const {
    if (!rhs.codomain_->same_as(*domain_)) throw StructuralError("operator composition mismatch");
    return ModOperator(rhs.domain_, codomain_, gemm(mat_, rhs.mat_), false);
}

ModOperator ModOperator::adjoint() const { return ModOperator(codomain_, domain_, mat_.adjoint(), false); }

ModOperator ModOperator::operator+(const ModOperator& o) const {
    if (!domain_->same_as(*o.domain_) || !codomain_->same_as(*o.codomain_))
        throw StructuralError("operator sum mismatch");
    return ModOperator(domain_, codomain_, mat_ + o.mat_, false);
}

ModOperator ModOperator::operator-(const ModOperator& o) const {
    if (!domain_->same_as(*o.domain_) || !codomain_->same_as(*o.codomain_))
        throw StructuralError("operator difference mismatch");
    return ModOperator(domain_, codomain_, mat_ - o.mat_, false);
}

ModOperator ModOperator::operator*(Cplx s) const { return ModOperator(domain_, codomain_, mat_ * s, false); }

Mat ModOperator::dense() const { return mat_.dense(*domain_->algebra()); }

double ModOperator::norm() const { return spectral_norm(dense()); }

double ModOperator::frobenius() const { return mat_.frobenius(); }

bool ModOperator::is_zero(double tol) const { return mat_.frobenius() <= tol; }

ModOperator rank_one(const ModuleVector& x, const ModuleVector& y) {
    if (!x.space()->algebra()->same_as(*y.space()->algebra()))
        throw StructuralError("rank_one: algebra mismatch");
    AlgMatrix m(x.space()->free_rank(), y.space()->free_rank(), x.space()->algebra()->zero());
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) m.at(r, c) = x.coord(r) * y.coord(c).adjoint();
    return ModOperator(y.space(), x.space(), std::move(m), false);
}

double operator_norm(const ModOperator& t) { return t.norm(); }

} // namespace pimsner
