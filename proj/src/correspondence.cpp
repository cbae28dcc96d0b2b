#include "pimsner/correspondence.hpp"

#include "pimsner/parallel.hpp"

namespace pimsner {

struct Correspondence::Impl {
    ActionKind kind;
    SpacePtr space;
    std::vector<Automorphism> autos;          // CrossedProduct / TwistedFree
    std::vector<ModOperator> basis_images;    // Explicit
    std::shared_ptr<const Impl> left, right;  // DirectSum / Tensor children
};

const SpacePtr& Correspondence::space() const { return impl_->space; }
ActionKind Correspondence::kind() const { return impl_->kind; }
const std::vector<Automorphism>& Correspondence::automorphisms() const { return impl_->autos; }

static AlgMatrix eval_action(const Correspondence::Impl& im, const AlgElement& a);

static AlgMatrix eval_inflate(const AlgMatrix& s, const Correspondence::Impl& k, int mk,
                              const AlgebraPtr& alg) {
    AlgMatrix out(s.rows * mk, s.cols * mk, alg->zero());
    kern::for_index(static_cast<std::int64_t>(s.rows) * s.cols, [&](std::int64_t idx) {
        int r = static_cast<int>(idx / s.cols), c = static_cast<int>(idx % s.cols);
        const AlgElement& entry = s.at(r, c);
        if (entry.is_zero(0.0)) return;
        AlgMatrix img = eval_action(k, entry);
        for (int j = 0; j < mk; ++j)
            for (int j2 = 0; j2 < mk; ++j2) out.at(r * mk + j, c * mk + j2) = img.at(j, j2);
    });
    return out;
}

static AlgMatrix eval_action(const Correspondence::Impl& im, const AlgElement& a) {
    const auto& alg = im.space->algebra();
    switch (im.kind) {
        case ActionKind::Identity: {
            AlgMatrix m(1, 1, a);
            return m;
        }
        case ActionKind::CrossedProduct: {
            return AlgMatrix(1, 1, im.autos.front().apply(a));
        }
        case ActionKind::TwistedFree: {
            int m = static_cast<int>(im.autos.size());
            AlgMatrix out(m, m, alg->zero());
            for (int i = 0; i < m; ++i) out.at(i, i) = im.autos[i].apply(a);
            return out;
        }
        case ActionKind::Explicit: {
            std::vector<Cplx> coef = alg->coefficients(a);
            int m = im.space->free_rank();
            AlgMatrix out(m, m, alg->zero());
            for (size_t t = 0; t < coef.size(); ++t) {
                if (coef[t] == Cplx(0.0)) continue;
                const AlgMatrix& img = im.basis_images[t].matrix();
                for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += img.data[i] * coef[t];
            }
            return out;
        }
        case ActionKind::DirectSum: {
            AlgMatrix lh = eval_action(*im.left, a);
            AlgMatrix rh = eval_action(*im.right, a);
            int m = lh.rows + rh.rows;
            AlgMatrix out(m, m, alg->zero());
            for (int r = 0; r < lh.rows; ++r)
                for (int c = 0; c < lh.cols; ++c) out.at(r, c) = lh.at(r, c);
            for (int r = 0; r < rh.rows; ++r)
                for (int c = 0; c < rh.cols; ++c) out.at(lh.rows + r, lh.cols + c) = rh.at(r, c);
            return out;
        }
        case ActionKind::Tensor: {
            AlgMatrix top = eval_action(*im.left, a);
            int mk = im.right->space->free_rank();
            return eval_inflate(top, *im.right, mk, alg);
        }
    }
    throw InternalError("unreachable action kind");
}

AlgMatrix Correspondence::left_action_matrix(const AlgElement& a) const {
    if (!a.parent()->same_as(*algebra())) throw StructuralError("left action: algebra mismatch");
    return eval_action(*impl_, a);
}

ModOperator Correspondence::left_action(const AlgElement& a) const {
    return ModOperator(space(), space(), left_action_matrix(a), false);
}

ModuleVector Correspondence::left_mul(const AlgElement& a, const ModuleVector& x) const {
    if (!x.space()->same_as(*space())) throw StructuralError("left_mul: vector not in this correspondence");
    AlgMatrix m = left_action_matrix(a);
    std::vector<AlgElement> out(m.rows, algebra()->zero());
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) out[r] += m.at(r, c) * x.coord(c);
    return space()->make_vector(std::move(out));
}

double Correspondence::action_defect() const {
    const auto& alg = *algebra();
    std::vector<AlgElement> basis = alg.basis();
    double worst = 0.0;
    ModOperator unit_im = left_action(alg.identity());
    worst = std::max(worst, (unit_im - space()->identity_operator()).frobenius());
    std::vector<ModOperator> images;
    images.reserve(basis.size());
    for (const auto& b : basis) images.push_back(left_action(b));
    for (size_t s = 0; s < basis.size(); ++s) {
        worst = std::max(worst, (left_action(basis[s].adjoint()) - images[s].adjoint()).frobenius());
        for (size_t t = 0; t < basis.size(); ++t) {
            ModOperator lhs = left_action(basis[s] * basis[t]);
            ModOperator rhs = images[s].compose(images[t]);
            worst = std::max(worst, (lhs - rhs).frobenius());
        }
    }
    if (!space()->is_free()) {
        ModOperator p = space()->projection_operator();
        for (const auto& im : images) worst = std::max(worst, (im.compose(p) - p.compose(im)).frobenius());
    }
    return worst;
}

Correspondence Correspondence::identity_corr(AlgebraPtr algebra) {
    auto im = std::make_shared<Impl>();
    im->kind = ActionKind::Identity;
    im->space = ModuleSpace::free(std::move(algebra), 1);
    return Correspondence(im);
}

Correspondence Correspondence::crossed_product(const Automorphism& alpha) {
    auto im = std::make_shared<Impl>();
    im->kind = ActionKind::CrossedProduct;
    im->space = ModuleSpace::free(alpha.parent(), 1);
    im->autos = {alpha};
    return Correspondence(im);
}

Correspondence Correspondence::twisted_free(std::vector<Automorphism> alphas) {
    if (alphas.empty()) throw ArgumentError("twisted_free needs a nonempty automorphism list");
    AlgebraPtr alg = alphas.front().parent();
    for (const auto& a : alphas)
        if (!a.parent()->same_as(*alg)) throw StructuralError("twisted_free automorphisms over different algebras");
    auto im = std::make_shared<Impl>();
    im->kind = ActionKind::TwistedFree;
    im->space = ModuleSpace::free(alg, static_cast<int>(alphas.size()));
    im->autos = std::move(alphas);
    return Correspondence(im);
}

Correspondence Correspondence::explicit_action(SpacePtr space, std::vector<ModOperator> basis_images) {
    if (static_cast<int>(basis_images.size()) != space->algebra()->total_dim())
        throw StructuralError("explicit action needs one image per basis element of A");
    auto im = std::make_shared<Impl>();
    im->kind = ActionKind::Explicit;
    im->space = std::move(space);
    im->basis_images = std::move(basis_images);
    Correspondence c(im);
    double defect = c.action_defect();
    if (defect > 1e-8)
        throw StructuralError("left action violates *-homomorphism laws: defect " + std::to_string(defect));
    return c;
}

Correspondence crossed_product_corr(const Automorphism& alpha) { return Correspondence::crossed_product(alpha); }

Correspondence twisted_free_corr(const std::vector<Automorphism>& alphas) {
    return Correspondence::twisted_free(alphas);
}

Correspondence direct_sum_corr(const Correspondence& h, const Correspondence& k) {
    if (!h.algebra()->same_as(*k.algebra())) throw StructuralError("direct sum over different algebras");
    const auto& alg = h.algebra();
    int mh = h.rank(), mk = k.rank(), m = mh + mk;
    SpacePtr sp;
    if (h.space()->is_free() && k.space()->is_free()) {
        sp = ModuleSpace::free(alg, m);
    } else {
        AlgMatrix p(m, m, alg->zero());
        const AlgMatrix& ph = h.space()->projection_matrix();
        const AlgMatrix& pk = k.space()->projection_matrix();
        for (int r = 0; r < mh; ++r)
            for (int c = 0; c < mh; ++c) p.at(r, c) = ph.at(r, c);
        for (int r = 0; r < mk; ++r)
            for (int c = 0; c < mk; ++c) p.at(mh + r, mh + c) = pk.at(r, c);
        sp = ModuleSpace::projective(alg, std::move(p));
    }
    auto im = std::make_shared<Correspondence::Impl>();
    im->kind = ActionKind::DirectSum;
    im->space = std::move(sp);
    im->left = h.impl();
    im->right = k.impl();
    return Correspondence(im);
}

AlgMatrix inflate_matrix(const AlgMatrix& s, const Correspondence& k) {
    return eval_inflate(s, *k.impl(), k.rank(), k.algebra());
}

Correspondence tensor_space(const Correspondence& h, const Correspondence& k) {
    if (!h.algebra()->same_as(*k.algebra())) throw StructuralError("tensor over different algebras");
    const auto& alg = h.algebra();
    int mh = h.rank(), mk = k.rank(), m = mh * mk;
    bool need_projection = !h.space()->is_free() || !k.space()->is_free();
    SpacePtr sp;
    if (!need_projection) {
        sp = ModuleSpace::free(alg, m);
    } else {
        // Q = (P_H ⊗ 1)(1 ⊗ P_K); the factors commute since P_K commutes with
        // the left action of K
        AlgMatrix q = inflate_matrix(h.space()->projection_matrix(), k);
        if (!k.space()->is_free()) {
            AlgMatrix pk1(m, m, alg->zero());
            const AlgMatrix& pk = k.space()->projection_matrix();
            for (int i = 0; i < mh; ++i)
                for (int j = 0; j < mk; ++j)
                    for (int j2 = 0; j2 < mk; ++j2) pk1.at(i * mk + j, i * mk + j2) = pk.at(j, j2);
            q = gemm(q, pk1);
        }
        // spec calls for verifying idempotency numerically after construction
        double idem = (gemm(q, q) - q).frobenius();
        if (idem > 1e-9) throw InternalError("tensor projection failed idempotency: " + std::to_string(idem));
        sp = ModuleSpace::projective(alg, std::move(q));
    }
    auto im = std::make_shared<Correspondence::Impl>();
    im->kind = ActionKind::Tensor;
    im->space = std::move(sp);
    im->left = h.impl();
    im->right = k.impl();
    return Correspondence(im);
}

std::vector<AlgElement> tensor_coords(const Correspondence& h, const ModuleVector& x,
                                      const Correspondence& k, const ModuleVector& y) {
    if (!x.space()->same_as(*h.space()) || !y.space()->same_as(*k.space()))
        throw StructuralError("tensor: vectors not in the given correspondences");
    int mh = h.rank(), mk = k.rank();
    std::vector<AlgElement> coords(static_cast<size_t>(mh) * mk, h.algebra()->zero());
    for (int i = 0; i < mh; ++i) {
        if (x.coord(i).is_zero(0.0)) continue;
        ModuleVector row = k.left_mul(x.coord(i), y);
        for (int j = 0; j < mk; ++j) coords[static_cast<size_t>(i) * mk + j] = row.coord(j);
    }
    return coords;
}

ModuleVector tensor(const Correspondence& h, const ModuleVector& x, const Correspondence& k,
                    const ModuleVector& y) {
    Correspondence hk = tensor_space(h, k);
    return hk.space()->make_vector(tensor_coords(h, x, k, y));
}

TensorPowerCache::TensorPowerCache(Correspondence base) {
    powers_.push_back(Correspondence::identity_corr(base.algebra()));
    powers_.push_back(std::move(base));
}

const Correspondence& TensorPowerCache::power(int kk) const {
    if (kk < 0) throw ArgumentError("tensor power must be >= 0");
    while (static_cast<int>(powers_.size()) <= kk)
        powers_.push_back(tensor_space(powers_[1], powers_.back()));
    return powers_[kk];
}

} // namespace pimsner
