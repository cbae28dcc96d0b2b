#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include "pimsner/fock.hpp"
#include "pimsner/rokhlin.hpp"

using namespace pimsner;

static AlgebraPtr c6() { return ScalarAlgebra::make(std::vector<int>(6, 1)); }

static Correspondence c6_shift() { return crossed_product_corr(Automorphism::cyclic_shift(c6())); }

static ElemTensor rand_tensor(const Correspondence& h, int len, Rng& rng) {
    std::vector<ModuleVector> f;
    for (int i = 0; i < len; ++i) f.push_back(h.space()->random_vector(rng));
    return ElemTensor(std::move(f));
}

// ||A - B|| over columns where both are exact (Frobenius, upper bounds op norm)
static double diff_frob(const GradedOperator& a, const GradedOperator& b) {
    return (a - b).window_frobenius();
}

TEST_CASE("creation acts on the vacuum and satisfies the adjoint relation") {
    Correspondence h = c6_shift();
    FockPtr fock = FockTruncation::make(h, 5);
    Rng rng(3);
    ElemTensor x = rand_tensor(h, 1, rng);
    GradedOperator tx = creation(x, fock);
    // T_x applied to the vacuum 1_A gives x
    ModuleVector vac = fock->power(0).space()->make_vector({c6()->identity()});
    ModuleVector got = tx.blocks().at({0, 1}).apply(vac);
    CHECK((got - fock->realize(x)).norm() <= 1e-12);

    // T_x^* T_y = <x,y> as a degree-0 operator on non-overflow degrees
    ElemTensor y = rand_tensor(h, 1, rng);
    GradedOperator prod = creation(x, fock).adjoint().compose(creation(y, fock));
    AlgElement ip = inner(fock->realize(x), fock->realize(y));
    GradedOperator expect = GradedOperator::degree_zero(fock, ip);
    for (const auto& [key, blk] : prod.blocks()) {
        if (!prod.col_exact(key.first)) continue;
        CHECK((blk - expect.blocks().at(key)).frobenius() <= 1e-10);
    }
    // orthogonal tensors annihilate
    ModuleVector e0 = h.space()->basis_vector(0);
    ElemTensor xa(std::vector<ModuleVector>{e0.right_mul(c6()->indicator({0}))});
    ElemTensor yb(std::vector<ModuleVector>{e0.right_mul(c6()->indicator({1}))});
    GradedOperator z = creation(xa, fock).adjoint().compose(creation(yb, fock));
    CHECK(z.window_frobenius() <= 1e-12);
}

TEST_CASE("Toeplitz relations: linearity and bimodularity over seeded instances") {
    Correspondence h = c6_shift();
    FockPtr fock = FockTruncation::make(h, 5);
    Rng rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        ModuleVector xv = h.space()->random_vector(rng), yv = h.space()->random_vector(rng);
        Cplx al(rng.gauss(), rng.gauss());
        ElemTensor x(std::vector<ModuleVector>{xv}), y(std::vector<ModuleVector>{yv});
        ElemTensor axy(std::vector<ModuleVector>{xv * al + yv});
        GradedOperator lhs = creation(axy, fock);
        GradedOperator rhs = creation(x, fock) * al + creation(y, fock);
        CHECK(diff_frob(lhs, rhs) <= 1e-10);

        AlgElement a = c6()->random_element(rng), b = c6()->random_element(rng);
        ElemTensor axb = x.left_mul(h, a).right_mul(b);
        GradedOperator lhs2 = creation(axb, fock);
        GradedOperator rhs2 = GradedOperator::degree_zero(fock, a)
                                  .compose(creation(x, fock))
                                  .compose(GradedOperator::degree_zero(fock, b));
        CHECK(diff_frob(lhs2, rhs2) <= 1e-10);
    }
}

TEST_CASE("band products match composed creations blockwise") {
    Correspondence h = c6_shift();
    FockPtr fock = FockTruncation::make(h, 6);
    Rng rng(23);
    ElemTensor x = rand_tensor(h, 2, rng), y = rand_tensor(h, 1, rng);
    GradedOperator band = band_product(x, y, fock);
    GradedOperator comp = creation(x, fock).compose(creation(y, fock).adjoint());
    for (const auto& [key, blk] : band.blocks()) {
        if (!comp.col_exact(key.first) || !band.col_exact(key.first)) continue;
        CHECK((blk - comp.blocks().at(key)).frobenius() <= 1e-10);
    }
    // block at source degree |y| equals the rank-one operator exactly
    ModOperator e = rank_one(fock->realize(x), fock->realize(y));
    CHECK((band.blocks().at({1, 2}) - e).frobenius() <= 1e-13);
    // vacuum-vacuum band is the identity
    ElemTensor vac(c6()->identity());
    CHECK(diff_frob(band_product(vac, vac, fock), GradedOperator::identity(fock)) <= 1e-13);

    // evaluation oracle: (T_x T_y*)(y ⊗ z) = x ⊗ (<y,y>.z) on seeded tensors
    for (int i = 0; i < 20; ++i) {
        ModuleVector z = h.space()->random_vector(rng);
        ElemTensor yz(std::vector<ModuleVector>{y.factors()[0], z});
        ModuleVector in = fock->realize(yz);
        ModuleVector got = band.blocks().at({2, 3}).apply(in);
        AlgElement yy = inner(fock->realize(y), fock->realize(y));
        ElemTensor xz(std::vector<ModuleVector>{x.factors()[0], x.factors()[1],
                                                h.left_mul(yy, z)});
        CHECK((got - fock->realize(xz)).norm() <= 1e-9);
    }
}

TEST_CASE("degree orthogonality is structural") {
    Correspondence h = c6_shift();
    FockPtr fock = FockTruncation::make(h, 4);
    // distinct degrees occupy disjoint dense offsets: no tolerance involved
    int off1 = fock->degree_offset(1), dim1 = fock->degree_dim(1);
    int off2 = fock->degree_offset(2);
    CHECK(off1 + dim1 == off2);
}

TEST_CASE("span products re-expand in the spanning family") {
    auto alg = ScalarAlgebra::make({1, 1});
    Automorphism swap(alg, {1, 0}, {Mat::Identity(1, 1), Mat::Identity(1, 1)});
    Correspondence h = twisted_free_corr({Automorphism::identity(alg), swap});
    int p = 3;
    DpFamily fam = dp_spanning_family(h, p);
    // dense images of the family span a subspace; products of members must
    // stay inside it (least squares residual ~ 0)
    int d = fam.fock->total_dim();
    Eigen::MatrixXcd basis(d * d, static_cast<Eigen::Index>(fam.elems.size()));
    for (size_t i = 0; i < fam.elems.size(); ++i) {
        Mat m = fam.elems[i].op.dense_window();
        basis.col(static_cast<Eigen::Index>(i)) = Eigen::Map<Eigen::VectorXcd>(m.data(), d * d);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(basis);
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const auto& a = fam.elems[rng.index(fam.elems.size())].op;
        const auto& b = fam.elems[rng.index(fam.elems.size())].op;
        Mat prod = a.compose(b).dense_window();
        Eigen::VectorXcd v = Eigen::Map<Eigen::VectorXcd>(prod.data(), d * d);
        Eigen::VectorXcd sol = qr.solve(v);
        CHECK((basis * sol - v).norm() <= 1e-9);
    }
}

TEST_CASE("tent compression coefficients") {
    Correspondence h = c6_shift();
    FockPtr fock = FockTruncation::make(h, 9);
    ElemTensor vac(c6()->identity());
    PhiImage ph = phi_compression(vac, vac, 5, fock);
    REQUIRE(ph.terms.size() == 5);
    double expect[5] = {0.0, 0.5, 1.0, 0.5, 0.0};
    for (int k = 0; k < 5; ++k) CHECK(ph.terms[k].coeff == doctest::Approx(expect[k]).epsilon(1e-12));

    // |x| = |y|: coefficients are exactly d_p(k+|x|)
    Rng rng(5);
    ElemTensor x = rand_tensor(h, 1, rng), y = rand_tensor(h, 1, rng);
    PhiImage ph2 = phi_compression(x, y, 5, fock);
    for (const auto& t : ph2.terms) CHECK(t.coeff == doctest::Approx(bump(5, t.k + 1)).epsilon(1e-12));

    // |x| = 1, |y| = 0, p = 9: sqrt mismatch stays below sqrt(2/(p-1))
    PhiImage ph3 = phi_compression(x, vac, 9, fock);
    for (const auto& t : ph3.terms) {
        double c = std::sqrt(bump(9, t.k + 1) * bump(9, t.k));
        CHECK(t.coeff == doctest::Approx(c).epsilon(1e-12));
        CHECK(std::abs(c - bump(9, t.k + 1)) <= std::sqrt(2.0 / 8.0) + 1e-12);
    }
    CHECK_THROWS_AS(phi_compression(x, y, 4, fock), ArgumentError);
}

TEST_CASE("quasicentral approximate unit") {
    auto alg = ScalarAlgebra::make({1, 1});
    Automorphism swap(alg, {1, 0}, {Mat::Identity(1, 1), Mat::Identity(1, 1)});
    Correspondence h = twisted_free_corr({Automorphism::identity(alg), swap});
    QcReport full = quasicentral_check(h, 3, 2);
    CHECK_FALSE(full.unital_trivial);
    CHECK(full.defect <= 1e-10);
    QcReport partial = quasicentral_check(h, 3, 1);
    CHECK(partial.defect > 1e-6);

    // fgp route is trivially exact
    Correspondence ident = Correspondence::identity_corr(alg);
    QcReport triv = quasicentral_check(ident, 3, 0);
    CHECK(triv.unital_trivial);
    CHECK(triv.defect == 0.0);
}

TEST_CASE("compression norm sweeps") {
    Correspondence h = c6_shift();
    auto cache = std::make_shared<TensorPowerCache>(h);
    // identity: all values 1
    SweepResult ident = compression_norm_sweep(
        [&](int q) { return GradedOperator::identity(std::make_shared<const FockTruncation>(cache, q)); },
        {2, 3, 4, 5, 6});
    for (const auto& r : ident.rows) CHECK(r.lower_bound == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ident.converged);

    // unit creation operator: isometry, all values 1 for q >= 2
    ModuleVector gen = h.space()->basis_vector(0);
    SweepResult iso = compression_norm_sweep(
        [&](int q) {
            FockPtr f = std::make_shared<const FockTruncation>(cache, q);
            return creation(ElemTensor(std::vector<ModuleVector>{gen}), f);
        },
        {2, 3, 4, 5, 6});
    for (const auto& r : iso.rows) CHECK(r.lower_bound == doctest::Approx(1.0).epsilon(1e-9));

    // a . T_x T_y* with a = chi_{0,3}: nondecreasing, converged
    auto a6 = c6();
    AlgElement a = a6->indicator({0, 3});
    Rng rng(11);
    ModuleVector xv = h.space()->random_vector(rng), yv = h.space()->random_vector(rng);
    SweepResult band = compression_norm_sweep(
        [&](int q) {
            FockPtr f = std::make_shared<const FockTruncation>(cache, q);
            GradedOperator t = band_product(ElemTensor(std::vector<ModuleVector>{xv}),
                                            ElemTensor(std::vector<ModuleVector>{yv}), f);
            return GradedOperator::degree_zero(f, a).compose(t);
        },
        {3, 4, 5, 6, 7, 8, 9});
    for (size_t i = 1; i < band.rows.size(); ++i)
        CHECK(band.rows[i].lower_bound + 1e-10 >= band.rows[i - 1].lower_bound);
    CHECK(band.converged);
}
