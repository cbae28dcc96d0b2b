#include "pimsner/fock.hpp"

#include <algorithm>

#include "pimsner/parallel.hpp"
#include "pimsner/rokhlin.hpp"

namespace pimsner {

ElemTensor::ElemTensor(AlgElement scalar) : scalar_(std::move(scalar)) {}

ElemTensor::ElemTensor(std::vector<ModuleVector> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw ArgumentError("elementary tensor needs at least one factor");
    for (const auto& f : factors_)
        if (!f.space()->same_as(*factors_.front().space()))
            throw StructuralError("elementary tensor factors live in different spaces");
}

ElemTensor ElemTensor::left_mul(const Correspondence& h, const AlgElement& a) const {
    if (is_scalar()) return ElemTensor(a * scalar_);
    std::vector<ModuleVector> f = factors_;
    f.front() = h.left_mul(a, f.front());
    return ElemTensor(std::move(f));
}

ElemTensor ElemTensor::right_mul(const AlgElement& b) const {
    if (is_scalar()) return ElemTensor(scalar_ * b);
    std::vector<ModuleVector> f = factors_;
    f.back() = f.back().right_mul(b);
    return ElemTensor(std::move(f));
}

FockTruncation::FockTruncation(std::shared_ptr<TensorPowerCache> cache, int cutoff)
    : cache_(std::move(cache)), cutoff_(cutoff) {
    if (cutoff_ < 1) throw ArgumentError("Fock cutoff must be >= 1");
    int n = cache_->base().algebra()->rep_dim();
    ranks_.resize(cutoff_);
    dims_.resize(cutoff_);
    offsets_.resize(cutoff_);
    for (int k = 0; k < cutoff_; ++k) {
        ranks_[k] = cache_->power(k).rank();
        dims_[k] = ranks_[k] * n;
        offsets_[k] = total_dim_;
        total_dim_ += dims_[k];
    }
}

std::shared_ptr<const FockTruncation> FockTruncation::make(const Correspondence& base, int cutoff) {
    return std::make_shared<const FockTruncation>(std::make_shared<TensorPowerCache>(base), cutoff);
}

std::shared_ptr<const FockTruncation> FockTruncation::with_cutoff(int cutoff) const {
    return std::make_shared<const FockTruncation>(cache_, cutoff);
}

int FockTruncation::degree_rank(int k) const { return ranks_.at(k); }
int FockTruncation::degree_dim(int k) const { return dims_.at(k); }
int FockTruncation::degree_offset(int k) const { return offsets_.at(k); }
int FockTruncation::total_dim() const { return total_dim_; }

ModuleVector FockTruncation::realize(const ElemTensor& t) const {
    if (t.is_scalar()) return cache_->power(0).space()->make_vector({t.scalar()});
    const Correspondence& h = cache_->base();
    int len = t.length();
    ModuleVector acc = t.factors().back();
    for (int i = len - 2; i >= 0; --i) {
        const Correspondence& prev = cache_->power(len - 1 - i);
        std::vector<AlgElement> coords = tensor_coords(h, t.factors()[i], prev, acc);
        acc = cache_->power(len - i).space()->make_vector(std::move(coords));
    }
    return acc;
}

GradedOperator::GradedOperator(FockPtr fock) : fock_(std::move(fock)) {
    col_exact_.assign(fock_->cutoff(), 1);
    row_exact_.assign(fock_->cutoff(), 1);
}

GradedOperator GradedOperator::identity(FockPtr fock) {
    GradedOperator g(fock);
    for (int k = 0; k < fock->cutoff(); ++k)
        g.add_block(k, k, fock->power(k).space()->identity_operator());
    return g;
}

GradedOperator GradedOperator::degree_zero(FockPtr fock, const AlgElement& a) {
    GradedOperator g(fock);
    for (int k = 0; k < fock->cutoff(); ++k) g.add_block(k, k, fock->power(k).left_action(a));
    return g;
}

void GradedOperator::add_block(int src, int tgt, ModOperator op) {
    if (src < 0 || tgt < 0 || src >= fock_->cutoff() || tgt >= fock_->cutoff())
        throw ArgumentError("graded block outside the cutoff window");
    auto key = std::make_pair(src, tgt);
    auto it = blocks_.find(key);
    if (it == blocks_.end())
        blocks_.emplace(key, std::move(op));
    else
        it->second = it->second + op;
}

static void check_same_fock(const GradedOperator& a, const GradedOperator& b) {
    if (a.fock() != b.fock()) throw StructuralError("graded operators over different truncations");
}

GradedOperator GradedOperator::operator+(const GradedOperator& o) const {
    check_same_fock(*this, o);
    GradedOperator out(fock_);
    out.blocks_ = blocks_;
    for (const auto& [key, op] : o.blocks_) {
        auto it = out.blocks_.find(key);
        if (it == out.blocks_.end())
            out.blocks_.emplace(key, op);
        else
            it->second = it->second + op;
    }
    for (int k = 0; k < fock_->cutoff(); ++k) {
        out.col_exact_[k] = col_exact_[k] && o.col_exact_[k];
        out.row_exact_[k] = row_exact_[k] && o.row_exact_[k];
    }
    return out;
}

GradedOperator GradedOperator::operator-(const GradedOperator& o) const { return *this + o * Cplx(-1.0); }

GradedOperator GradedOperator::operator*(Cplx s) const {
    GradedOperator out = *this;
    for (auto& [key, op] : out.blocks_) op = op * s;
    return out;
}

GradedOperator GradedOperator::compose(const GradedOperator& rhs) const {
    check_same_fock(*this, rhs);
    GradedOperator out(fock_);
    for (const auto& [tkey, top] : rhs.blocks_) {
        int k = tkey.first, t = tkey.second;
        for (const auto& [skey, sop] : blocks_) {
            if (skey.first != t) continue;
            out.add_block(k, skey.second, sop.compose(top));
        }
    }
    // col_exact(S∘T, k): T's column k fully in window and S exact on every
    // degree that column reaches
    for (int k = 0; k < fock_->cutoff(); ++k) {
        bool ok = rhs.col_exact_[k];
        if (ok)
            for (const auto& [tkey, top] : rhs.blocks_) {
                if (tkey.first != k) continue;
                if (!col_exact_[tkey.second]) ok = false;
            }
        out.col_exact_[k] = ok;
    }
    for (int u = 0; u < fock_->cutoff(); ++u) {
        bool ok = row_exact_[u];
        if (ok)
            for (const auto& [skey, sop] : blocks_) {
                if (skey.second != u) continue;
                if (!rhs.row_exact_[skey.first]) ok = false;
            }
        out.row_exact_[u] = ok;
    }
    return out;
}

GradedOperator GradedOperator::adjoint() const {
    GradedOperator out(fock_);
    for (const auto& [key, op] : blocks_) out.add_block(key.second, key.first, op.adjoint());
    out.col_exact_ = row_exact_;
    out.row_exact_ = col_exact_;
    return out;
}

Mat GradedOperator::dense_window() const {
    int d = fock_->total_dim();
    Mat z = Mat::Zero(d, d);
    for (const auto& [key, op] : blocks_) {
        int src = key.first, tgt = key.second;
        z.block(fock_->degree_offset(tgt), fock_->degree_offset(src), fock_->degree_dim(tgt),
                fock_->degree_dim(src)) = op.dense();
    }
    return z;
}

double GradedOperator::certified_norm() const {
    int q = fock_->cutoff();
    std::vector<int> col_off(q, -1);
    int width = 0;
    for (int k = 0; k < q; ++k)
        if (col_exact_[k]) {
            col_off[k] = width;
            width += fock_->degree_dim(k);
        }
    if (width == 0) return 0.0;
    Mat z = Mat::Zero(fock_->total_dim(), width);
    for (const auto& [key, op] : blocks_) {
        int src = key.first, tgt = key.second;
        if (col_off[src] < 0) continue;
        z.block(fock_->degree_offset(tgt), col_off[src], fock_->degree_dim(tgt), fock_->degree_dim(src)) =
            op.dense();
    }
    return spectral_norm(z);
}

double GradedOperator::window_frobenius() const {
    double s = 0;
    for (const auto& [key, op] : blocks_) {
        double f = op.frobenius();
        s += f * f;
    }
    return std::sqrt(s);
}

bool GradedOperator::fully_exact() const {
    for (char c : col_exact_)
        if (!c) return false;
    for (char c : row_exact_)
        if (!c) return false;
    return true;
}

GradedOperator creation(const ElemTensor& x, FockPtr fock) {
    int j = x.length();
    if (j < 1) throw ArgumentError("creation needs an elementary tensor of length >= 1");
    int q = fock->cutoff();
    if (q <= j) throw ArgumentError("degenerate creation operator: cutoff <= tensor length");
    ModuleVector xr = fock->realize(x);
    const auto& alg = fock->algebra();
    GradedOperator g(fock);
    for (int k = 0; k + j < q; ++k) {
        const Correspondence& pk = fock->power(k);
        int rk = fock->degree_rank(k);
        int rx = fock->degree_rank(j);
        AlgMatrix m(rx * rk, rk, alg->zero());
        for (int i = 0; i < rx; ++i) {
            if (xr.coord(i).is_zero(0.0)) continue;
            AlgMatrix img = pk.left_action_matrix(xr.coord(i));
            for (int r = 0; r < rk; ++r)
                for (int c = 0; c < rk; ++c) m.at(i * rk + r, c) = img.at(r, c);
        }
        g.add_block(k, k + j, ModOperator(pk.space(), fock->power(k + j).space(), std::move(m), false));
    }
    for (int k = std::max(0, q - j); k < q; ++k) g.mark_col_overflow(k);
    return g;
}

GradedOperator span_element(const ElemTensor& x, const ElemTensor& y, int k, FockPtr fock) {
    int lx = x.length(), ly = y.length();
    int q = fock->cutoff();
    if (k < 0 || ly + k >= q || lx + k >= q) throw ArgumentError("span element outside the cutoff window");
    ModuleVector xr = fock->realize(x), yr = fock->realize(y);
    ModOperator exy = rank_one(xr, yr);
    AlgMatrix inflated = inflate_matrix(exy.matrix(), fock->power(k));
    GradedOperator g(fock);
    g.add_block(ly + k, lx + k,
                ModOperator(fock->power(ly + k).space(), fock->power(lx + k).space(), std::move(inflated),
                            false));
    return g;
}

GradedOperator band_product(const ElemTensor& x, const ElemTensor& y, FockPtr fock) {
    int lx = x.length(), ly = y.length();
    int q = fock->cutoff();
    if (lx >= q || ly >= q) throw ArgumentError("band product legs exceed the cutoff");
    if (lx == 0 && ly == 0)
        return GradedOperator::degree_zero(fock, x.scalar() * y.scalar().adjoint());
    ModuleVector xr = fock->realize(x), yr = fock->realize(y);
    ModOperator exy = rank_one(xr, yr);
    GradedOperator g(fock);
    for (int k = 0; ly + k < q; ++k) {
        if (lx + k >= q) {
            g.mark_col_overflow(ly + k);
            continue;
        }
        AlgMatrix inflated = inflate_matrix(exy.matrix(), fock->power(k));
        g.add_block(ly + k, lx + k,
                    ModOperator(fock->power(ly + k).space(), fock->power(lx + k).space(), std::move(inflated),
                                false));
    }
    // rows t >= lx receive from source t - lx + ly; inexact once that is >= q
    for (int t = lx; t < q; ++t)
        if (t - lx + ly >= q) g.mark_row_overflow(t);
    return g;
}

PhiImage phi_compression(const ElemTensor& x, const ElemTensor& y, int p, FockPtr fock) {
    if (p % 2 == 0) throw ArgumentError("tent compression requires odd p");
    if (p > fock->cutoff()) throw ArgumentError("tent compression requires p <= cutoff");
    int lx = x.length(), ly = y.length();
    if (lx >= p || ly >= p) throw ArgumentError("compression legs must be shorter than p");
    PhiImage out{p, x, y, {}, GradedOperator(fock)};
    for (int k = 0; k + std::max(lx, ly) < p; ++k) {
        double c = std::sqrt(bump(p, k + lx) * bump(p, k + ly));
        out.terms.push_back({k, c});
        if (c == 0.0) continue;
        out.op = out.op + span_element(x, y, k, fock) * Cplx(c);
    }
    return out;
}

namespace {

// index tuples (i_1..i_len) in [0, m)^len, lexicographic
std::vector<std::vector<int>> tuples(int m, int len) {
    std::vector<std::vector<int>> out;
    if (len == 0) {
        out.push_back({});
        return out;
    }
    std::vector<std::vector<int>> prev = tuples(m, len - 1);
    for (const auto& t : prev)
        for (int i = 0; i < m; ++i) {
            auto u = t;
            u.push_back(i);
            out.push_back(std::move(u));
        }
    return out;
}

ElemTensor basis_tensor(const Correspondence& h, const std::vector<int>& idx, const AlgebraPtr& alg) {
    if (idx.empty()) return ElemTensor(alg->identity());
    std::vector<ModuleVector> f;
    f.reserve(idx.size());
    for (int i : idx) {
        if (h.space()->is_free())
            f.push_back(h.space()->basis_vector(i));
        else {
            std::vector<AlgElement> c(h.rank(), alg->zero());
            c[i] = alg->identity();
            f.push_back(h.space()->compress(std::move(c)));
        }
    }
    return ElemTensor(std::move(f));
}

} // namespace

DpFamily dp_spanning_family(const Correspondence& h, int p, int max_len) {
    if (max_len < 0) max_len = p - 1;
    FockPtr fock = FockTruncation::make(h, p);
    DpFamily fam{p, fock, {}};
    const auto& alg = h.algebra();
    std::vector<AlgElement> basis = alg->basis();
    int m = h.rank();
    for (int lx = 0; lx <= max_len; ++lx) {
        auto xs = tuples(m, lx);
        for (int ly = 0; ly <= max_len; ++ly) {
            auto ys = tuples(m, ly);
            for (int k = 0; k + std::max(lx, ly) < p; ++k)
                for (const auto& xi : xs)
                    for (const auto& yi : ys)
                        for (const auto& b : basis) {
                            ElemTensor x = basis_tensor(h, xi, alg).right_mul(b);
                            ElemTensor y = basis_tensor(h, yi, alg);
                            GradedOperator op = span_element(x, y, k, fock);
                            if (op.window_frobenius() < 1e-14) continue; // projective compression can kill it
                            fam.elems.push_back({std::move(x), std::move(y), k, std::move(op)});
                        }
        }
    }
    return fam;
}

QcReport quasicentral_check(const Correspondence& h, int p, int n) {
    QcReport rep;
    rep.p = p;
    rep.n = n;
    if (h.kind() != ActionKind::TwistedFree) {
        // finitely generated projective route: the compacts of F_p are unital,
        // the approximate unit is the identity, every commutator vanishes
        rep.unital_trivial = true;
        rep.defect = 0.0;
        return rep;
    }
    if (n < 0) throw ArgumentError("quasicentral check: n must be >= 0");
    int m = h.rank();
    FockPtr fock = FockTruncation::make(h, p);
    const auto& alg = h.algebra();
    // q_n = Σ_{ζ, all indices <= n, |ζ| < p} e_{ζ,ζ}: per degree the 0/1
    // diagonal over coordinates whose base-m digits are < n
    GradedOperator qn(fock);
    for (int k = 0; k < p; ++k) {
        int rk = fock->degree_rank(k);
        AlgMatrix diag(rk, rk, alg->zero());
        for (int idx = 0; idx < rk; ++idx) {
            int v = idx;
            bool keep = true;
            for (int d = 0; d < k; ++d) {
                if (v % m >= n) keep = false;
                v /= m;
            }
            if (keep) diag.at(idx, idx) = alg->identity();
        }
        qn.add_block(k, k, ModOperator(fock->power(k).space(), fock->power(k).space(), std::move(diag), false));
    }
    DpFamily fam = dp_spanning_family(h, p);
    std::vector<double> defects(fam.elems.size(), 0.0);
    kern::for_index(static_cast<std::int64_t>(fam.elems.size()), [&](std::int64_t i) {
        const auto& e = fam.elems[i].op;
        GradedOperator comm = qn.compose(e) - e.compose(qn);
        defects[i] = spectral_norm(comm.dense_window());
    });
    for (double d : defects) rep.defect = std::max(rep.defect, d);
    return rep;
}

SweepResult compression_norm_sweep(const std::function<GradedOperator(int)>& family,
                                   const std::vector<int>& q_values, double tol) {
    SweepResult res;
    double prev = -1.0;
    int stable = 0;
    for (int q : q_values) {
        GradedOperator op = family(q);
        double v = op.certified_norm();
        if (prev >= 0 && v < prev - 1e-8)
            throw InternalError("compression sweep lost monotonicity: " + std::to_string(prev) + " -> " +
                                std::to_string(v));
        if (prev >= 0 && v < prev) v = prev; // clamp 1e-10-scale jitter
        if (prev >= 0 && std::abs(v - prev) < tol)
            ++stable;
        else
            stable = 0;
        bool conv = stable >= 2; // three consecutive values within tol
        res.rows.push_back({q, v, conv});
        res.final_value = v;
        res.converged = res.converged || conv;
        prev = v;
    }
    return res;
}

} // namespace pimsner
