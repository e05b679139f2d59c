#include "tqnn/intertwiner.hpp"
#include "tqnn/su2.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace tqnn {

namespace {

long long product_dim(const IrrepTable& table, const std::vector<SlotSpec>& slots) {
    long long d = 1;
    for (const auto& s : slots) {
        d *= table.dim(s.irrep);
        if (d > (1LL << 26)) throw BudgetError("invariant subspace tensor too large");
    }
    return d;
}

// Applies a per-slot matrix M to one tensor slot of a (D x cols) matrix
// whose rows are the row-major multi-index over slot dims.
Matrix apply_to_slot(const Matrix& t, const std::vector<int>& dims, int slot,
                     const Eigen::MatrixXd& m) {
    long long inner = 1;
    for (size_t k = slot + 1; k < dims.size(); ++k) inner *= dims[k];
    long long outer = 1;
    for (int k = 0; k < slot; ++k) outer *= dims[k];
    const int d = dims[slot];
    Matrix out = Matrix::Zero(t.rows(), t.cols());
    for (long long o = 0; o < outer; ++o)
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) {
                const double w = m(a, b);
                if (w == 0.0) continue;
                const long long ra = (o * d + a) * inner;
                const long long rb = (o * d + b) * inner;
                for (long long i = 0; i < inner; ++i)
                    out.row(ra + i) += w * t.row(rb + i);
            }
    return out;
}

Matrix su2_invariant_basis(const IrrepTable& table, const std::vector<SlotSpec>& slots) {
    std::vector<int> dims;
    for (const auto& s : slots) dims.push_back(table.dim(s.irrep));
    const long long total = product_dim(table, slots);

    if (slots.empty()) return Matrix::Constant(1, 1, 1.0);

    // Couple left to right; states = (two_k, W) with W of shape (D_so_far x d_k),
    // kept in path-lexicographic order (intermediate spins ascending).
    struct Branch {
        int two_k;
        Matrix w;
    };
    std::vector<Branch> branches;
    branches.push_back({slots[0].irrep.id, Matrix::Identity(dims[0], dims[0])});
    for (size_t i = 1; i < slots.size(); ++i) {
        const int two_j = slots[i].irrep.id;
        const int d = dims[i];
        std::vector<Branch> next;
        for (const auto& br : branches) {
            for (int two_K : su2::coupling_range(br.two_k, two_j)) {
                // On the last slot only the singlet survives.
                if (i + 1 == slots.size() && two_K != 0) continue;
                const Eigen::MatrixXd cg = su2::clebsch_gordan(br.two_k, two_j, two_K);
                const long long rows = br.w.rows() * d;
                Matrix w = Matrix::Zero(rows, two_K + 1);
                // w = (br.w (x) I_d) * cg
                const int dk = br.two_k + 1;
                for (long long r = 0; r < br.w.rows(); ++r)
                    for (int c = 0; c < dk; ++c) {
                        const cplx v = br.w(r, c);
                        if (v == cplx(0.0)) continue;
                        for (int a = 0; a < d; ++a)
                            w.row(r * d + a) += v * cg.row(c * d + a);
                    }
                next.push_back({two_K, std::move(w)});
            }
        }
        branches = std::move(next);
    }
    std::erase_if(branches, [](const Branch& b) { return b.two_k != 0; });

    Matrix basis(total, static_cast<long long>(branches.size()));
    for (size_t c = 0; c < branches.size(); ++c) basis.col(c) = branches[c].w.col(0);

    for (size_t i = 0; i < slots.size(); ++i)
        if (slots[i].conj)
            basis = apply_to_slot(basis, dims, static_cast<int>(i),
                                  su2::conjugation_intertwiner(slots[i].irrep.id));
    return basis;
}

Matrix finite_invariant_basis(const IrrepTable& table, const std::vector<SlotSpec>& slots) {
    std::vector<int> dims;
    for (const auto& s : slots) dims.push_back(table.dim(s.irrep));
    const long long total = product_dim(table, slots);
    if (total > 4096) throw BudgetError("finite invariant projector too large");
    const auto& g = table.finite();

    Matrix proj = Matrix::Zero(total, total);
    std::vector<long long> stride(slots.size(), 1);
    for (int i = static_cast<int>(slots.size()) - 2; i >= 0; --i)
        stride[i] = stride[i + 1] * dims[i + 1];
    for (int u = 0; u < g.order; ++u) {
        std::vector<Matrix> mats;
        for (const auto& s : slots) {
            Matrix m = g.irrep_matrices[s.irrep.id][u];
            if (s.conj) m = m.conjugate();
            mats.push_back(std::move(m));
        }
        // accumulate the tensor product
        std::vector<long long> ridx(slots.size(), 0), cidx(slots.size(), 0);
        for (long long r = 0; r < total; ++r) {
            long long rr = r;
            for (size_t k = 0; k < slots.size(); ++k) { ridx[k] = rr / stride[k]; rr %= stride[k]; }
            for (long long c = 0; c < total; ++c) {
                long long cc = c;
                cplx v = 1.0;
                for (size_t k = 0; k < slots.size() && v != cplx(0.0); ++k) {
                    cidx[k] = cc / stride[k];
                    cc %= stride[k];
                    v *= mats[k](ridx[k], cidx[k]);
                }
                proj(r, c) += v / double(g.order);
            }
        }
    }

    const int rank = static_cast<int>(std::llround(proj.trace().real()));
    Matrix basis(total, rank);
    int found = 0;
    // modified Gram-Schmidt over projector columns, in column order
    for (long long c = 0; c < total && found < rank; ++c) {
        Eigen::VectorXcd v = proj.col(c);
        for (int k = 0; k < found; ++k) v -= basis.col(k).dot(v) * basis.col(k);
        const double n = v.norm();
        if (n > 1e-8) basis.col(found++) = v / n;
    }
    if (found != rank) throw Error("invariant projector rank mismatch");
    return basis;
}

struct CacheKey {
    GroupKind kind;
    int n;
    int two_jmax;
    std::vector<SlotSpec> slots;
    auto operator<=>(const CacheKey&) const = default;
};

} // namespace

int invariant_dim(const IrrepTable& table, const std::vector<SlotSpec>& slots) {
    for (const auto& s : slots) table.require_irrep(s.irrep);
    if (slots.empty()) return 1;
    if (table.group().is_finite()) {
        // (1/|G|) sum_u prod chi_slot(u), conjugate slots conjugated
        const auto& g = table.finite();
        cplx acc = 0.0;
        for (int u = 0; u < g.order; ++u) {
            cplx term = 1.0;
            for (const auto& s : slots) {
                cplx ch = g.characters[s.irrep.id][g.class_of[u]];
                term *= s.conj ? std::conj(ch) : ch;
            }
            acc += term;
        }
        return static_cast<int>(std::llround(acc.real() / g.order));
    }
    // coupling-range DP; conjugation leaves SU(2) dimensions unchanged
    std::map<int, long long> counts{{slots[0].irrep.id, 1}};
    for (size_t i = 1; i < slots.size(); ++i) {
        std::map<int, long long> next;
        for (const auto& [k, c] : counts)
            for (int K : su2::coupling_range(k, slots[i].irrep.id)) next[K] += c;
        counts = std::move(next);
    }
    auto it = counts.find(0);
    return it == counts.end() ? 0 : static_cast<int>(it->second);
}

Matrix invariant_basis(const IrrepTable& table, const std::vector<SlotSpec>& slots) {
    for (const auto& s : slots) table.require_irrep(s.irrep);

    static std::mutex mu;
    static std::map<CacheKey, std::shared_ptr<const Matrix>> cache;
    CacheKey key{table.group().kind, table.group().n, table.group().two_jmax, slots};
    {
        std::lock_guard lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return *it->second;
    }

    Matrix basis = table.group().is_finite() ? finite_invariant_basis(table, slots)
                                             : su2_invariant_basis(table, slots);

    if (basis.size() <= (1 << 18)) {
        std::lock_guard lock(mu);
        if (cache.size() > 4096) cache.clear();
        cache.emplace(std::move(key), std::make_shared<const Matrix>(basis));
    }
    return basis;
}

} // namespace tqnn
