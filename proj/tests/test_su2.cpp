#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tqnn/intertwiner.hpp"
#include "tqnn/su2.hpp"

#include <cmath>
#include <random>

using namespace tqnn;

namespace {

GroupElement random_su2(std::mt19937_64& rng, const GroupSpec& g) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    cplx a{dist(rng), dist(rng)}, b{dist(rng), dist(rng)};
    return su2_from_cell(g, a, b);
}

// Racah-style factorial CG oracle for small spins (independent route).
double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double cg_oracle(double j1, double m1, double j2, double m2, double J, double M) {
    if (std::abs(m1 + m2 - M) > 1e-9) return 0.0;
    if (J < std::abs(j1 - j2) - 1e-9 || J > j1 + j2 + 1e-9) return 0.0;
    auto f = [](double x) { return factorial(static_cast<int>(std::lround(x))); };
    const double pref =
        std::sqrt((2 * J + 1) * f(J + j1 - j2) * f(J - j1 + j2) * f(j1 + j2 - J) /
                  f(j1 + j2 + J + 1)) *
        std::sqrt(f(J + M) * f(J - M) * f(j1 - m1) * f(j1 + m1) * f(j2 - m2) * f(j2 + m2));
    double sum = 0.0;
    for (int k = 0; k <= 2 * (j1 + j2 + J); ++k) {
        const double a1 = j1 + j2 - J - k, a2 = j1 - m1 - k, a3 = j2 + m2 - k;
        const double a4 = J - j2 + m1 + k, a5 = J - j1 - m2 + k;
        if (a1 < -1e-9 || a2 < -1e-9 || a3 < -1e-9 || a4 < -1e-9 || a5 < -1e-9) continue;
        sum += ((k % 2) ? -1.0 : 1.0) / (f(k) * f(a1) * f(a2) * f(a3) * f(a4) * f(a5));
    }
    return pref * sum;
}

} // namespace

TEST_CASE("wigner matrices: identity, unitarity, homomorphism, trace") {
    const auto g = GroupSpec::su2(6);
    std::mt19937_64 rng(7);
    for (int two_j : {0, 1, 2, 3, 5}) {
        CHECK(su2::wigner_matrix(two_j, identity(g)).isApprox(
            Matrix::Identity(two_j + 1, two_j + 1), 1e-12));
        for (int rep = 0; rep < 4; ++rep) {
            const auto u = random_su2(rng, g), v = random_su2(rng, g);
            const Matrix mu = su2::wigner_matrix(two_j, u);
            CHECK((mu * mu.adjoint()).isApprox(Matrix::Identity(two_j + 1, two_j + 1), 1e-11));
            const Matrix mv = su2::wigner_matrix(two_j, v);
            const Matrix muv = su2::wigner_matrix(two_j, compose(u, v));
            CHECK((mu * mv).isApprox(muv, 1e-10));
            CHECK(mu.trace().real() ==
                  doctest::Approx(su2_character(two_j, u.class_angle())).epsilon(1e-10));
            CHECK(std::abs(mu.trace().imag()) < 1e-10);
        }
    }
}

TEST_CASE("wigner matrix at a z-rotation is the diagonal phase matrix") {
    const auto g = GroupSpec::su2(4);
    const double theta = 1.234;
    const Matrix m = su2::wigner_matrix(2, su2_rotation(g, theta));
    for (int i = 0; i < 3; ++i) {
        const double mval = 1.0 - i;  // m = j - i
        CHECK(m(i, i).real() == doctest::Approx(std::cos(mval * theta)).epsilon(1e-12));
        CHECK(m(i, i).imag() == doctest::Approx(std::sin(mval * theta)).epsilon(1e-12));
    }
    CHECK(std::abs(m(0, 1)) < 1e-12);
}

TEST_CASE("clebsch-gordan columns agree with the factorial oracle") {
    for (const auto& [tj1, tj2, tJ] : std::vector<std::array<int, 3>>{
             {1, 1, 0}, {1, 1, 2}, {2, 1, 1}, {2, 2, 2}, {3, 2, 1}, {4, 3, 5}}) {
        const auto cg = su2::clebsch_gordan(tj1, tj2, tJ);
        const double j1 = tj1 / 2.0, j2 = tj2 / 2.0, J = tJ / 2.0;
        for (int c = 0; c <= tJ; ++c) {
            const double M = J - c;
            for (int i1 = 0; i1 <= tj1; ++i1)
                for (int i2 = 0; i2 <= tj2; ++i2) {
                    const double m1 = j1 - i1, m2 = j2 - i2;
                    CHECK(cg(i1 * (tj2 + 1) + i2, c) ==
                          doctest::Approx(cg_oracle(j1, m1, j2, m2, J, M)).epsilon(1e-9));
                }
        }
    }
}

TEST_CASE("clebsch-gordan columns are orthonormal and equivariant") {
    const auto g = GroupSpec::su2(8);
    std::mt19937_64 rng(11);
    for (const auto& [tj1, tj2, tJ] :
         std::vector<std::array<int, 3>>{{1, 1, 2}, {2, 2, 0}, {3, 1, 2}, {4, 2, 4}}) {
        const Eigen::MatrixXd cg = su2::clebsch_gordan(tj1, tj2, tJ);
        CHECK((cg.transpose() * cg).isApprox(Eigen::MatrixXd::Identity(tJ + 1, tJ + 1), 1e-11));
        const auto u = random_su2(rng, g);
        const Matrix d1 = su2::wigner_matrix(tj1, u);
        const Matrix d2 = su2::wigner_matrix(tj2, u);
        const Matrix dJ = su2::wigner_matrix(tJ, u);
        Matrix kron = Matrix::Zero((tj1 + 1) * (tj2 + 1), (tj1 + 1) * (tj2 + 1));
        for (int r1 = 0; r1 <= tj1; ++r1)
            for (int c1 = 0; c1 <= tj1; ++c1)
                for (int r2 = 0; r2 <= tj2; ++r2)
                    for (int c2 = 0; c2 <= tj2; ++c2)
                        kron(r1 * (tj2 + 1) + r2, c1 * (tj2 + 1) + c2) = d1(r1, c1) * d2(r2, c2);
        CHECK((kron * cg).isApprox(cg * dJ, 1e-10));
    }
}

TEST_CASE("conjugation intertwiner carries D-bar to D") {
    const auto g = GroupSpec::su2(6);
    std::mt19937_64 rng(3);
    for (int two_j : {1, 2, 3, 4, 5}) {
        const Eigen::MatrixXd c = su2::conjugation_intertwiner(two_j);
        for (int rep = 0; rep < 3; ++rep) {
            const auto u = random_su2(rng, g);
            const Matrix d = su2::wigner_matrix(two_j, u);
            CHECK((d.conjugate() * c).isApprox(c * d, 1e-11));
        }
    }
}

TEST_CASE("invariant dimensions: couplings and duals") {
    IrrepTable table(GroupSpec::su2(8));
    auto dim = [&](std::vector<SlotSpec> slots) { return invariant_dim(table, slots); };
    CHECK(dim({}) == 1);
    CHECK(dim({{IrrepLabel{0}, false}}) == 1);
    CHECK(dim({{IrrepLabel{2}, false}}) == 0);
    CHECK(dim({{IrrepLabel{1}, false}, {IrrepLabel{1}, false}}) == 1);
    CHECK(dim({{IrrepLabel{1}, false}, {IrrepLabel{1}, true}}) == 1);
    CHECK(dim({{IrrepLabel{1}, false}, {IrrepLabel{2}, false}}) == 0);
    CHECK(dim({{IrrepLabel{1}, false}, {IrrepLabel{1}, false}, {IrrepLabel{2}, false}}) == 1);
    // 4-valent: dim = number of allowed intermediate spins
    CHECK(dim({{IrrepLabel{2}, false}, {IrrepLabel{2}, false}, {IrrepLabel{2}, false},
               {IrrepLabel{2}, false}}) == 3);
}

TEST_CASE("invariant bases are orthonormal and group-invariant") {
    const auto g = GroupSpec::su2(6);
    IrrepTable table(g);
    std::mt19937_64 rng(5);
    const std::vector<std::vector<SlotSpec>> sigs = {
        {{IrrepLabel{1}, false}, {IrrepLabel{1}, true}},
        {{IrrepLabel{1}, false}, {IrrepLabel{1}, false}, {IrrepLabel{2}, false}},
        {{IrrepLabel{2}, false}, {IrrepLabel{2}, true}, {IrrepLabel{2}, false},
         {IrrepLabel{2}, true}},
        {{IrrepLabel{1}, true}, {IrrepLabel{3}, false}, {IrrepLabel{2}, true}},
    };
    for (const auto& slots : sigs) {
        const Matrix basis = invariant_basis(table, slots);
        REQUIRE(basis.cols() == invariant_dim(table, slots));
        CHECK((basis.adjoint() * basis)
                  .isApprox(Matrix::Identity(basis.cols(), basis.cols()), 1e-11));
        // invariance: (tensor of D or D-bar) basis = basis
        const auto u = random_su2(rng, g);
        std::vector<Matrix> mats;
        long long total = 1;
        for (const auto& s : slots) {
            Matrix m = su2::wigner_matrix(s.irrep.id, u);
            if (s.conj) m = m.conjugate();
            total *= m.rows();
            mats.push_back(std::move(m));
        }
        for (int col = 0; col < basis.cols(); ++col) {
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(total);
            for (long long r = 0; r < total; ++r) {
                // expand row index into slot indices
                for (long long cidx = 0; cidx < total; ++cidx) {
                    long long rr = r, cc = cidx;
                    cplx prod = 1.0;
                    for (int s = static_cast<int>(slots.size()) - 1; s >= 0; --s) {
                        const int d = static_cast<int>(mats[s].rows());
                        prod *= mats[s](rr % d, cc % d);
                        rr /= d;
                        cc /= d;
                    }
                    v(r) += prod * basis(cidx, col);
                }
            }
            CHECK((v - basis.col(col)).norm() < 1e-10);
        }
    }
}

TEST_CASE("finite-group invariant bases") {
    IrrepTable s3(GroupSpec::s3());
    // standard (x) standard contains the trivial rep once
    const std::vector<SlotSpec> two{{IrrepLabel{2}, false}, {IrrepLabel{2}, false}};
    CHECK(invariant_dim(s3, two) == 1);
    const Matrix basis = invariant_basis(s3, two);
    REQUIRE(basis.cols() == 1);
    const auto& data = s3.finite();
    for (int u = 0; u < 6; ++u) {
        const Matrix& m = data.irrep_matrices[2][u];
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(4);
        for (int r1 = 0; r1 < 2; ++r1)
            for (int r2 = 0; r2 < 2; ++r2)
                for (int c1 = 0; c1 < 2; ++c1)
                    for (int c2 = 0; c2 < 2; ++c2)
                        v(r1 * 2 + r2) += m(r1, c1) * m(r2, c2) * basis(c1 * 2 + c2, 0);
        CHECK((v - basis.col(0)).norm() < 1e-11);
    }
    // trivial (x) sign has no invariant
    CHECK(invariant_dim(s3, {{IrrepLabel{0}, false}, {IrrepLabel{1}, false}}) == 0);
    // sign (x) sign does
    CHECK(invariant_dim(s3, {{IrrepLabel{1}, false}, {IrrepLabel{1}, false}}) == 1);
    // Z4: k (x) conj(k) invariant, k (x) k only for k in {0, 2}
    IrrepTable z4(GroupSpec::cyclic(4));
    CHECK(invariant_dim(z4, {{IrrepLabel{1}, false}, {IrrepLabel{1}, true}}) == 1);
    CHECK(invariant_dim(z4, {{IrrepLabel{1}, false}, {IrrepLabel{1}, false}}) == 0);
    CHECK(invariant_dim(z4, {{IrrepLabel{2}, false}, {IrrepLabel{2}, false}}) == 1);
}
