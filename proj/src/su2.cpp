#include "tqnn/su2.hpp"

#include <cmath>

namespace tqnn::su2 {

namespace {

// j(j+1) - m(m+1) from doubled arguments; the squared raising coefficient.
double raise2(int two_j, int two_m) {
    return (double(two_j) * (two_j + 2) - double(two_m) * (two_m + 2)) / 4.0;
}

} // namespace

Matrix wigner_matrix(int two_j, const GroupElement& u) {
    if (u.group.kind != GroupKind::SU2) throw Error("wigner_matrix requires an SU2 element");
    if (two_j < 0) throw Error("negative spin");
    const int d = two_j + 1;
    if (two_j == 0) return Matrix::Identity(1, 1);
    if (two_j == 1) {
        Matrix m(2, 2);
        m << u.a, u.b, -std::conj(u.b), std::conj(u.a);
        return m;
    }

    const double c = u.a.real();
    const double vx = -u.b.imag(), vy = -u.b.real(), vz = -u.a.imag();
    const double s = std::sqrt(vx * vx + vy * vy + vz * vz);
    if (s == 0.0) {
        const double sign = (c >= 0.0) ? 1.0 : ((two_j % 2 == 0) ? 1.0 : -1.0);
        return sign * Matrix::Identity(d, d);
    }
    const double theta = 2.0 * std::atan2(s, c);
    const double nx = vx / s, ny = vy / s, nz = vz / s;

    // H = n . J, then D = exp(-i theta H) by eigendecomposition.
    Matrix h = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const int two_m = two_j - 2 * i;
        h(i, i) = nz * (two_m / 2.0);
        if (i > 0) {
            // J_+ : index i -> i-1 raises m
            const double a = std::sqrt(raise2(two_j, two_m));
            h(i - 1, i) += cplx(nx / 2.0, -ny / 2.0) * a;
            h(i, i - 1) += cplx(nx / 2.0, ny / 2.0) * a;
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const auto& evals = es.eigenvalues();
    const Matrix& v = es.eigenvectors();
    Matrix phases = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) phases(i, i) = std::polar(1.0, -theta * evals(i));
    return v * phases * v.adjoint();
}

std::vector<int> coupling_range(int two_j1, int two_j2) {
    std::vector<int> out;
    for (int k = std::abs(two_j1 - two_j2); k <= two_j1 + two_j2; k += 2) out.push_back(k);
    return out;
}

Eigen::MatrixXd clebsch_gordan(int two_j1, int two_j2, int two_J) {
    if (two_j1 < 0 || two_j2 < 0) throw Error("negative spin in clebsch_gordan");
    if (two_J < std::abs(two_j1 - two_j2) || two_J > two_j1 + two_j2 ||
        (two_j1 + two_j2 + two_J) % 2 != 0)
        throw Error("clebsch_gordan: total spin violates the triangle rule");

    const int d1 = two_j1 + 1, d2 = two_j2 + 1, dJ = two_J + 1;
    auto row = [&](int two_m1, int two_m2) {
        return ((two_j1 - two_m1) / 2) * d2 + (two_j2 - two_m2) / 2;
    };
    Eigen::MatrixXd cg = Eigen::MatrixXd::Zero(d1 * d2, dJ);

    // Highest weight |J,J>: two-term recursion from J_+ annihilation.
    const int tm1_lo = std::max(-two_j1, two_J - two_j2);
    const int tm1_hi = std::min(two_j1, two_J + two_j2);
    std::vector<double> c((tm1_hi - tm1_lo) / 2 + 1, 0.0);
    c[0] = 1.0;
    for (int k = 1; k < static_cast<int>(c.size()); ++k) {
        const int tm1 = tm1_lo + 2 * k;
        // c_{m1} = -c_{m1-1} A(j1, m1-1) / A(j2, J-m1)
        const double num = std::sqrt(raise2(two_j1, tm1 - 2));
        const double den = std::sqrt(raise2(two_j2, two_J - tm1));
        c[k] = -c[k - 1] * num / den;
    }
    double norm = 0.0;
    for (double x : c) norm += x * x;
    norm = std::sqrt(norm);
    const double sign = (c.back() > 0.0) ? 1.0 : -1.0;  // <j1 j1; j2 J-j1 | J J> > 0
    for (int k = 0; k < static_cast<int>(c.size()); ++k)
        cg(row(tm1_lo + 2 * k, two_J - tm1_lo - 2 * k), 0) = sign * c[k] / norm;

    // Lower: |J, M-1> = (J1- + J2-) |J, M> / B, with B^2 = J(J+1) - M(M-1).
    for (int col = 1; col < dJ; ++col) {
        const int two_Mt = two_J - 2 * col;  // target M
        const double b = std::sqrt(raise2(two_J, two_Mt));
        for (int tm1 = -two_j1; tm1 <= two_j1; tm1 += 2) {
            const int tm2 = two_Mt - tm1;
            if (std::abs(tm2) > two_j2) continue;
            double val = 0.0;
            if (tm1 + 2 <= two_j1)  // J1- from |m1+1, m2>
                val += std::sqrt(raise2(two_j1, tm1)) * cg(row(tm1 + 2, tm2), col - 1);
            if (tm2 + 2 <= two_j2)  // J2- from |m1, m2+1>
                val += std::sqrt(raise2(two_j2, tm2)) * cg(row(tm1, tm2 + 2), col - 1);
            cg(row(tm1, tm2), col) = val / b;
        }
    }
    return cg;
}

Eigen::MatrixXd conjugation_intertwiner(int two_j) {
    const int d = two_j + 1;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) c(two_j - i, i) = (i % 2 == 0) ? 1.0 : -1.0;
    return c;
}

} // namespace tqnn::su2
