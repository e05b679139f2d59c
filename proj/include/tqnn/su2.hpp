#pragma once

#include "tqnn/group.hpp"

namespace tqnn::su2 {

/// Spin-j representation matrix of u (basis |j m> with m descending, index
/// i <-> m = j - i, Condon-Shortley phases).
Matrix wigner_matrix(int two_j, const GroupElement& u);

/// Clebsch-Gordan matrix coupling j1 (x) j2 -> J: shape (d1*d2) x dJ with
/// product row index i1*d2 + i2 and column index running over M descending.
/// Columns are orthonormal; Condon-Shortley sign convention.
Eigen::MatrixXd clebsch_gordan(int two_j1, int two_j2, int two_J);

/// Allowed total spins of j1 (x) j2 (ascending two_J values).
std::vector<int> coupling_range(int two_j1, int two_j2);

/// The conjugation intertwiner C with conj(D^j(u)) C = C D^j(u):
/// C[i', i] = (-1)^i for i' = 2j - i, zero otherwise.
Eigen::MatrixXd conjugation_intertwiner(int two_j);

} // namespace tqnn::su2
