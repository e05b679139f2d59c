#pragma once

#include "tqnn/group.hpp"

namespace tqnn {

/// One tensor slot of an invariant subspace: carries the irrep acting on it
/// and whether it transforms in the conjugate (dual) representation.
struct SlotSpec {
    IrrepLabel irrep;
    bool conj = false;
    auto operator<=>(const SlotSpec&) const = default;
};

/// Dimension of Inv(tensor product over slots), without building tensors.
/// Finite groups use the exact character average; SU(2) a coupling-range DP.
int invariant_dim(const IrrepTable& table, const std::vector<SlotSpec>& slots);

/// Orthonormal basis of the invariant subspace, returned as a matrix of
/// shape (prod of slot dims) x rank with row-major multi-index over slots.
/// Deterministic: SU(2) uses the left-to-right recoupling tree with
/// intermediate spins enumerated in ascending order (conjugate slots get
/// the epsilon map applied); finite groups project with the group average
/// and orthonormalize columns in index order.
Matrix invariant_basis(const IrrepTable& table, const std::vector<SlotSpec>& slots);

} // namespace tqnn
