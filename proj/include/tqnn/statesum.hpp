#pragma once

#include "tqnn/graph.hpp"
#include "tqnn/two_complex.hpp"

#include <optional>

namespace tqnn {

enum class ExactnessKind { Exact, CutoffApprox, Quadrature };

struct Exactness {
    ExactnessKind kind = ExactnessKind::Exact;
    int parameter = 0;  // two_jmax for CutoffApprox, node count for Quadrature
};

/// Complex amplitude with provenance metadata.
struct Amplitude {
    cplx value{0.0, 0.0};
    GroupSpec group;
    Exactness exactness;
};

struct StateSumOptions {
    long long max_table_entries = 40'000'000;
    long long max_assignments = 4'000'000;  // SU2 face-spin assignments
    bool allow_orientation_reversal = false;
};

/// BF state sum: one normalized Haar integration per unassigned edge, one
/// flatness delta per face.  Finite groups evaluate the exact nested sum by
/// variable elimination; SU(2) uses the character expansion truncated at the
/// group's cutoff.  With a boundary assignment the cylindrical amplitude
/// Z(U_boundary) is returned, otherwise the closed partition function.
Amplitude partition_function(const TwoComplex& c, const GroupSpec& group,
                             const std::map<int, GroupElement>& boundary_assignment = {},
                             const StateSumOptions& opts = {});

/// Face amplitude kernel sum_j dim_j chi^j(prod_e U_e) prod_e chi^j(U_f),
/// truncated at the table cutoff for SU(2).
cplx face_amplitude_kernel(const IrrepTable& table, const std::vector<GroupElement>& face_edges,
                           const GroupElement& u_f);

/// <psi_out, P psi_in>: the flatness projector matrix element obtained by
/// integrating both cylindrical functionals against the state sum over the
/// boundary holonomies.  Returns exactly zero when a state's graph admits no
/// isomorphism onto its boundary graph (the topological-mismatch channel).
/// Throws when several isomorphisms induce different label transfers and no
/// explicit match is supplied.
Amplitude physical_inner_product(const SpinNetwork& psi_in, const SpinNetwork& psi_out,
                                 const TwoComplex& c, const StateSumOptions& opts = {},
                                 const std::optional<GraphIsomorphism>& match_in = {},
                                 const std::optional<GraphIsomorphism>& match_out = {});

/// True if the state graph matches the boundary the state would attach to.
/// pip callers use this to distinguish the exact-zero mismatch channel.
bool boundary_matches(const SpinNetwork& state, const TwoComplex& c, bool out_side,
                      const StateSumOptions& opts = {});

struct IdempotenceReport {
    struct Row {
        cplx once;
        cplx twice;
    };
    std::vector<Row> rows;
    double max_abs_deviation = 0.0;
};

/// Verifies <P^2 psi, phi> = <P psi, phi> by gluing the complex to a second
/// copy of itself along `rule` and comparing amplitudes for each state pair.
/// An empty rule on an empty boundary degenerates to Z(c) on both sides.
IdempotenceReport projector_idempotence_check(
    const TwoComplex& c, const GluingRule& rule,
    const std::vector<std::pair<SpinNetwork, SpinNetwork>>& state_pairs,
    const StateSumOptions& opts = {});

} // namespace tqnn
