#pragma once

#include "tqnn/group.hpp"
#include "tqnn/intertwiner.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tqnn {

/// Directed multigraph; self-loops and parallel links allowed.
struct Graph {
    struct Link {
        int id = 0;
        int src = 0;
        int dst = 0;
    };
    std::vector<int> nodes;
    std::vector<Link> links;

    const Link& link(int id) const;
    bool has_node(int id) const;
    /// Number of link endpoints at the node; self-loops count twice.
    int valence(int node) const;
};

/// One endpoint of a link as seen from a node.  `outgoing` endpoints
/// transform in the conjugate representation.
struct Endpoint {
    int link = 0;
    bool outgoing = false;
    auto operator<=>(const Endpoint&) const = default;
};

/// Endpoints at a node, sorted by (link id, incoming before outgoing).
/// This fixed order is the recoupling-tree slot order for intertwiners.
std::vector<Endpoint> node_endpoints(const Graph& g, int node);

/// Boundary state: graph, one irrep per link, one intertwiner basis index
/// per node.  Valence-2 nodes with one incoming and one outgoing endpoint
/// carrying the same irrep use the identity pairing (so a single loop
/// evaluates to the character); all other nodes use the orthonormal
/// recoupling basis over the endpoint order above.
struct SpinNetwork {
    GroupSpec group;
    Graph graph;
    std::map<int, IrrepLabel> spins;
    std::map<int, int> intertwiners;
};

/// Gaussian weights of a coherent boundary state.
struct CoherentWeights {
    std::map<int, double> means;
    std::map<int, double> spreads;
};

/// Default spread policy: sigma = max(mean, 1/2)^(1/4), so the induced
/// spin variance scales like 1/sqrt(mean).
double default_spread(double mean);

struct Violation {
    std::string where;    // "node 3" / "link 7"
    std::string message;
};

/// Empty iff the network satisfies every invariant; violations are data.
std::vector<Violation> validate(const SpinNetwork& sn);

/// Dimension of the gauge-invariant intertwiner space at a node.
int intertwiner_dim(const SpinNetwork& sn, int node);

/// Signature of intertwiner slots at a node (endpoint order).
std::vector<SlotSpec> node_signature(const SpinNetwork& sn, int node);

/// Hilbert dimension with fixed labels: the literal per-endpoint product
/// prod_n prod_{l in dn} dim(j_l); every link is counted at both endpoints.
long long dim_hilbert(const SpinNetwork& sn);

/// Sum of the literal product over all labelings from the table; factorizes
/// as (sum_r dim(r)^2)^{#links}.
long long dim_hilbert(const Graph& g, const IrrepTable& table);

/// Total valence V = sum_n v_n = 2 |links|.
int total_valence(const Graph& g);

/// Empirical risk of a spin assignment around coherent means:
/// sum_l (j_l - mean_l)^2 / (2L).
double erm(const std::map<int, double>& spins, const std::map<int, double>& means);

/// prod_l exp(-(j_l - mean_l)^2 / (2 sigma_l^2)), normalized per link so the
/// best admissible half-integer spin in [0, J_max] has factor 1.  Missing
/// spreads fall back to the default policy.
double coherent_amplitude(const CoherentWeights& w, const std::map<int, IrrepLabel>& spins,
                          const IrrepTable& table);

/// Nearest admissible half-integer in [0, J_max] (ties broken downward),
/// returned as two_j.
int nearest_admissible_two_j(double mean, int two_jmax);

/// Contracts the link representation matrices against the node intertwiners.
cplx evaluate_cylindrical(const SpinNetwork& sn,
                          const std::map<int, GroupElement>& holonomies);

/// A directed-multigraph isomorphism a -> b.  With orientation reversal
/// allowed, `flipped[l]` marks links mapped against the target orientation.
struct GraphIsomorphism {
    std::map<int, int> node_map;
    std::map<int, int> link_map;
    std::map<int, bool> flipped;
};

/// All isomorphisms from a to b in a fixed deterministic order (ascending
/// node/link candidates, forward orientation before flipped).
std::vector<GraphIsomorphism> find_graph_isomorphisms(const Graph& a, const Graph& b,
                                                      bool allow_reversal = false);

} // namespace tqnn
