#pragma once

#include "tqnn/graph.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace tqnn {

/// Oriented combinatorial 2-complex with named boundary graphs.
struct TwoComplex {
    struct Edge {
        int id = 0;
        int src = 0;
        int dst = 0;
    };
    struct FaceStep {
        int edge = 0;
        bool forward = true;
    };
    struct Face {
        int id = 0;
        std::vector<FaceStep> boundary;  // closed directed edge path
    };
    struct Boundary {
        std::string name;
        std::vector<int> vertices;
        std::vector<int> edges;
    };

    std::vector<int> vertices;
    std::vector<Edge> edges;
    std::vector<Face> faces;
    std::vector<Boundary> boundaries;

    const Edge& edge(int id) const;
    const Face& face(int id) const;
    bool is_boundary_edge(int id) const;
    /// View of a named boundary as a spin-network graph (links inherit the
    /// edge orientations).
    Graph boundary_graph(const Boundary& b) const;

    int fresh_vertex_id() const;
    int fresh_edge_id() const;
    int fresh_face_id() const;
};

/// Structural invariant check; returns human-readable problems (empty = ok).
std::vector<std::string> check_complex(const TwoComplex& c);

/// Ordered product of edge holonomies around the face, inverting steps
/// traversed against their orientation.
GroupElement face_holonomy(const TwoComplex& c, int face_id,
                           const std::map<int, GroupElement>& assignment);

struct SplitEdge {
    int edge = 0;
};
struct SplitFace {
    int face = 0;
    // chord endpoints as positions into the face boundary cycle; the chord
    // runs from the source corner of step `from` to the source corner of
    // step `to`
    int from = 0;
    int to = 0;
};
using SubdivisionMove = std::variant<SplitEdge, SplitFace>;

/// Topology-preserving refinement.  SplitEdge replaces an interior edge by
/// two through a new vertex; SplitFace cuts a face along a new chord edge.
TwoComplex subdivide(const TwoComplex& c, const SubdivisionMove& move);

/// All moves applicable to interior cells, in a fixed deterministic order.
std::vector<SubdivisionMove> enumerate_interior_moves(const TwoComplex& c);

/// Applies `count` uniformly chosen interior moves with a seeded generator.
TwoComplex random_interior_moves(const TwoComplex& c, int count, std::uint64_t seed);

/// Reverses the orientation of every face; boundaries named "in"/"out" swap.
TwoComplex reverse_orientation(const TwoComplex& c);

/// Gluing prescription identifying the "out" boundary of one copy with the
/// "in" boundary of another (cylinder composition).
struct GluingRule {
    std::map<int, int> vertex_map;  // out-boundary vertex -> in-boundary vertex
    std::map<int, int> edge_map;    // out-boundary edge -> in-boundary edge
};

/// Composes c2 after c1 along rule (c1.out glued to c2.in).  The glued cells
/// become interior; the result keeps c1's "in" and c2's "out" boundaries.
/// An empty rule on empty boundaries returns c1 unchanged.
TwoComplex compose_complexes(const TwoComplex& c1, const TwoComplex& c2, const GluingRule& rule);

/// The natural rule gluing a cylinder-like complex to a second copy of
/// itself: out-boundary cells map to the matching in-boundary cells.
GluingRule self_gluing_rule(const TwoComplex& c);

namespace corpus {

/// One boundary loop spanned by a single face (the rim is the boundary).
TwoComplex disk();
/// Two boundary loops joined by one square face around a radial edge.
TwoComplex annulus();
/// Closed sphere: one vertex, one edge, two faces glued along it.
TwoComplex sphere();
/// Closed torus: one vertex, two edges, one square face [a, b, a~, b~].
TwoComplex torus();
/// Closed genus-2 surface from the standard octagon gluing.
TwoComplex genus2();
/// Cylinder gamma x [0,1] over a boundary graph: boundaries "in"/"out" are
/// copies of gamma, one radial edge per node, one square face per link.
TwoComplex cylinder_over(const Graph& gamma);
/// All named closed-surface and bounded corpus complexes.
std::vector<std::pair<std::string, TwoComplex>> all();

} // namespace corpus

} // namespace tqnn
