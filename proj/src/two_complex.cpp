#include "tqnn/two_complex.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

namespace tqnn {

namespace {

int step_tail(const TwoComplex& c, const TwoComplex::FaceStep& s) {
    const auto& e = c.edge(s.edge);
    return s.forward ? e.src : e.dst;
}

int step_head(const TwoComplex& c, const TwoComplex::FaceStep& s) {
    const auto& e = c.edge(s.edge);
    return s.forward ? e.dst : e.src;
}

int max_id(const std::vector<int>& ids) {
    return ids.empty() ? -1 : *std::max_element(ids.begin(), ids.end());
}

} // namespace

const TwoComplex::Edge& TwoComplex::edge(int id) const {
    for (const auto& e : edges)
        if (e.id == id) return e;
    throw Error("unknown edge id " + std::to_string(id));
}

const TwoComplex::Face& TwoComplex::face(int id) const {
    for (const auto& f : faces)
        if (f.id == id) return f;
    throw Error("unknown face id " + std::to_string(id));
}

bool TwoComplex::is_boundary_edge(int id) const {
    for (const auto& b : boundaries)
        if (std::find(b.edges.begin(), b.edges.end(), id) != b.edges.end()) return true;
    return false;
}

Graph TwoComplex::boundary_graph(const Boundary& b) const {
    Graph g;
    g.nodes = b.vertices;
    for (int id : b.edges) {
        const auto& e = edge(id);
        g.links.push_back({e.id, e.src, e.dst});
    }
    return g;
}

int TwoComplex::fresh_vertex_id() const { return max_id(vertices) + 1; }

int TwoComplex::fresh_edge_id() const {
    int m = -1;
    for (const auto& e : edges) m = std::max(m, e.id);
    return m + 1;
}

int TwoComplex::fresh_face_id() const {
    int m = -1;
    for (const auto& f : faces) m = std::max(m, f.id);
    return m + 1;
}

std::vector<std::string> check_complex(const TwoComplex& c) {
    std::vector<std::string> out;
    std::set<int> vids(c.vertices.begin(), c.vertices.end());
    if (vids.size() != c.vertices.size()) out.push_back("duplicate vertex ids");
    std::set<int> eids;
    for (const auto& e : c.edges) {
        if (!eids.insert(e.id).second)
            out.push_back("duplicate edge id " + std::to_string(e.id));
        if (!vids.count(e.src) || !vids.count(e.dst))
            out.push_back("edge " + std::to_string(e.id) + " references missing vertex");
    }
    std::set<int> fids;
    for (const auto& f : c.faces) {
        if (!fids.insert(f.id).second)
            out.push_back("duplicate face id " + std::to_string(f.id));
        if (f.boundary.empty()) {
            out.push_back("face " + std::to_string(f.id) + " has an empty boundary");
            continue;
        }
        bool edges_ok = true;
        for (const auto& s : f.boundary)
            if (!eids.count(s.edge)) {
                out.push_back("face " + std::to_string(f.id) + " references missing edge " +
                              std::to_string(s.edge));
                edges_ok = false;
            }
        if (!edges_ok) continue;
        const int k = static_cast<int>(f.boundary.size());
        for (int i = 0; i < k; ++i)
            if (step_head(c, f.boundary[i]) != step_tail(c, f.boundary[(i + 1) % k])) {
                out.push_back("face " + std::to_string(f.id) + " boundary is not a closed path");
                break;
            }
    }
    std::set<int> seen_boundary_edges;
    for (const auto& b : c.boundaries) {
        for (int v : b.vertices)
            if (!vids.count(v))
                out.push_back("boundary '" + b.name + "' references missing vertex");
        for (int e : b.edges) {
            if (!eids.count(e)) out.push_back("boundary '" + b.name + "' references missing edge");
            if (!seen_boundary_edges.insert(e).second)
                out.push_back("edge " + std::to_string(e) + " appears in two boundaries");
        }
    }
    return out;
}

GroupElement face_holonomy(const TwoComplex& c, int face_id,
                           const std::map<int, GroupElement>& assignment) {
    const auto& f = c.face(face_id);
    if (f.boundary.empty()) throw Error("face has empty boundary");
    auto get = [&](int edge) -> const GroupElement& {
        auto it = assignment.find(edge);
        if (it == assignment.end())
            throw Error("missing assignment for edge " + std::to_string(edge));
        return it->second;
    };
    GroupElement h = identity(get(f.boundary.front().edge).group);
    for (const auto& s : f.boundary) {
        const GroupElement& u = get(s.edge);
        h = compose(h, s.forward ? u : invert(u));
    }
    return h;
}

TwoComplex subdivide(const TwoComplex& c, const SubdivisionMove& move) {
    TwoComplex out = c;
    if (std::holds_alternative<SplitEdge>(move)) {
        const int eid = std::get<SplitEdge>(move).edge;
        const auto& e = c.edge(eid);
        if (c.is_boundary_edge(eid))
            throw Error("SplitEdge rejected: edge " + std::to_string(eid) + " lies on a boundary");
        const int w = out.fresh_vertex_id();
        const int e1 = out.fresh_edge_id();
        const int e2 = e1 + 1;
        out.vertices.push_back(w);
        std::erase_if(out.edges, [&](const auto& x) { return x.id == eid; });
        out.edges.push_back({e1, e.src, w});
        out.edges.push_back({e2, w, e.dst});
        for (auto& f : out.faces) {
            std::vector<TwoComplex::FaceStep> chain;
            for (const auto& s : f.boundary) {
                if (s.edge != eid) {
                    chain.push_back(s);
                } else if (s.forward) {
                    chain.push_back({e1, true});
                    chain.push_back({e2, true});
                } else {
                    chain.push_back({e2, false});
                    chain.push_back({e1, false});
                }
            }
            f.boundary = std::move(chain);
        }
        return out;
    }

    const auto& sf = std::get<SplitFace>(move);
    const auto& f = c.face(sf.face);
    const int k = static_cast<int>(f.boundary.size());
    if (sf.from < 0 || sf.from >= k || sf.to < 0 || sf.to >= k || sf.from == sf.to)
        throw Error("SplitFace rejected: chord endpoints must be distinct corners of the face");
    const int va = step_tail(c, f.boundary[sf.from]);
    const int vb = step_tail(c, f.boundary[sf.to]);
    const int d = out.fresh_edge_id();
    out.edges.push_back({d, vb, va});

    std::vector<TwoComplex::FaceStep> part1, part2;
    for (int i = sf.from; i != sf.to; i = (i + 1) % k) part1.push_back(f.boundary[i]);
    part1.push_back({d, true});
    for (int i = sf.to; i != sf.from; i = (i + 1) % k) part2.push_back(f.boundary[i]);
    part2.push_back({d, false});

    const int f2 = out.fresh_face_id();
    for (auto& g : out.faces)
        if (g.id == sf.face) g.boundary = std::move(part1);
    out.faces.push_back({f2, std::move(part2)});
    return out;
}

std::vector<SubdivisionMove> enumerate_interior_moves(const TwoComplex& c) {
    std::vector<SubdivisionMove> moves;
    std::vector<int> eids;
    for (const auto& e : c.edges) eids.push_back(e.id);
    std::sort(eids.begin(), eids.end());
    for (int id : eids)
        if (!c.is_boundary_edge(id)) moves.push_back(SplitEdge{id});
    std::vector<int> fids;
    for (const auto& f : c.faces) fids.push_back(f.id);
    std::sort(fids.begin(), fids.end());
    for (int id : fids) {
        const int k = static_cast<int>(c.face(id).boundary.size());
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                if (i != j) moves.push_back(SplitFace{id, i, j});
    }
    return moves;
}

TwoComplex random_interior_moves(const TwoComplex& c, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    TwoComplex out = c;
    for (int i = 0; i < count; ++i) {
        const auto moves = enumerate_interior_moves(out);
        if (moves.empty()) break;
        out = subdivide(out, moves[rng() % moves.size()]);
    }
    return out;
}

TwoComplex reverse_orientation(const TwoComplex& c) {
    TwoComplex out = c;
    for (auto& f : out.faces) {
        std::reverse(f.boundary.begin(), f.boundary.end());
        for (auto& s : f.boundary) s.forward = !s.forward;
    }
    for (auto& b : out.boundaries) {
        if (b.name == "in")
            b.name = "out";
        else if (b.name == "out")
            b.name = "in";
    }
    return out;
}

namespace {

const TwoComplex::Boundary* find_boundary(const TwoComplex& c, const std::string& name) {
    for (const auto& b : c.boundaries)
        if (b.name == name) return &b;
    return nullptr;
}

} // namespace

TwoComplex compose_complexes(const TwoComplex& c1, const TwoComplex& c2, const GluingRule& rule) {
    const auto* out_b = find_boundary(c1, "out");
    const auto* in_b = find_boundary(c2, "in");
    if (rule.edge_map.empty() && rule.vertex_map.empty()) {
        if ((out_b && !out_b->edges.empty()) || (in_b && !in_b->edges.empty()))
            throw Error("empty gluing rule on a nonempty boundary");
        return c1;  // identity composition
    }
    if (!out_b || !in_b) throw Error("composition needs an 'out' and an 'in' boundary");

    auto as_set = [](const std::vector<int>& v) { return std::set<int>(v.begin(), v.end()); };
    std::set<int> out_vs = as_set(out_b->vertices), out_es = as_set(out_b->edges);
    std::set<int> in_vs = as_set(in_b->vertices), in_es = as_set(in_b->edges);
    for (const auto& [a, b] : rule.vertex_map)
        if (!out_vs.erase(a) || !in_vs.erase(b))
            throw Error("gluing rule vertex pair is not on the out/in boundaries");
    for (const auto& [a, b] : rule.edge_map)
        if (!out_es.erase(a) || !in_es.erase(b))
            throw Error("gluing rule edge pair is not on the out/in boundaries");
    if (!out_vs.empty() || !in_vs.empty() || !out_es.empty() || !in_es.empty())
        throw Error("gluing rule must cover the glued boundaries exactly");

    // remap c2 ids into a fresh range, sending glued in-cells onto c1 cells
    const int voff = c1.fresh_vertex_id();
    const int eoff = c1.fresh_edge_id();
    const int foff = c1.fresh_face_id();
    std::map<int, int> vmap, emap;
    for (const auto& [a, b] : rule.vertex_map) vmap[b] = a;
    for (const auto& [a, b] : rule.edge_map) emap[b] = a;
    auto map_vertex = [&](int v) {
        auto it = vmap.find(v);
        return it != vmap.end() ? it->second : v + voff;
    };
    auto map_edge = [&](int e) {
        auto it = emap.find(e);
        return it != emap.end() ? it->second : e + eoff;
    };

    TwoComplex out = c1;
    std::erase_if(out.boundaries, [](const auto& b) { return b.name == "out"; });
    for (int v : c2.vertices)
        if (!vmap.count(v)) out.vertices.push_back(v + voff);
    for (const auto& e : c2.edges) {
        if (emap.count(e.id)) {
            const auto& target = c1.edge(emap.at(e.id));
            if (target.src != map_vertex(e.src) || target.dst != map_vertex(e.dst))
                throw Error("gluing rule does not respect edge orientations");
            continue;
        }
        out.edges.push_back({e.id + eoff, map_vertex(e.src), map_vertex(e.dst)});
    }
    for (const auto& f : c2.faces) {
        TwoComplex::Face nf{f.id + foff, {}};
        for (const auto& s : f.boundary) nf.boundary.push_back({map_edge(s.edge), s.forward});
        out.faces.push_back(std::move(nf));
    }
    for (const auto& b : c2.boundaries) {
        if (b.name == "in") continue;
        TwoComplex::Boundary nb{b.name, {}, {}};
        for (int v : b.vertices) nb.vertices.push_back(map_vertex(v));
        for (int e : b.edges) nb.edges.push_back(map_edge(e));
        out.boundaries.push_back(std::move(nb));
    }
    auto problems = check_complex(out);
    if (!problems.empty()) throw Error("composition produced an invalid complex: " + problems.front());
    return out;
}

GluingRule self_gluing_rule(const TwoComplex& c) {
    const auto* out_b = find_boundary(c, "out");
    const auto* in_b = find_boundary(c, "in");
    if (!out_b || !in_b) {
        if ((!out_b || out_b->edges.empty()) && (!in_b || in_b->edges.empty())) return {};
        throw Error("self-gluing needs 'in' and 'out' boundaries");
    }
    const Graph go = c.boundary_graph(*out_b);
    const Graph gi = c.boundary_graph(*in_b);
    const auto isos = find_graph_isomorphisms(go, gi);
    if (isos.empty()) throw Error("boundaries are not composable: no isomorphism");
    GluingRule rule;
    rule.vertex_map = isos.front().node_map;
    rule.edge_map = isos.front().link_map;
    return rule;
}

namespace corpus {

TwoComplex disk() {
    TwoComplex c;
    c.vertices = {0};
    c.edges = {{0, 0, 0}};
    c.faces = {{0, {{0, true}}}};
    c.boundaries = {{"rim", {0}, {0}}};
    return c;
}

TwoComplex annulus() {
    Graph loop;
    loop.nodes = {0};
    loop.links = {{0, 0, 0}};
    return cylinder_over(loop);
}

TwoComplex sphere() {
    TwoComplex c;
    c.vertices = {0};
    c.edges = {{0, 0, 0}};
    c.faces = {{0, {{0, true}}}, {1, {{0, false}}}};
    return c;
}

TwoComplex torus() {
    TwoComplex c;
    c.vertices = {0};
    c.edges = {{0, 0, 0}, {1, 0, 0}};
    c.faces = {{0, {{0, true}, {1, true}, {0, false}, {1, false}}}};
    return c;
}

TwoComplex genus2() {
    TwoComplex c;
    c.vertices = {0};
    c.edges = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
    c.faces = {{0,
                {{0, true},
                 {1, true},
                 {0, false},
                 {1, false},
                 {2, true},
                 {3, true},
                 {2, false},
                 {3, false}}}};
    return c;
}

TwoComplex cylinder_over(const Graph& gamma) {
    TwoComplex c;
    const int voff = max_id(gamma.nodes) + 1;
    int max_link = -1;
    for (const auto& l : gamma.links) max_link = std::max(max_link, l.id);
    const int eoff = max_link + 1;   // out-copy links
    const int roff = 2 * eoff + voff;  // radial edges, clear of both copies

    TwoComplex::Boundary in{"in", gamma.nodes, {}}, out{"out", {}, {}};
    for (int v : gamma.nodes) {
        c.vertices.push_back(v);
        c.vertices.push_back(v + voff);
        out.vertices.push_back(v + voff);
    }
    for (const auto& l : gamma.links) {
        c.edges.push_back({l.id, l.src, l.dst});
        c.edges.push_back({l.id + eoff, l.src + voff, l.dst + voff});
        in.edges.push_back(l.id);
        out.edges.push_back(l.id + eoff);
    }
    for (int v : gamma.nodes) c.edges.push_back({roff + v, v, v + voff});
    for (const auto& l : gamma.links)
        c.faces.push_back({l.id,
                           {{l.id, true},
                            {roff + l.dst, true},
                            {l.id + eoff, false},
                            {roff + l.src, false}}});
    c.boundaries = {in, out};
    return c;
}

std::vector<std::pair<std::string, TwoComplex>> all() {
    return {{"disk", disk()},
            {"annulus", annulus()},
            {"sphere", sphere()},
            {"torus", torus()},
            {"genus2", genus2()}};
}

} // namespace corpus

} // namespace tqnn
