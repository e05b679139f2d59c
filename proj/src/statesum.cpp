#include "tqnn/statesum.hpp"
#include "tqnn/contraction.hpp"
#include "tqnn/intertwiner.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace tqnn {

namespace {

// Dense factor given in an arbitrary slot order; permutes into ascending-var
// layout for the contraction engine.
Factor make_factor(const std::vector<int>& vars, const std::vector<int>& dims,
                   const std::vector<cplx>& table) {
    const size_t n = vars.size();
    std::vector<size_t> perm(n);
    std::iota(perm.begin(), perm.end(), size_t{0});
    std::sort(perm.begin(), perm.end(), [&](size_t x, size_t y) { return vars[x] < vars[y]; });

    std::vector<long long> src_stride(n, 1);
    for (int k = static_cast<int>(n) - 2; k >= 0; --k)
        src_stride[k] = src_stride[k + 1] * dims[k + 1];

    Factor f;
    long long total = 1;
    for (size_t j = 0; j < n; ++j) {
        f.vars.push_back(vars[perm[j]]);
        total *= dims[perm[j]];
    }
    f.table.resize(total);
    std::vector<int> idx(n, 0);
    for (long long out = 0; out < total; ++out) {
        long long src = 0;
        for (size_t j = 0; j < n; ++j) src += idx[j] * src_stride[perm[j]];
        f.table[out] = table[src];
        for (int j = static_cast<int>(n) - 1; j >= 0; --j) {
            if (++idx[j] < dims[perm[j]]) break;
            idx[j] = 0;
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// Finite-group evaluation: exact nested sums by variable elimination.

cplx finite_partition_value(const TwoComplex& c, const IrrepTable& table,
                            const std::map<int, GroupElement>& assignment,
                            const StateSumOptions& opts) {
    const auto& g = table.finite();
    const int order = g.order;

    std::vector<int> free_edges;
    for (const auto& e : c.edges)
        if (!assignment.count(e.id)) free_edges.push_back(e.id);
    std::sort(free_edges.begin(), free_edges.end());

    FactorNetwork net;
    std::map<int, int> var_of;
    for (int e : free_edges) var_of[e] = net.add_variable(order, 1.0 / order);

    for (const auto& f : c.faces) {
        std::vector<int> face_free;
        for (const auto& s : f.boundary)
            if (var_of.count(s.edge)) face_free.push_back(s.edge);
        std::sort(face_free.begin(), face_free.end());
        face_free.erase(std::unique(face_free.begin(), face_free.end()), face_free.end());

        long long size = 1;
        for (size_t i = 0; i < face_free.size(); ++i) {
            size *= order;
            if (size > opts.max_table_entries) throw BudgetError("face factor exceeds table budget");
        }
        Factor fac;
        for (int e : face_free) fac.vars.push_back(var_of.at(e));
        fac.table.assign(size, cplx{0.0, 0.0});

        std::map<int, int> pos;
        for (size_t i = 0; i < face_free.size(); ++i) pos[face_free[i]] = static_cast<int>(i);
        std::vector<int> vals(face_free.size(), 0);
        for (long long idx = 0; idx < size; ++idx) {
            int h = 0;  // identity index
            for (const auto& s : f.boundary) {
                int u;
                if (auto it = pos.find(s.edge); it != pos.end())
                    u = vals[it->second];
                else
                    u = assignment.at(s.edge).index;
                if (!s.forward) u = g.inverse[u];
                h = g.mult[h][u];
            }
            fac.table[idx] = (h == 0) ? cplx(order, 0.0) : cplx(0.0, 0.0);
            for (int k = static_cast<int>(vals.size()) - 1; k >= 0; --k) {
                if (++vals[k] < order) break;
                vals[k] = 0;
            }
        }
        // faces fully fixed by the assignment reduce to scalars
        net.add_factor(std::move(fac));
    }
    return net.contract(opts.max_table_entries);
}

// ---------------------------------------------------------------------------
// Boundary attachment of states

struct Attachment {
    const SpinNetwork* state = nullptr;
    bool out_side = false;
    const TwoComplex::Boundary* boundary = nullptr;
    GraphIsomorphism iso;
};

std::string labeling_key(const SpinNetwork& sn, const GraphIsomorphism& iso) {
    std::map<int, std::pair<int, bool>> edge_labels;
    for (const auto& [l, e] : iso.link_map)
        edge_labels[e] = {sn.spins.at(l).id, iso.flipped.at(l)};
    std::map<int, int> vertex_labels;
    for (const auto& [n, v] : iso.node_map) vertex_labels[v] = sn.intertwiners.at(n);
    std::ostringstream os;
    for (const auto& [e, p] : edge_labels) os << e << ":" << p.first << (p.second ? "r" : "f") << ";";
    os << "|";
    for (const auto& [v, i] : vertex_labels) os << v << ":" << i << ";";
    return os.str();
}

// Canonical correspondence: nodes and links paired with boundary vertices
// and edges in ascending id order, kept only if incidence and orientations
// agree.  Cylinder boundaries built from a state graph match this way, so
// symmetric graphs (whose isomorphism set is ambiguous) still attach
// deterministically.
std::optional<GraphIsomorphism> canonical_match(const Graph& state, const Graph& boundary) {
    if (state.nodes.size() != boundary.nodes.size() ||
        state.links.size() != boundary.links.size())
        return {};
    std::vector<int> sn = state.nodes, bn = boundary.nodes;
    std::sort(sn.begin(), sn.end());
    std::sort(bn.begin(), bn.end());
    GraphIsomorphism iso;
    for (size_t i = 0; i < sn.size(); ++i) iso.node_map[sn[i]] = bn[i];
    std::vector<Graph::Link> sl = state.links, bl = boundary.links;
    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(sl.begin(), sl.end(), by_id);
    std::sort(bl.begin(), bl.end(), by_id);
    for (size_t i = 0; i < sl.size(); ++i) {
        if (iso.node_map.at(sl[i].src) != bl[i].src || iso.node_map.at(sl[i].dst) != bl[i].dst)
            return {};
        iso.link_map[sl[i].id] = bl[i].id;
        iso.flipped[sl[i].id] = false;
    }
    return iso;
}

// Picks the boundary each state attaches to and a label-transfer isomorphism.
// Returns false on a topological mismatch (amplitude exactly zero).
bool resolve_attachments(const SpinNetwork& psi_in, const SpinNetwork& psi_out,
                         const TwoComplex& c, const StateSumOptions& opts,
                         const std::optional<GraphIsomorphism>& match_in,
                         const std::optional<GraphIsomorphism>& match_out,
                         std::vector<Attachment>& out) {
    if (!(psi_in.group == psi_out.group)) throw Error("boundary states live over different groups");
    for (const auto* sn : {&psi_in, &psi_out}) {
        auto v = validate(*sn);
        if (!v.empty())
            throw Error("invalid boundary state: " + v.front().where + ": " + v.front().message);
    }

    const TwoComplex::Boundary* b_in = nullptr;
    const TwoComplex::Boundary* b_out = nullptr;
    if (c.boundaries.empty()) {
        if (!psi_in.graph.links.empty() || !psi_out.graph.links.empty() ||
            !psi_in.graph.nodes.empty() || !psi_out.graph.nodes.empty())
            throw Error("closed complex cannot carry nonempty boundary states");
        return true;  // empty states on a closed complex: amplitude = Z(c)
    } else if (c.boundaries.size() == 1) {
        b_in = b_out = &c.boundaries.front();
    } else if (c.boundaries.size() == 2) {
        for (const auto& b : c.boundaries) {
            if (b.name == "in") b_in = &b;
            if (b.name == "out") b_out = &b;
        }
        if (!b_in || !b_out) {
            b_in = &c.boundaries[0];
            b_out = &c.boundaries[1];
        }
    } else {
        throw Error("physical inner product needs a complex with at most two boundaries");
    }

    auto attach = [&](const SpinNetwork& sn, bool out_side, const TwoComplex::Boundary* b,
                      const std::optional<GraphIsomorphism>& user) -> bool {
        Attachment at;
        at.state = &sn;
        at.out_side = out_side;
        at.boundary = b;
        if (user) {
            at.iso = *user;
        } else if (auto canon = canonical_match(sn.graph, c.boundary_graph(*b))) {
            at.iso = *canon;
        } else {
            const Graph bg = c.boundary_graph(*b);
            auto isos = find_graph_isomorphisms(sn.graph, bg, opts.allow_orientation_reversal);
            if (isos.empty()) return false;
            std::set<std::string> keys;
            for (const auto& iso : isos) keys.insert(labeling_key(sn, iso));
            if (keys.size() > 1)
                throw Error("ambiguous boundary matching for '" + b->name +
                            "': isomorphisms induce different label transfers; "
                            "supply an explicit match");
            at.iso = isos.front();
        }
        out.push_back(std::move(at));
        return true;
    };

    if (!attach(psi_in, false, b_in, match_in)) return false;
    if (!attach(psi_out, true, b_out, match_out)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Finite-group physical inner product: direct Haar sum over boundary edges.

cplx finite_pip_value(const TwoComplex& c, const IrrepTable& table,
                      const std::vector<Attachment>& atts, const StateSumOptions& opts) {
    const auto& g = table.finite();
    const int order = g.order;

    std::set<int> bset;
    for (const auto& at : atts)
        for (int e : at.boundary->edges) bset.insert(e);
    std::vector<int> bedges(bset.begin(), bset.end());

    long long count = 1;
    for (size_t i = 0; i < bedges.size(); ++i) {
        count *= order;
        if (count > opts.max_assignments) throw BudgetError("boundary Haar sum exceeds budget");
    }

    cplx acc{0.0, 0.0};
    std::vector<int> vals(bedges.size(), 0);
    for (long long it = 0; it < count; ++it) {
        std::map<int, GroupElement> assignment;
        for (size_t k = 0; k < bedges.size(); ++k)
            assignment[bedges[k]] = finite_element(table.group(), vals[k]);

        cplx term = finite_partition_value(c, table, assignment, opts);
        if (term != cplx{0.0, 0.0}) {
            for (const auto& at : atts) {
                std::map<int, GroupElement> pulled;
                for (const auto& l : at.state->graph.links) {
                    GroupElement u = assignment.at(at.iso.link_map.at(l.id));
                    if (at.iso.flipped.at(l.id)) u = invert(u);
                    pulled[l.id] = u;
                }
                cplx v = evaluate_cylindrical(*at.state, pulled);
                term *= at.out_side ? std::conj(v) : v;
            }
            acc += term;
        }
        for (int k = static_cast<int>(vals.size()) - 1; k >= 0; --k) {
            if (++vals[k] < order) break;
            vals[k] = 0;
        }
    }
    for (size_t i = 0; i < bedges.size(); ++i) acc /= order;
    return acc;
}

// ---------------------------------------------------------------------------
// SU2 evaluation: character expansion with Haar projectors per edge.

struct Occurrence {
    IrrepLabel spin;
    bool conj = false;
    int row_wire = 0;
    int col_wire = 0;
};

cplx su2_state_sum(const TwoComplex& c, const IrrepTable& table,
                   const std::map<int, GroupElement>& assignment,
                   const std::vector<Attachment>& atts, const StateSumOptions& opts) {
    std::vector<TwoComplex::Face> faces = c.faces;
    std::sort(faces.begin(), faces.end(), [](auto& a, auto& b) { return a.id < b.id; });
    const int num_spins = table.num_irreps();
    const int nf = static_cast<int>(faces.size());

    long long assignments = 1;
    for (int i = 0; i < nf; ++i) {
        assignments *= num_spins;
        if (assignments > opts.max_assignments)
            throw BudgetError("SU2 face-spin sum exceeds the assignment budget");
    }

    // wire layout: face wires first (chain positions), then state wires
    std::vector<int> face_wire_offset(nf, 0);
    int next_wire = 0;
    for (int i = 0; i < nf; ++i) {
        face_wire_offset[i] = next_wire;
        next_wire += static_cast<int>(faces[i].boundary.size());
    }
    struct StateWires {
        std::map<int, int> target;  // link id -> wire
        std::map<int, int> source;
    };
    std::vector<StateWires> state_wires(atts.size());
    std::vector<std::vector<Graph::Link>> state_links(atts.size());
    for (size_t s = 0; s < atts.size(); ++s) {
        state_links[s] = atts[s].state->graph.links;
        std::sort(state_links[s].begin(), state_links[s].end(),
                  [](auto& a, auto& b) { return a.id < b.id; });
        for (const auto& l : state_links[s]) {
            state_wires[s].target[l.id] = next_wire++;
            state_wires[s].source[l.id] = next_wire++;
        }
    }

    // per-edge occurrences; face spins filled per assignment
    struct FaceOcc {
        int face_idx;
        int pos;
        bool forward;
    };
    struct StateOcc {
        int att_idx;
        int link_id;
        bool flipped;
    };
    std::map<int, std::vector<FaceOcc>> face_occs;
    std::map<int, std::vector<StateOcc>> state_occs;
    for (int i = 0; i < nf; ++i)
        for (size_t p = 0; p < faces[i].boundary.size(); ++p)
            face_occs[faces[i].boundary[p].edge].push_back(
                {i, static_cast<int>(p), faces[i].boundary[p].forward});
    for (size_t s = 0; s < atts.size(); ++s)
        for (const auto& l : state_links[s])
            state_occs[atts[s].iso.link_map.at(l.id)].push_back(
                {static_cast<int>(s), l.id, atts[s].iso.flipped.at(l.id)});

    std::set<int> active_edges;
    for (const auto& [e, v] : face_occs) active_edges.insert(e);
    for (const auto& [e, v] : state_occs) active_edges.insert(e);

    std::vector<int> spin_of_face(nf, 0);
    cplx total{0.0, 0.0};

    for (long long it = 0; it < assignments; ++it) {
        // occurrence lists for this assignment
        std::map<int, std::vector<Occurrence>> occs;
        bool admissible = true;
        for (int e : active_edges) {
            auto& list = occs[e];
            if (auto itf = face_occs.find(e); itf != face_occs.end())
                for (const auto& fo : itf->second) {
                    const int k = static_cast<int>(faces[fo.face_idx].boundary.size());
                    const int w0 = face_wire_offset[fo.face_idx] + fo.pos;
                    const int w1 = face_wire_offset[fo.face_idx] + (fo.pos + 1) % k;
                    const IrrepLabel j{spin_of_face[fo.face_idx]};
                    if (fo.forward)
                        list.push_back({j, false, w0, w1});
                    else
                        list.push_back({j, true, w1, w0});
                }
            if (auto its = state_occs.find(e); its != state_occs.end())
                for (const auto& so : its->second) {
                    const auto& at = atts[so.att_idx];
                    const IrrepLabel j = at.state->spins.at(so.link_id);
                    const int wt = state_wires[so.att_idx].target.at(so.link_id);
                    const int ws = state_wires[so.att_idx].source.at(so.link_id);
                    bool conj = at.out_side;
                    int row = wt, col = ws;
                    if (so.flipped) {
                        conj = !conj;
                        std::swap(row, col);
                    }
                    list.push_back({j, conj, row, col});
                }
            if (!assignment.count(e)) {
                std::vector<SlotSpec> sig;
                for (const auto& o : list) sig.push_back({o.spin, o.conj});
                if (invariant_dim(table, sig) == 0) {
                    admissible = false;
                    break;
                }
            }
        }

        if (admissible) {
            FactorNetwork net;
            std::vector<int> wire_dim(next_wire, 1);
            for (int i = 0; i < nf; ++i)
                for (size_t p = 0; p < faces[i].boundary.size(); ++p)
                    wire_dim[face_wire_offset[i] + p] = spin_of_face[i] + 1;
            for (size_t s = 0; s < atts.size(); ++s)
                for (const auto& l : state_links[s]) {
                    const int d = table.dim(atts[s].state->spins.at(l.id));
                    wire_dim[state_wires[s].target.at(l.id)] = d;
                    wire_dim[state_wires[s].source.at(l.id)] = d;
                }
            for (int w = 0; w < next_wire; ++w) net.add_variable(wire_dim[w]);

            for (int e : active_edges) {
                const auto& list = occs[e];
                if (auto ita = assignment.find(e); ita != assignment.end()) {
                    for (const auto& o : list) {
                        Matrix rho = table.irrep_matrix(o.spin, ita->second);
                        if (o.conj) rho = rho.conjugate();
                        const int d = static_cast<int>(rho.rows());
                        if (o.row_wire == o.col_wire) {
                            Factor f;
                            f.vars = {o.row_wire};
                            f.table.resize(d);
                            for (int m = 0; m < d; ++m) f.table[m] = rho(m, m);
                            net.add_factor(std::move(f));
                        } else {
                            std::vector<cplx> tbl(static_cast<size_t>(d) * d);
                            for (int r = 0; r < d; ++r)
                                for (int cc = 0; cc < d; ++cc) tbl[r * d + cc] = rho(r, cc);
                            net.add_factor(make_factor({o.row_wire, o.col_wire}, {d, d}, tbl));
                        }
                    }
                    continue;
                }
                std::vector<SlotSpec> sig;
                for (const auto& o : list) sig.push_back({o.spin, o.conj});
                const Matrix basis = invariant_basis(table, sig);
                const int rank = static_cast<int>(basis.cols());
                const int alpha = net.add_variable(rank);
                std::vector<int> row_vars, col_vars, dims;
                for (const auto& o : list) row_vars.push_back(o.row_wire);
                for (const auto& o : list) col_vars.push_back(o.col_wire);
                for (const auto& o : list) dims.push_back(table.dim(o.spin));

                std::vector<int> rv = row_vars, cv = col_vars, dd = dims;
                rv.push_back(alpha);
                cv.push_back(alpha);
                dd.push_back(rank);
                std::vector<cplx> row_tbl(basis.rows() * rank), col_tbl(basis.rows() * rank);
                for (long long r = 0; r < basis.rows(); ++r)
                    for (int a = 0; a < rank; ++a) {
                        row_tbl[r * rank + a] = basis(r, a);
                        col_tbl[r * rank + a] = std::conj(basis(r, a));
                    }
                net.add_factor(make_factor(rv, dd, row_tbl));
                net.add_factor(make_factor(cv, dd, col_tbl));
            }

            // state node intertwiners
            for (size_t s = 0; s < atts.size(); ++s) {
                const auto& sn = *atts[s].state;
                for (int n : sn.graph.nodes) {
                    const auto eps = node_endpoints(sn.graph, n);
                    const auto slots = node_signature(sn, n);
                    std::vector<int> vars, dims;
                    for (const auto& ep : eps) {
                        vars.push_back(ep.outgoing ? state_wires[s].source.at(ep.link)
                                                   : state_wires[s].target.at(ep.link));
                        dims.push_back(table.dim(sn.spins.at(ep.link)));
                    }
                    std::vector<cplx> tbl;
                    const bool pass = slots.size() == 2 && slots[0].conj != slots[1].conj &&
                                      slots[0].irrep == slots[1].irrep;
                    if (pass) {
                        const int d = dims[0];
                        tbl.assign(static_cast<size_t>(d) * d, cplx{0.0, 0.0});
                        for (int m = 0; m < d; ++m) tbl[m * d + m] = 1.0;
                    } else {
                        const Matrix basis = invariant_basis(table, slots);
                        const int idx = sn.intertwiners.at(n);
                        if (idx >= basis.cols()) throw Error("intertwiner index out of range");
                        tbl.resize(basis.rows());
                        for (long long r = 0; r < basis.rows(); ++r) tbl[r] = basis(r, idx);
                    }
                    if (atts[s].out_side)
                        for (auto& v : tbl) v = std::conj(v);
                    net.add_factor(make_factor(vars, dims, tbl));
                }
            }

            cplx weight{1.0, 0.0};
            for (int i = 0; i < nf; ++i) weight *= double(spin_of_face[i] + 1);
            total += weight * net.contract(opts.max_table_entries);
        }

        for (int k = nf - 1; k >= 0; --k) {
            if (++spin_of_face[k] < num_spins) break;
            spin_of_face[k] = 0;
        }
    }
    return total;
}

} // namespace

// ---------------------------------------------------------------------------

Amplitude partition_function(const TwoComplex& c, const GroupSpec& group,
                             const std::map<int, GroupElement>& boundary_assignment,
                             const StateSumOptions& opts) {
    auto problems = check_complex(c);
    if (!problems.empty()) throw Error("invalid complex: " + problems.front());
    if (!boundary_assignment.empty()) {
        std::set<int> be;
        for (const auto& b : c.boundaries) be.insert(b.edges.begin(), b.edges.end());
        for (const auto& [e, u] : boundary_assignment) {
            if (!be.count(e))
                throw Error("assignment covers edge " + std::to_string(e) +
                            " which is not a boundary edge");
        }
        if (be.size() != boundary_assignment.size())
            throw Error("boundary assignment must cover exactly the boundary edges");
    }

    if (group.is_finite()) {
        IrrepTable table(group);
        return {finite_partition_value(c, table, boundary_assignment, opts), group,
                {ExactnessKind::Exact, 0}};
    }
    if (group.two_jmax < 1) throw Error("SU2 state sums need a cutoff J_max >= 1/2");
    IrrepTable table(group);
    const cplx v = su2_state_sum(c, table, boundary_assignment, {}, opts);
    return {v, group, {ExactnessKind::CutoffApprox, group.two_jmax}};
}

cplx face_amplitude_kernel(const IrrepTable& table, const std::vector<GroupElement>& face_edges,
                           const GroupElement& u_f) {
    GroupElement h = identity(table.group());
    for (const auto& u : face_edges) h = compose(h, u);
    cplx sum{0.0, 0.0};
    for (const auto& r : table.irreps()) {
        cplx term = double(table.dim(r)) * table.character(r, h);
        for (size_t i = 0; i < face_edges.size(); ++i) term *= table.character(r, u_f);
        sum += term;
    }
    return sum;
}

bool boundary_matches(const SpinNetwork& state, const TwoComplex& c, bool out_side,
                      const StateSumOptions& opts) {
    if (c.boundaries.empty()) return state.graph.links.empty() && state.graph.nodes.empty();
    const TwoComplex::Boundary* b = nullptr;
    if (c.boundaries.size() == 1) {
        b = &c.boundaries.front();
    } else {
        for (const auto& bb : c.boundaries)
            if (bb.name == (out_side ? "out" : "in")) b = &bb;
        if (!b) b = &c.boundaries[out_side ? 1 : 0];
    }
    return !find_graph_isomorphisms(state.graph, c.boundary_graph(*b),
                                    opts.allow_orientation_reversal)
                .empty();
}

Amplitude physical_inner_product(const SpinNetwork& psi_in, const SpinNetwork& psi_out,
                                 const TwoComplex& c, const StateSumOptions& opts,
                                 const std::optional<GraphIsomorphism>& match_in,
                                 const std::optional<GraphIsomorphism>& match_out) {
    auto problems = check_complex(c);
    if (!problems.empty()) throw Error("invalid complex: " + problems.front());
    const GroupSpec group = psi_in.group;

    std::vector<Attachment> atts;
    const Exactness ex = group.is_finite() ? Exactness{ExactnessKind::Exact, 0}
                                           : Exactness{ExactnessKind::CutoffApprox, group.two_jmax};
    if (!resolve_attachments(psi_in, psi_out, c, opts, match_in, match_out, atts))
        return {cplx{0.0, 0.0}, group, ex};  // topological mismatch channel

    IrrepTable table(group);
    if (group.is_finite()) return {finite_pip_value(c, table, atts, opts), group, ex};
    return {su2_state_sum(c, table, {}, atts, opts), group, ex};
}

IdempotenceReport projector_idempotence_check(
    const TwoComplex& c, const GluingRule& rule,
    const std::vector<std::pair<SpinNetwork, SpinNetwork>>& state_pairs,
    const StateSumOptions& opts) {
    IdempotenceReport report;
    if (rule.edge_map.empty() && rule.vertex_map.empty()) {
        // identity composition: both sides are the plain state sum
        GroupSpec group = state_pairs.empty() ? GroupSpec::s3() : state_pairs.front().first.group;
        const Amplitude z = partition_function(c, group, {}, opts);
        report.rows.push_back({z.value, z.value});
        report.max_abs_deviation = 0.0;
        return report;
    }
    const TwoComplex twice = compose_complexes(c, c, rule);
    for (const auto& [in, out] : state_pairs) {
        const cplx a1 = physical_inner_product(in, out, c, opts).value;
        const cplx a2 = physical_inner_product(in, out, twice, opts).value;
        report.rows.push_back({a1, a2});
        report.max_abs_deviation = std::max(report.max_abs_deviation, std::abs(a1 - a2));
    }
    return report;
}

} // namespace tqnn
