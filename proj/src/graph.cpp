#include "tqnn/graph.hpp"
#include "tqnn/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace tqnn {

const Graph::Link& Graph::link(int id) const {
    for (const auto& l : links)
        if (l.id == id) return l;
    throw Error("unknown link id " + std::to_string(id));
}

bool Graph::has_node(int id) const {
    return std::find(nodes.begin(), nodes.end(), id) != nodes.end();
}

int Graph::valence(int node) const {
    int v = 0;
    for (const auto& l : links) {
        if (l.dst == node) ++v;
        if (l.src == node) ++v;
    }
    return v;
}

std::vector<Endpoint> node_endpoints(const Graph& g, int node) {
    std::vector<Endpoint> eps;
    for (const auto& l : g.links) {
        if (l.dst == node) eps.push_back({l.id, false});
        if (l.src == node) eps.push_back({l.id, true});
    }
    std::sort(eps.begin(), eps.end());
    return eps;
}

double default_spread(double mean) { return std::pow(std::max(mean, 0.5), 0.25); }

std::vector<SlotSpec> node_signature(const SpinNetwork& sn, int node) {
    std::vector<SlotSpec> slots;
    for (const auto& ep : node_endpoints(sn.graph, node)) {
        auto it = sn.spins.find(ep.link);
        if (it == sn.spins.end()) throw Error("link " + std::to_string(ep.link) + " is unlabeled");
        slots.push_back({it->second, ep.outgoing});
    }
    return slots;
}

int intertwiner_dim(const SpinNetwork& sn, int node) {
    IrrepTable table(sn.group);
    return invariant_dim(table, node_signature(sn, node));
}

namespace {

// Identity-pairing shortcut for 2-valent pass-through nodes.
bool is_passthrough(const std::vector<SlotSpec>& slots) {
    return slots.size() == 2 && slots[0].conj != slots[1].conj &&
           slots[0].irrep == slots[1].irrep;
}

} // namespace

std::vector<Violation> validate(const SpinNetwork& sn) {
    std::vector<Violation> out;
    const Graph& g = sn.graph;

    std::set<int> node_ids(g.nodes.begin(), g.nodes.end());
    if (node_ids.size() != g.nodes.size())
        out.push_back({"graph", "duplicate node ids"});
    std::set<int> link_ids;
    for (const auto& l : g.links) {
        if (!link_ids.insert(l.id).second)
            out.push_back({"link " + std::to_string(l.id), "duplicate link id"});
        if (!node_ids.count(l.src) || !node_ids.count(l.dst))
            out.push_back({"link " + std::to_string(l.id), "endpoint references missing node"});
    }
    if (!out.empty()) return out;  // label checks need a sound graph

    IrrepTable table(sn.group);
    bool labels_ok = true;
    for (const auto& l : g.links) {
        auto it = sn.spins.find(l.id);
        if (it == sn.spins.end()) {
            out.push_back({"link " + std::to_string(l.id), "missing spin label"});
            labels_ok = false;
        } else if (it->second.id < 0 || it->second.id >= table.num_irreps()) {
            out.push_back({"link " + std::to_string(l.id),
                           "spin label outside the irrep table of " + sn.group.name()});
            labels_ok = false;
        }
    }
    for (const auto& [id, r] : sn.spins)
        if (!link_ids.count(id))
            out.push_back({"link " + std::to_string(id), "spin label for unknown link"});
    for (int n : g.nodes)
        if (!sn.intertwiners.count(n))
            out.push_back({"node " + std::to_string(n), "missing intertwiner label"});
    if (!labels_ok) return out;

    for (int n : g.nodes) {
        const auto slots = node_signature(sn, n);
        // Trivalent SU2 nodes: report the admissibility condition by name.
        if (sn.group.kind == GroupKind::SU2 && slots.size() == 3) {
            const int a = slots[0].irrep.id, b = slots[1].irrep.id, c = slots[2].irrep.id;
            if ((a + b + c) % 2 != 0)
                out.push_back({"node " + std::to_string(n),
                               "parity violation: spins do not sum to an integer"});
            else if (c < std::abs(a - b) || c > a + b)
                out.push_back({"node " + std::to_string(n),
                               "triangle violation: |a-b| <= c <= a+b fails"});
        }
        const int dim = is_passthrough(slots) ? 1 : invariant_dim(table, slots);
        auto it = sn.intertwiners.find(n);
        if (it == sn.intertwiners.end()) continue;
        if (it->second < 0 || it->second >= std::max(dim, 0)) {
            std::ostringstream os;
            os << "intertwiner index " << it->second << " outside invariant subspace of dimension "
               << dim;
            out.push_back({"node " + std::to_string(n), os.str()});
        }
    }
    return out;
}

long long dim_hilbert(const SpinNetwork& sn) {
    // The literal per-endpoint product needs in-range labels only; gauge
    // admissibility at the nodes is deliberately not required here.
    IrrepTable table(sn.group);
    for (const auto& l : sn.graph.links) {
        auto it = sn.spins.find(l.id);
        if (it == sn.spins.end()) throw Error("link " + std::to_string(l.id) + " is unlabeled");
        table.require_irrep(it->second);
    }
    long long prod = 1;
    for (int n : sn.graph.nodes)
        for (const auto& ep : node_endpoints(sn.graph, n)) {
            prod *= table.dim(sn.spins.at(ep.link));
            if (prod > (1LL << 62) / 4) throw BudgetError("dim_hilbert overflow");
        }
    return prod;
}

long long dim_hilbert(const Graph& g, const IrrepTable& table) {
    long long per_link = 0;
    for (const auto& r : table.irreps())
        per_link += static_cast<long long>(table.dim(r)) * table.dim(r);
    long long total = 1;
    for (size_t i = 0; i < g.links.size(); ++i) {
        if (total > (1LL << 62) / std::max(per_link, 1LL)) throw BudgetError("dim_hilbert overflow");
        total *= per_link;
    }
    return total;
}

int total_valence(const Graph& g) { return 2 * static_cast<int>(g.links.size()); }

double erm(const std::map<int, double>& spins, const std::map<int, double>& means) {
    if (spins.empty()) throw Error("erm needs at least one link");
    if (spins.size() != means.size()) throw Error("erm: key sets differ");
    double sum = 0.0;
    for (const auto& [id, j] : spins) {
        auto it = means.find(id);
        if (it == means.end()) throw Error("erm: key sets differ");
        sum += (j - it->second) * (j - it->second);
    }
    return sum / (2.0 * static_cast<double>(spins.size()));
}

int nearest_admissible_two_j(double mean, int two_jmax) {
    const double two_mean = std::clamp(2.0 * mean, 0.0, double(two_jmax));
    int lo = static_cast<int>(std::floor(two_mean));
    int hi = std::min(lo + 1, two_jmax);
    // ties broken downward
    return (two_mean - lo <= hi - two_mean) ? lo : hi;
}

double coherent_amplitude(const CoherentWeights& w, const std::map<int, IrrepLabel>& spins,
                          const IrrepTable& table) {
    if (table.group().kind != GroupKind::SU2)
        throw Error("coherent weights are defined over SU2 tables");
    double prod = 1.0;
    for (const auto& [id, mean] : w.means) {
        auto it = spins.find(id);
        if (it == spins.end()) throw Error("coherent_amplitude: key sets differ");
        auto sp = w.spreads.find(id);
        const double sigma = sp != w.spreads.end() ? sp->second : default_spread(mean);
        if (sigma <= 0.0) throw Error("coherent spread must be positive");
        const double j = it->second.id / 2.0;
        const double jstar = nearest_admissible_two_j(mean, table.group().two_jmax) / 2.0;
        const double log_peak = -(jstar - mean) * (jstar - mean) / (2.0 * sigma * sigma);
        prod *= std::exp(-(j - mean) * (j - mean) / (2.0 * sigma * sigma) - log_peak);
    }
    if (w.means.size() != spins.size()) throw Error("coherent_amplitude: key sets differ");
    return prod;
}

namespace {

struct IsoSearch {
    const Graph& a;
    const Graph& b;
    bool allow_reversal;
    std::vector<int> a_nodes, b_nodes;
    std::map<int, int> node_map;
    std::set<int> used_b_nodes;
    std::vector<GraphIsomorphism> found;

    void match_links(const GraphIsomorphism& iso) {
        std::vector<Graph::Link> al = a.links, bl = b.links;
        std::sort(al.begin(), al.end(), [](auto& x, auto& y) { return x.id < y.id; });
        std::sort(bl.begin(), bl.end(), [](auto& x, auto& y) { return x.id < y.id; });
        // candidates per a-link: (index into bl, flipped)
        std::vector<std::vector<std::pair<int, bool>>> cands(al.size());
        for (size_t i = 0; i < al.size(); ++i) {
            const int ms = iso.node_map.at(al[i].src), md = iso.node_map.at(al[i].dst);
            for (size_t j = 0; j < bl.size(); ++j) {
                if (bl[j].src == ms && bl[j].dst == md) cands[i].push_back({static_cast<int>(j), false});
                if (allow_reversal && bl[j].src == md && bl[j].dst == ms && ms != md)
                    cands[i].push_back({static_cast<int>(j), true});
            }
        }
        std::vector<bool> used(bl.size(), false);
        std::vector<std::pair<int, bool>> choice(al.size());
        auto rec = [&](auto&& self, size_t i) -> void {
            if (i == al.size()) {
                GraphIsomorphism full = iso;
                for (size_t k = 0; k < al.size(); ++k) {
                    full.link_map[al[k].id] = bl[choice[k].first].id;
                    full.flipped[al[k].id] = choice[k].second;
                }
                found.push_back(std::move(full));
                return;
            }
            for (const auto& cnd : cands[i]) {
                if (used[cnd.first]) continue;
                used[cnd.first] = true;
                choice[i] = cnd;
                self(self, i + 1);
                used[cnd.first] = false;
            }
        };
        rec(rec, 0);
    }

    void assign(size_t i) {
        if (i == a_nodes.size()) {
            GraphIsomorphism iso;
            iso.node_map = node_map;
            match_links(iso);
            return;
        }
        const int an = a_nodes[i];
        for (int bn : b_nodes) {
            if (used_b_nodes.count(bn)) continue;
            if (a.valence(an) != b.valence(bn)) continue;
            node_map[an] = bn;
            used_b_nodes.insert(bn);
            assign(i + 1);
            used_b_nodes.erase(bn);
            node_map.erase(an);
        }
    }
};

} // namespace

std::vector<GraphIsomorphism> find_graph_isomorphisms(const Graph& a, const Graph& b,
                                                      bool allow_reversal) {
    if (a.nodes.size() != b.nodes.size() || a.links.size() != b.links.size()) return {};
    IsoSearch s{a, b, allow_reversal, a.nodes, b.nodes, {}, {}, {}};
    std::sort(s.a_nodes.begin(), s.a_nodes.end());
    std::sort(s.b_nodes.begin(), s.b_nodes.end());
    s.assign(0);
    return s.found;
}

cplx evaluate_cylindrical(const SpinNetwork& sn,
                          const std::map<int, GroupElement>& holonomies) {
    auto violations = validate(sn);
    if (!violations.empty())
        throw Error("inadmissible network: " + violations.front().where + ": " +
                    violations.front().message);
    IrrepTable table(sn.group);

    FactorNetwork net;
    // wire ids: 2*pos + side (0 = target endpoint, 1 = source endpoint), with
    // links in ascending id order
    std::vector<Graph::Link> links = sn.graph.links;
    std::sort(links.begin(), links.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::map<int, int> link_pos;
    for (size_t i = 0; i < links.size(); ++i) link_pos[links[i].id] = static_cast<int>(i);

    for (const auto& l : links) {
        const int d = table.dim(sn.spins.at(l.id));
        net.add_variable(d);  // 2*pos   : target side
        net.add_variable(d);  // 2*pos+1 : source side
    }
    for (const auto& l : links) {
        auto it = holonomies.find(l.id);
        if (it == holonomies.end()) throw Error("missing holonomy for link " + std::to_string(l.id));
        table.require_member(it->second);
        const Matrix rho = table.irrep_matrix(sn.spins.at(l.id), it->second);
        Factor f;
        const int p = link_pos.at(l.id);
        f.vars = {2 * p, 2 * p + 1};
        f.table.resize(static_cast<size_t>(rho.rows()) * rho.cols());
        for (int t = 0; t < rho.rows(); ++t)
            for (int s = 0; s < rho.cols(); ++s) f.table[t * rho.cols() + s] = rho(t, s);
        net.add_factor(std::move(f));
    }
    for (int n : sn.graph.nodes) {
        const auto eps = node_endpoints(sn.graph, n);
        const auto slots = node_signature(sn, n);
        const int idx = sn.intertwiners.at(n);
        Factor f;
        for (const auto& ep : eps)
            f.vars.push_back(2 * link_pos.at(ep.link) + (ep.outgoing ? 1 : 0));
        if (is_passthrough(slots)) {
            const int d = table.dim(slots[0].irrep);
            f.table.assign(static_cast<size_t>(d) * d, cplx{0.0, 0.0});
            for (int m = 0; m < d; ++m) f.table[m * d + m] = 1.0;
        } else {
            const Matrix basis = invariant_basis(table, slots);
            if (idx >= basis.cols()) throw Error("intertwiner index out of range");
            f.table.assign(basis.rows(), cplx{0.0, 0.0});
            for (long long r = 0; r < basis.rows(); ++r) f.table[r] = basis(r, idx);
        }
        net.add_factor(std::move(f));
    }
    return net.contract();
}

} // namespace tqnn
