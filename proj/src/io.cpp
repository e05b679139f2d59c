#include "tqnn/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace tqnn {

namespace {

void require_keys(const json& obj, const std::string& path, const std::set<std::string>& required,
                  const std::set<std::string>& optional = {}) {
    if (!obj.is_object()) throw SchemaError(path + ": expected an object");
    for (const auto& k : required)
        if (!obj.contains(k)) throw SchemaError(path + ": missing key '" + k + "'");
    for (const auto& [k, v] : obj.items())
        if (!required.count(k) && !optional.count(k))
            throw SchemaError(path + "." + k + ": unknown key");
}

int to_int(const json& v, const std::string& path) {
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw SchemaError(path + ": expected an integer");
    return v.get<int>();
}

double to_double(const json& v, const std::string& path) {
    if (!v.is_number()) throw SchemaError(path + ": expected a number");
    return v.get<double>();
}

int spin_to_two_j(double j, const std::string& path) {
    const double tj = 2.0 * j;
    const int r = static_cast<int>(std::lround(tj));
    if (std::abs(tj - r) > 1e-9 || r < 0)
        throw SchemaError(path + ": spin must be a nonnegative half-integer");
    return r;
}

} // namespace

GroupSpec group_from_json(const json& obj, const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path + ": expected an object");
    if (!obj.contains("group")) throw SchemaError(path + ": missing key 'group'");
    if (!obj.at("group").is_string()) throw SchemaError(path + ".group: expected a string");
    GroupSpec g;
    try {
        g = GroupSpec::parse(obj.at("group").get<std::string>());
    } catch (const Error& e) {
        throw SchemaError(path + ".group: " + e.what());
    }
    if (g.kind == GroupKind::SU2) {
        if (!obj.contains("j_max")) throw SchemaError(path + ": SU2 needs 'j_max'");
        g.two_jmax = spin_to_two_j(to_double(obj.at("j_max"), path + ".j_max"), path + ".j_max");
        if (g.two_jmax < 1) throw SchemaError(path + ".j_max: needs J_max >= 1/2");
    } else if (obj.contains("j_max")) {
        throw SchemaError(path + ".j_max: only SU2 takes a cutoff");
    }
    return g;
}

json group_to_json(const GroupSpec& g) {
    json obj;
    if (g.kind == GroupKind::SU2) {
        obj["group"] = "SU2";
        obj["j_max"] = g.two_jmax / 2.0;
    } else {
        obj["group"] = g.name();
    }
    return obj;
}

namespace {

Graph graph_from_json(const json& obj, const std::string& path) {
    Graph g;
    if (!obj.contains("nodes") || !obj.at("nodes").is_array())
        throw SchemaError(path + ".nodes: expected an array");
    for (size_t i = 0; i < obj.at("nodes").size(); ++i)
        g.nodes.push_back(to_int(obj.at("nodes")[i], path + ".nodes[" + std::to_string(i) + "]"));
    if (!obj.contains("links") || !obj.at("links").is_array())
        throw SchemaError(path + ".links: expected an array");
    for (size_t i = 0; i < obj.at("links").size(); ++i) {
        const std::string lp = path + ".links[" + std::to_string(i) + "]";
        const auto& l = obj.at("links")[i];
        require_keys(l, lp, {"id", "src", "dst"});
        g.links.push_back({to_int(l.at("id"), lp + ".id"), to_int(l.at("src"), lp + ".src"),
                           to_int(l.at("dst"), lp + ".dst")});
    }
    return g;
}

json graph_to_json(const Graph& g) {
    json obj;
    obj["nodes"] = g.nodes;
    obj["links"] = json::array();
    for (const auto& l : g.links)
        obj["links"].push_back({{"id", l.id}, {"src", l.src}, {"dst", l.dst}});
    return obj;
}

std::map<int, IrrepLabel> spins_from_json(const json& obj, const GroupSpec& g,
                                          const std::string& path) {
    if (!obj.is_object()) throw SchemaError(path + ": expected an object");
    std::map<int, IrrepLabel> spins;
    for (const auto& [key, v] : obj.items()) {
        int link;
        try {
            link = std::stoi(key);
        } catch (...) {
            throw SchemaError(path + "." + key + ": link key must be an integer");
        }
        if (g.kind == GroupKind::SU2)
            spins[link] = IrrepLabel{spin_to_two_j(to_double(v, path + "." + key), path + "." + key)};
        else
            spins[link] = IrrepLabel{to_int(v, path + "." + key)};
    }
    return spins;
}

json spins_to_json(const std::map<int, IrrepLabel>& spins, const GroupSpec& g) {
    json obj = json::object();
    for (const auto& [l, r] : spins) {
        if (g.kind == GroupKind::SU2)
            obj[std::to_string(l)] = r.id / 2.0;
        else
            obj[std::to_string(l)] = r.id;
    }
    return obj;
}

} // namespace

SpinNetwork spin_network_from_json(const json& obj, const std::string& path) {
    require_keys(obj, path, {"group", "nodes", "links", "spins"},
                 {"j_max", "intertwiners"});
    SpinNetwork sn;
    sn.group = group_from_json(obj, path);
    sn.graph = graph_from_json(obj, path);
    sn.spins = spins_from_json(obj.at("spins"), sn.group, path + ".spins");
    if (obj.contains("intertwiners")) {
        for (const auto& [key, v] : obj.at("intertwiners").items()) {
            int node;
            try {
                node = std::stoi(key);
            } catch (...) {
                throw SchemaError(path + ".intertwiners." + key + ": node key must be an integer");
            }
            sn.intertwiners[node] = to_int(v, path + ".intertwiners." + key);
        }
    }
    for (int n : sn.graph.nodes)
        if (!sn.intertwiners.count(n)) sn.intertwiners[n] = 0;
    return sn;
}

json spin_network_to_json(const SpinNetwork& sn) {
    json obj = group_to_json(sn.group);
    obj.update(graph_to_json(sn.graph));
    obj["spins"] = spins_to_json(sn.spins, sn.group);
    obj["intertwiners"] = json::object();
    for (const auto& [n, i] : sn.intertwiners) obj["intertwiners"][std::to_string(n)] = i;
    return obj;
}

TwoComplex complex_from_json(const json& obj, const std::string& path) {
    require_keys(obj, path, {"vertices", "edges", "faces"}, {"boundaries"});
    TwoComplex c;
    for (size_t i = 0; i < obj.at("vertices").size(); ++i)
        c.vertices.push_back(
            to_int(obj.at("vertices")[i], path + ".vertices[" + std::to_string(i) + "]"));
    for (size_t i = 0; i < obj.at("edges").size(); ++i) {
        const std::string ep = path + ".edges[" + std::to_string(i) + "]";
        const auto& e = obj.at("edges")[i];
        require_keys(e, ep, {"id", "src", "dst"});
        c.edges.push_back({to_int(e.at("id"), ep + ".id"), to_int(e.at("src"), ep + ".src"),
                           to_int(e.at("dst"), ep + ".dst")});
    }
    for (size_t i = 0; i < obj.at("faces").size(); ++i) {
        const std::string fp = path + ".faces[" + std::to_string(i) + "]";
        const auto& f = obj.at("faces")[i];
        require_keys(f, fp, {"id", "boundary"});
        TwoComplex::Face face;
        face.id = to_int(f.at("id"), fp + ".id");
        for (size_t k = 0; k < f.at("boundary").size(); ++k) {
            const std::string sp = fp + ".boundary[" + std::to_string(k) + "]";
            const auto& s = f.at("boundary")[k];
            require_keys(s, sp, {"edge", "dir"});
            const int dir = to_int(s.at("dir"), sp + ".dir");
            if (dir != 1 && dir != -1) throw SchemaError(sp + ".dir: expected 1 or -1");
            face.boundary.push_back({to_int(s.at("edge"), sp + ".edge"), dir == 1});
        }
        c.faces.push_back(std::move(face));
    }
    if (obj.contains("boundaries")) {
        for (size_t i = 0; i < obj.at("boundaries").size(); ++i) {
            const std::string bp = path + ".boundaries[" + std::to_string(i) + "]";
            const auto& b = obj.at("boundaries")[i];
            require_keys(b, bp, {"name", "vertices", "edges"});
            TwoComplex::Boundary nb;
            if (!b.at("name").is_string()) throw SchemaError(bp + ".name: expected a string");
            nb.name = b.at("name").get<std::string>();
            for (size_t k = 0; k < b.at("vertices").size(); ++k)
                nb.vertices.push_back(
                    to_int(b.at("vertices")[k], bp + ".vertices[" + std::to_string(k) + "]"));
            for (size_t k = 0; k < b.at("edges").size(); ++k)
                nb.edges.push_back(to_int(b.at("edges")[k], bp + ".edges[" + std::to_string(k) + "]"));
            c.boundaries.push_back(std::move(nb));
        }
    }
    const auto problems = check_complex(c);
    if (!problems.empty()) throw SchemaError(path + ": " + problems.front());
    return c;
}

json complex_to_json(const TwoComplex& c) {
    json obj;
    obj["vertices"] = c.vertices;
    obj["edges"] = json::array();
    for (const auto& e : c.edges)
        obj["edges"].push_back({{"id", e.id}, {"src", e.src}, {"dst", e.dst}});
    obj["faces"] = json::array();
    for (const auto& f : c.faces) {
        json face;
        face["id"] = f.id;
        face["boundary"] = json::array();
        for (const auto& s : f.boundary)
            face["boundary"].push_back({{"edge", s.edge}, {"dir", s.forward ? 1 : -1}});
        obj["faces"].push_back(std::move(face));
    }
    obj["boundaries"] = json::array();
    for (const auto& b : c.boundaries)
        obj["boundaries"].push_back({{"name", b.name}, {"vertices", b.vertices}, {"edges", b.edges}});
    return obj;
}

LabeledDataset dataset_from_json(const json& obj, const std::string& path) {
    require_keys(obj, path, {"group", "classes", "items", "train", "test"}, {"j_max", "seed"});
    LabeledDataset ds;
    ds.group = group_from_json(obj, path);
    for (const auto& [cls, v] : obj.at("classes").items()) {
        SpinNetwork sn = spin_network_from_json(v, path + ".classes." + cls);
        if (!(sn.group == ds.group))
            throw SchemaError(path + ".classes." + cls + ": group differs from the dataset group");
        ds.classes[cls] = std::move(sn);
    }
    for (size_t i = 0; i < obj.at("items").size(); ++i) {
        const std::string ip = path + ".items[" + std::to_string(i) + "]";
        const auto& it = obj.at("items")[i];
        require_keys(it, ip, {"input", "label"});
        if (!it.at("label").is_string()) throw SchemaError(ip + ".label: expected a string");
        DatasetItem item;
        item.label = it.at("label").get<std::string>();
        const auto& in = it.at("input");
        if (in.contains("means")) {
            require_keys(in, ip + ".input", {"nodes", "links", "means"}, {"spreads"});
            CoherentInput ci;
            ci.graph = graph_from_json(in, ip + ".input");
            for (const auto& [k, v] : in.at("means").items())
                ci.weights.means[std::stoi(k)] = to_double(v, ip + ".input.means." + k);
            if (in.contains("spreads"))
                for (const auto& [k, v] : in.at("spreads").items())
                    ci.weights.spreads[std::stoi(k)] = to_double(v, ip + ".input.spreads." + k);
            item.input = std::move(ci);
        } else {
            json full = in;
            if (!full.contains("group")) full.update(group_to_json(ds.group));
            item.input = spin_network_from_json(full, ip + ".input");
        }
        ds.items.push_back(std::move(item));
    }
    for (const auto& v : obj.at("train")) ds.train_idx.push_back(to_int(v, path + ".train"));
    for (const auto& v : obj.at("test")) ds.test_idx.push_back(to_int(v, path + ".test"));
    if (obj.contains("seed")) ds.seed = obj.at("seed").get<std::uint64_t>();
    try {
        validate_dataset(ds);
    } catch (const Error& e) {
        throw SchemaError(path + ": " + e.what());
    }
    return ds;
}

json dataset_to_json(const LabeledDataset& ds) {
    json obj = group_to_json(ds.group);
    obj["classes"] = json::object();
    for (const auto& [cls, sn] : ds.classes) obj["classes"][cls] = spin_network_to_json(sn);
    obj["items"] = json::array();
    for (const auto& item : ds.items) {
        json it;
        it["label"] = item.label;
        if (std::holds_alternative<SpinNetwork>(item.input)) {
            it["input"] = spin_network_to_json(std::get<SpinNetwork>(item.input));
        } else {
            const auto& ci = std::get<CoherentInput>(item.input);
            json in = graph_to_json(ci.graph);
            in["means"] = json::object();
            for (const auto& [l, m] : ci.weights.means) in["means"][std::to_string(l)] = m;
            in["spreads"] = json::object();
            for (const auto& [l, s] : ci.weights.spreads) in["spreads"][std::to_string(l)] = s;
            it["input"] = std::move(in);
        }
        obj["items"].push_back(std::move(it));
    }
    obj["train"] = ds.train_idx;
    obj["test"] = ds.test_idx;
    obj["seed"] = ds.seed;
    return obj;
}

json amplitude_to_json(const Amplitude& a) {
    json obj = group_to_json(a.group);
    obj["re"] = a.value.real();
    obj["im"] = a.value.imag();
    switch (a.exactness.kind) {
        case ExactnessKind::Exact: obj["exactness"] = "exact"; break;
        case ExactnessKind::CutoffApprox:
            obj["exactness"] = "cutoff";
            obj["two_jmax"] = a.exactness.parameter;
            break;
        case ExactnessKind::Quadrature:
            obj["exactness"] = "quadrature";
            obj["nodes"] = a.exactness.parameter;
            break;
    }
    return obj;
}

json load_json_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw Error("cannot open file: " + filename);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw SchemaError(filename + ": invalid JSON: " + e.what());
    }
    return j;
}

void write_json_file(const std::string& filename, const json& value) {
    std::ofstream out(filename);
    if (!out) throw Error("cannot write file: " + filename);
    out << value.dump(2) << "\n";
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // trim to the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        if (std::strtod(shorter, nullptr) == v) return shorter;
    }
    return buf;
}

void write_csv_file(const std::string& filename, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(filename);
    if (!out) throw Error("cannot write file: " + filename);
    for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

} // namespace tqnn
