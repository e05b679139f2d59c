#include "tqnn/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace tqnn {

namespace {

std::string graph_signature(const Graph& g) {
    std::ostringstream os;
    std::vector<int> nodes = g.nodes;
    std::sort(nodes.begin(), nodes.end());
    for (int n : nodes) os << "n" << n;
    std::vector<Graph::Link> links = g.links;
    std::sort(links.begin(), links.end(), [](auto& a, auto& b) { return a.id < b.id; });
    for (const auto& l : links) os << "l" << l.id << ":" << l.src << ">" << l.dst;
    return os.str();
}

std::string labels_signature(const SpinNetwork& sn) {
    std::ostringstream os;
    for (const auto& [l, j] : sn.spins) os << l << "=" << j.id << ";";
    os << "|";
    for (const auto& [n, i] : sn.intertwiners) os << n << "=" << i << ";";
    return os.str();
}

/// One term of a coherent smearing sum.
struct SmearTerm {
    SpinNetwork state;
    double weight = 1.0;
};

std::vector<SmearTerm> smear_terms(const GroupSpec& group, const Graph& graph,
                                   const CoherentWeights& w, double window_sigmas) {
    IrrepTable table(group);
    const int two_jmax = group.two_jmax;
    std::vector<int> link_ids;
    for (const auto& l : graph.links) link_ids.push_back(l.id);
    std::sort(link_ids.begin(), link_ids.end());

    std::vector<std::vector<int>> windows;  // two_j candidates per link
    for (int id : link_ids) {
        const double mean = w.means.at(id);
        auto sp = w.spreads.find(id);
        const double sigma = sp != w.spreads.end() ? sp->second : default_spread(mean);
        const int lo = std::max(0, static_cast<int>(std::ceil(2.0 * (mean - window_sigmas * sigma))));
        const int hi =
            std::min(two_jmax, static_cast<int>(std::floor(2.0 * (mean + window_sigmas * sigma))));
        std::vector<int> win;
        for (int tj = lo; tj <= hi; ++tj) win.push_back(tj);
        if (win.empty()) win.push_back(nearest_admissible_two_j(mean, two_jmax));
        windows.push_back(std::move(win));
    }

    std::vector<SmearTerm> terms;
    std::vector<size_t> idx(link_ids.size(), 0);
    while (true) {
        SpinNetwork sn;
        sn.group = group;
        sn.graph = graph;
        for (size_t k = 0; k < link_ids.size(); ++k)
            sn.spins[link_ids[k]] = IrrepLabel{windows[k][idx[k]]};
        for (int n : graph.nodes) sn.intertwiners[n] = 0;

        bool admissible = true;
        for (int n : graph.nodes) {
            const auto slots = node_signature(sn, n);
            const bool pass = slots.size() == 2 && slots[0].conj != slots[1].conj &&
                              slots[0].irrep == slots[1].irrep;
            if (!pass && invariant_dim(table, slots) == 0) {
                admissible = false;
                break;
            }
        }
        if (admissible) {
            const double weight = coherent_amplitude(w, sn.spins, table);
            terms.push_back({std::move(sn), weight});
        }

        size_t k = link_ids.size();
        while (k > 0) {
            --k;
            if (++idx[k] < windows[k].size()) break;
            idx[k] = 0;
            if (k == 0) return terms;
        }
        if (link_ids.empty()) return terms;
    }
}

std::vector<std::string> sorted_class_ids(const std::map<std::string, SpinNetwork>& classes) {
    std::vector<std::string> ids;
    for (const auto& [id, sn] : classes) ids.push_back(id);
    return ids;  // std::map is already sorted
}

} // namespace

void validate_dataset(const LabeledDataset& ds) {
    if (ds.classes.empty()) throw Error("dataset has no classes");
    for (const auto& item : ds.items)
        if (!ds.classes.count(item.label))
            throw Error("item labeled with unknown class '" + item.label + "'");
    std::set<int> seen;
    for (int i : ds.train_idx) {
        if (i < 0 || i >= static_cast<int>(ds.items.size())) throw Error("train index out of range");
        if (!seen.insert(i).second) throw Error("train/test splits overlap");
    }
    for (int i : ds.test_idx) {
        if (i < 0 || i >= static_cast<int>(ds.items.size())) throw Error("test index out of range");
        if (!seen.insert(i).second) throw Error("train/test splits overlap");
    }
    if (seen.size() != ds.items.size()) throw Error("splits do not cover every item");
}

std::string ClassifyResult::decision() const {
    std::string best;
    double p = -1.0;
    for (const auto& [id, prob] : probabilities)
        if (prob > p + 1e-15) {
            best = id;
            p = prob;
        }
    return best;
}

ClassifierEngine::ClassifierEngine(GroupSpec group, std::map<std::string, SpinNetwork> classes,
                                   ClassifyOptions opts)
    : group_(group), classes_(std::move(classes)), opts_(std::move(opts)) {
    if (classes_.empty()) throw Error("classifier needs at least one class");
    for (const auto& [id, sn] : classes_) {
        if (!(sn.group == group_)) throw Error("class '" + id + "' uses a different group");
        auto v = validate(sn);
        if (!v.empty())
            throw Error("class '" + id + "' reference invalid: " + v.front().where + ": " +
                        v.front().message);
        templates_[id] =
            opts_.template_complex ? *opts_.template_complex : corpus::cylinder_over(sn.graph);
        // a class whose reference cannot attach to the template out-boundary
        // contributes an identically-zero channel
        class_template_ok_[id] = boundary_matches(sn, templates_[id], true, opts_.statesum);
    }
    if (opts_.template_complex) {
        bool any = false;
        for (const auto& [id, ok] : class_template_ok_) any = any || ok;
        if (!any) throw Error("template boundary incompatible with every class");
    }
}

cplx ClassifierEngine::pair_amplitude(const std::string& cls, const SpinNetwork& class_state,
                                      int, const SpinNetwork& input) {
    std::ostringstream key;
    key << cls << "#" << labels_signature(class_state) << "#" << graph_signature(input.graph) << "#"
        << labels_signature(input);
    auto it = cache_.find(key.str());
    if (it != cache_.end()) return it->second;
    const cplx v =
        physical_inner_product(input, class_state, templates_.at(cls), opts_.statesum).value;
    cache_.emplace(key.str(), v);
    return v;
}

ClassifyResult ClassifierEngine::classify(const std::variant<SpinNetwork, CoherentInput>& input,
                                          const std::map<std::string, CoherentWeights>& class_weights,
                                          int cache_tag) {
    (void)cache_tag;
    std::vector<SmearTerm> input_terms;
    const Graph* input_graph = nullptr;
    if (std::holds_alternative<SpinNetwork>(input)) {
        const auto& sn = std::get<SpinNetwork>(input);
        if (!(sn.group == group_)) throw Error("input state uses a different group");
        input_terms.push_back({sn, 1.0});
        input_graph = &sn.graph;
    } else {
        const auto& ci = std::get<CoherentInput>(input);
        input_terms = smear_terms(group_, ci.graph, ci.weights, opts_.smear_window_sigmas);
        input_graph = &ci.graph;
    }

    ClassifyResult res;
    double norm = 0.0;
    for (const auto& cls : sorted_class_ids(classes_)) {
        const auto& ref = classes_.at(cls);
        SpinNetwork probe;
        probe.group = group_;
        probe.graph = *input_graph;
        const bool in_ok = boundary_matches(probe, templates_.at(cls), false, opts_.statesum);
        res.mismatched[cls] = !(in_ok && class_template_ok_.at(cls));
        if (res.mismatched[cls]) {
            res.amplitudes[cls] = cplx{0.0, 0.0};
            res.probabilities[cls] = 0.0;
            continue;
        }

        std::vector<SmearTerm> class_terms;
        if (auto w = class_weights.find(cls); w != class_weights.end())
            class_terms = smear_terms(group_, ref.graph, w->second, opts_.smear_window_sigmas);
        else
            class_terms.push_back({ref, 1.0});

        cplx amp{0.0, 0.0};
        for (const auto& ct : class_terms)
            for (const auto& it : input_terms)
                amp += ct.weight * it.weight * pair_amplitude(cls, ct.state, 0, it.state);
        res.amplitudes[cls] = amp;
        norm += std::norm(amp);
    }

    if (norm <= 1e-280) {
        res.degenerate = true;
        const double u = 1.0 / static_cast<double>(classes_.size());
        for (const auto& cls : sorted_class_ids(classes_)) res.probabilities[cls] = u;
        return res;
    }
    for (const auto& cls : sorted_class_ids(classes_))
        res.probabilities[cls] = std::norm(res.amplitudes[cls]) / norm;
    return res;
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct Objective {
    ClassifierEngine& engine;
    const LabeledDataset& ds;

    double log_prob(const ClassifyResult& r, const std::string& label) const {
        const double p = r.probabilities.at(label);
        return std::log(std::max(p, 1e-300));
    }

    /// Mean log-probability of the true class over the train split.
    double operator()(const std::map<std::string, CoherentWeights>& weights,
                      int* degenerate_count = nullptr) {
        double acc = 0.0;
        int degen = 0;
        for (int i : ds.train_idx) {
            const auto r = engine.classify(ds.items[i].input, weights);
            if (r.degenerate) ++degen;
            acc += log_prob(r, ds.items[i].label);
        }
        if (degenerate_count) *degenerate_count = degen;
        return acc / static_cast<double>(ds.train_idx.size());
    }

    double train_error(const std::map<std::string, CoherentWeights>& weights) {
        int wrong = 0;
        for (int i : ds.train_idx) {
            const auto r = engine.classify(ds.items[i].input, weights);
            if (r.decision() != ds.items[i].label) ++wrong;
        }
        return static_cast<double>(wrong) / ds.train_idx.size();
    }
};

double erm_metric(const LabeledDataset& ds, const std::map<std::string, CoherentWeights>& weights) {
    double acc = 0.0;
    int used = 0;
    for (int i : ds.train_idx) {
        const auto& item = ds.items[i];
        const auto& w = weights.at(item.label);
        std::map<int, double> spins;
        if (std::holds_alternative<SpinNetwork>(item.input)) {
            for (const auto& [l, j] : std::get<SpinNetwork>(item.input).spins)
                spins[l] = j.id / 2.0;
        } else {
            spins = std::get<CoherentInput>(item.input).weights.means;
        }
        std::map<int, double> means = w.means;
        if (spins.size() != means.size()) continue;
        bool same_keys = true;
        for (const auto& [l, v] : spins)
            if (!means.count(l)) same_keys = false;
        if (!same_keys) continue;
        acc += erm(spins, means);
        ++used;
    }
    return used > 0 ? acc / used : 0.0;
}

} // namespace

TrainResult train(const LabeledDataset& ds, const TrainingConfig& cfg) {
    validate_dataset(ds);
    if (ds.train_idx.empty()) throw Error("training needs a nonempty train split");
    if (!ds.group.is_finite() && ds.group.two_jmax < 1)
        throw Error("training over SU2 needs a spin cutoff");

    ClassifierEngine engine(ds.group, ds.classes, cfg.classify);
    Objective objective{engine, ds};

    TrainResult res;
    const double jmax = ds.group.two_jmax / 2.0;
    for (const auto& [cls, ref] : ds.classes) {
        CoherentWeights w;
        for (const auto& [l, j] : ref.spins) {
            w.means[l] = j.id / 2.0;
            w.spreads[l] = default_spread(w.means[l]);
        }
        res.weights[cls] = std::move(w);
    }

    int degen = 0;
    double obj = objective(res.weights, &degen);
    if (degen == static_cast<int>(ds.train_idx.size()))
        throw Error("degenerate dataset: every training amplitude vanishes");

    // parameter order: (class id, link id) ascending
    std::vector<std::pair<std::string, int>> params;
    for (const auto& [cls, w] : res.weights)
        for (const auto& [l, m] : w.means) params.push_back({cls, l});

    bool converged = false;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        std::vector<double> grad(params.size(), 0.0);
        double gnorm = 0.0;
        for (size_t p = 0; p < params.size(); ++p) {
            auto probe = res.weights;
            double& slot = probe[params[p].first].means[params[p].second];
            const double center = slot;
            slot = std::clamp(center + cfg.fd_epsilon, 0.0, jmax);
            const double up = objective(probe);
            slot = std::clamp(center - cfg.fd_epsilon, 0.0, jmax);
            const double dn = objective(probe);
            grad[p] = (up - dn) / (2.0 * cfg.fd_epsilon);
            gnorm += grad[p] * grad[p];
        }
        gnorm = std::sqrt(gnorm);
        if (gnorm < cfg.tolerance) {
            converged = true;
            break;
        }

        double step = cfg.step_size;
        bool accepted = false;
        for (int tries = 0; tries < 30 && !accepted; ++tries) {
            auto probe = res.weights;
            for (size_t p = 0; p < params.size(); ++p) {
                double& slot = probe[params[p].first].means[params[p].second];
                slot = std::clamp(slot + step * grad[p], 0.0, jmax);
            }
            const double cand = objective(probe);
            if (cand > obj) {
                res.weights = std::move(probe);
                obj = cand;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        res.log.push_back({iter, obj, objective.train_error(res.weights),
                           erm_metric(ds, res.weights), step, accepted});
        if (!accepted) {
            converged = true;
            break;
        }
    }

    res.converged = converged;
    res.final_objective = obj;
    res.final_train_error = objective.train_error(res.weights);
    res.final_erm = erm_metric(ds, res.weights);
    return res;
}

// ---------------------------------------------------------------------------
// Label randomization

LabeledDataset apply_label_permutation(const LabeledDataset& ds,
                                       const std::map<std::string, std::string>& perm) {
    validate_dataset(ds);
    std::set<std::string> image;
    for (const auto& [from, to] : perm) {
        if (!ds.classes.count(from) || !ds.classes.count(to))
            throw Error("permutation mentions unknown class");
        image.insert(to);
    }
    if (perm.size() != ds.classes.size() || image.size() != ds.classes.size())
        throw Error("label permutation must be a bijection on the classes");
    LabeledDataset out = ds;
    for (int i : out.train_idx) out.items[i].label = perm.at(ds.items[i].label);
    return out;
}

std::map<std::string, std::string> label_permutation_for_seed(const LabeledDataset& ds,
                                                              std::uint64_t seed) {
    std::vector<std::string> ids = sorted_class_ids(ds.classes);
    std::vector<std::string> to = ids;
    std::mt19937_64 rng(seed);
    for (size_t i = to.size(); i > 1; --i) std::swap(to[i - 1], to[rng() % i]);
    std::map<std::string, std::string> perm;
    for (size_t i = 0; i < ids.size(); ++i) perm[ids[i]] = to[i];
    return perm;
}

LabeledDataset randomize_labels(const LabeledDataset& ds, std::uint64_t seed) {
    if (ds.classes.size() < 2) throw Error("label randomization needs at least two classes");
    return apply_label_permutation(ds, label_permutation_for_seed(ds, seed));
}

// ---------------------------------------------------------------------------
// Randomized-label experiment

namespace {

RandomLabelRow measure_run(const LabeledDataset& ds, const TrainingConfig& cfg,
                           std::uint64_t seed, const std::map<std::string, std::string>& perm) {
    RandomLabelRow row;
    row.seed = seed;
    row.permutation = perm;

    ClassifierEngine engine(ds.group, ds.classes, cfg.classify);
    int mismatched = 0;
    for (int i : ds.train_idx) {
        const auto r = engine.classify(ds.items[i].input, {});
        if (r.mismatched.at(ds.items[i].label)) ++mismatched;
    }
    row.mismatch_fraction = static_cast<double>(mismatched) / ds.train_idx.size();
    row.best_train_accuracy = 1.0 - row.mismatch_fraction;

    const TrainResult tr = train(ds, cfg);
    ClassifierEngine post(ds.group, ds.classes, cfg.classify);
    int correct = 0;
    for (int i : ds.train_idx) {
        const auto r = post.classify(ds.items[i].input, tr.weights);
        if (r.decision() == ds.items[i].label) ++correct;
    }
    row.trained_accuracy = static_cast<double>(correct) / ds.train_idx.size();
    return row;
}

} // namespace

RandomLabelReport random_label_experiment(const LabeledDataset& ds, const TrainingConfig& cfg,
                                          const std::vector<std::uint64_t>& seeds) {
    validate_dataset(ds);
    {
        // classes must be pairwise non-isomorphic for the mismatch channel
        std::vector<std::string> ids = sorted_class_ids(ds.classes);
        for (size_t i = 0; i < ids.size(); ++i)
            for (size_t j = i + 1; j < ids.size(); ++j)
                if (!find_graph_isomorphisms(ds.classes.at(ids[i]).graph,
                                             ds.classes.at(ids[j]).graph)
                         .empty())
                    throw Error("classes '" + ids[i] + "' and '" + ids[j] +
                                "' have isomorphic graphs");
    }

    RandomLabelReport report;
    std::map<std::string, std::string> id_perm;
    for (const auto& [cls, sn] : ds.classes) id_perm[cls] = cls;
    report.control = measure_run(ds, cfg, 0, id_perm);
    for (std::uint64_t seed : seeds) {
        const auto perm = label_permutation_for_seed(ds, seed);
        report.runs.push_back(measure_run(apply_label_permutation(ds, perm), cfg, seed, perm));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Capacity sweep

namespace {

Graph flower(int petals) {
    Graph g;
    g.nodes = {0};
    for (int i = 0; i < petals; ++i) g.links.push_back({i, 0, 0});
    return g;
}

// Discrete Gaussian over the admissible two_j lattice, sampled by CDF
// inversion with a plain 53-bit uniform (portable and seed-stable).
int sample_two_j(double mean, double sigma, int two_jmax, std::mt19937_64& rng) {
    std::vector<double> w(two_jmax + 1);
    double total = 0.0;
    for (int tj = 0; tj <= two_jmax; ++tj) {
        const double j = tj / 2.0;
        w[tj] = std::exp(-(j - mean) * (j - mean) / (2.0 * sigma * sigma));
        total += w[tj];
    }
    const double u = std::ldexp(static_cast<double>(rng() >> 11), -53) * total;
    double acc = 0.0;
    for (int tj = 0; tj <= two_jmax; ++tj) {
        acc += w[tj];
        if (u <= acc) return tj;
    }
    return two_jmax;
}

} // namespace

std::vector<SweepRow> capacity_sweep(const SweepConfig& cfg) {
    std::vector<SweepRow> rows;
    for (int two_jmax : cfg.two_jmax_list) {
        for (int petals : cfg.petal_list) {
            const GroupSpec group = GroupSpec::su2(two_jmax);
            const Graph g = flower(petals);
            const double lo = 0.5, hi = two_jmax / 2.0;

            LabeledDataset ds;
            ds.group = group;
            ds.seed = cfg.seed;
            for (const char* cls : {"lo", "hi"}) {
                SpinNetwork ref;
                ref.group = group;
                ref.graph = g;
                const double mean = cls == std::string("lo") ? lo : hi;
                for (const auto& l : g.links)
                    ref.spins[l.id] = IrrepLabel{nearest_admissible_two_j(mean, two_jmax)};
                for (int n : g.nodes) ref.intertwiners[n] = 0;
                ds.classes[cls] = std::move(ref);
            }
            std::mt19937_64 rng(cfg.seed * 1000003ULL + two_jmax * 101 + petals);
            for (const char* cls : {"lo", "hi"}) {
                const double mean = cls == std::string("lo") ? lo : hi;
                for (int i = 0; i < cfg.items_per_class; ++i) {
                    SpinNetwork sn;
                    sn.group = group;
                    sn.graph = g;
                    for (const auto& l : g.links)
                        sn.spins[l.id] = IrrepLabel{sample_two_j(mean, 0.5, two_jmax, rng)};
                    for (int n : g.nodes) sn.intertwiners[n] = 0;
                    ds.items.push_back({std::move(sn), cls});
                }
            }
            for (int i = 0; i < static_cast<int>(ds.items.size()); ++i) {
                if (i % 4 == 3)
                    ds.test_idx.push_back(i);
                else
                    ds.train_idx.push_back(i);
            }

            const TrainResult tr = train(ds, cfg.training);
            ClassifierEngine engine(group, ds.classes, cfg.training.classify);
            int wrong_test = 0;
            for (int i : ds.test_idx) {
                const auto r = engine.classify(ds.items[i].input, tr.weights);
                if (r.decision() != ds.items[i].label) ++wrong_test;
            }
            SweepRow row;
            row.two_jmax = two_jmax;
            row.petals = petals;
            row.total_valence = total_valence(g);
            row.dim_hilbert = dim_hilbert(g, IrrepTable(group));
            row.train_error = tr.final_train_error;
            row.test_error =
                ds.test_idx.empty() ? 0.0 : static_cast<double>(wrong_test) / ds.test_idx.size();
            rows.push_back(row);
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Semi-classical perceptron check

PerceptronReport semiclassical_perceptron_check(const std::vector<double>& w, double b,
                                                const std::vector<std::vector<double>>& inputs,
                                                const std::vector<double>& scales,
                                                const PerceptronConfig& cfg) {
    if (w.empty()) throw Error("perceptron needs at least one weight");
    for (const auto& x : inputs)
        if (x.size() != w.size()) throw Error("input dimension does not match the weights");

    const int d = static_cast<int>(w.size()) + 1;  // + bias feature
    const GroupSpec group = GroupSpec::su2(cfg.two_jmax);
    Graph g;
    for (int i = 0; i < d; ++i) {
        g.nodes.push_back(i);
        g.links.push_back({i, i, i});  // one single-node loop per feature
    }
    std::vector<double> wt(w);
    wt.push_back(b);

    // class references at means M +- kappa * w (rounded to the lattice)
    std::map<std::string, SpinNetwork> classes;
    std::map<std::string, CoherentWeights> class_weights;
    for (const char* cls : {"minus", "plus"}) {
        const double sign = cls == std::string("plus") ? 1.0 : -1.0;
        SpinNetwork ref;
        ref.group = group;
        ref.graph = g;
        CoherentWeights cw;
        for (int i = 0; i < d; ++i) {
            const double mean = cfg.base_mean + sign * cfg.coupling * wt[i];
            if (mean < 0.0 || mean > cfg.two_jmax / 2.0)
                throw Error("class mean encoding overflows the spin cutoff");
            cw.means[i] = mean;
            cw.spreads[i] = cfg.spread;
            ref.spins[i] = IrrepLabel{nearest_admissible_two_j(mean, cfg.two_jmax)};
        }
        for (int n : g.nodes) ref.intertwiners[n] = 0;
        classes[cls] = std::move(ref);
        class_weights[cls] = std::move(cw);
    }

    // the decision needs untruncated Gaussian ratios: widen the smearing
    // window to the whole admissible lattice so distant channels stay
    // nonzero instead of collapsing to exact zeros
    ClassifyOptions opts = cfg.classify;
    opts.smear_window_sigmas =
        std::max(opts.smear_window_sigmas, (cfg.two_jmax / 2.0) / cfg.spread + 1.0);
    ClassifierEngine engine(group, classes, opts);
    PerceptronReport report;
    {
        std::ostringstream os;
        os << "feature x_i (plus a constant bias feature) -> single-node loop with coherent mean "
           << "j_i = round_half(M + s*x_i/2), M = " << cfg.base_mean
           << ", fixed spread sigma = " << cfg.spread << "; class means M +- kappa*w with kappa = "
           << cfg.coupling << "; hbar-analog = 1/s";
        report.encoding = os.str();
    }

    for (double s : scales) {
        int agree = 0, counted = 0, ties = 0;
        for (const auto& x : inputs) {
            double linear = b;
            for (size_t i = 0; i < w.size(); ++i) linear += w[i] * x[i];
            if (std::abs(linear) < 1e-12) {
                ++ties;
                continue;
            }
            CoherentInput ci;
            ci.graph = g;
            std::vector<double> xt(x);
            xt.push_back(1.0);
            for (int i = 0; i < d; ++i) {
                const double mean = cfg.base_mean + s * xt[i] / 2.0;
                if (mean < 0.0 || mean > cfg.two_jmax / 2.0)
                    throw Error("input encoding overflows the spin cutoff at scale " +
                                std::to_string(s));
                ci.weights.means[i] =
                    nearest_admissible_two_j(mean, cfg.two_jmax) / 2.0;  // quantized input
                ci.weights.spreads[i] = cfg.spread;
            }
            const auto r = engine.classify(ci, class_weights);
            const std::string want = linear > 0.0 ? "plus" : "minus";
            if (r.decision() == want) ++agree;
            ++counted;
        }
        report.rows.push_back(
            {s, counted > 0 ? static_cast<double>(agree) / counted : 1.0, ties});
    }
    return report;
}

// ---------------------------------------------------------------------------
// Bundled dataset generators

namespace datasets {

LabeledDataset separable_loops(const GroupSpec& su2, double mean_a, double mean_b, int per_class,
                               std::uint64_t seed) {
    if (su2.kind != GroupKind::SU2) throw Error("separable_loops generates SU2 states");
    // samples are confined to +-0.5 around the class mean so the two spin
    // clusters never overlap and zero training error is attainable
    const double window = std::min(0.5, std::abs(mean_b - mean_a) / 2.0 - 0.25);
    Graph loop;
    loop.nodes = {0};
    loop.links = {{0, 0, 0}};

    LabeledDataset ds;
    ds.group = su2;
    ds.seed = seed;
    for (const char* cls : {"a", "b"}) {
        SpinNetwork ref;
        ref.group = su2;
        ref.graph = loop;
        const double mean = cls == std::string("a") ? mean_a : mean_b;
        ref.spins[0] = IrrepLabel{nearest_admissible_two_j(mean, su2.two_jmax)};
        ref.intertwiners[0] = 0;
        ds.classes[cls] = std::move(ref);
    }
    std::mt19937_64 rng(seed);
    for (const char* cls : {"a", "b"}) {
        const double mean = cls == std::string("a") ? mean_a : mean_b;
        for (int i = 0; i < per_class; ++i) {
            SpinNetwork sn;
            sn.group = su2;
            sn.graph = loop;
            int tj = sample_two_j(mean, 0.4, su2.two_jmax, rng);
            if (std::abs(tj / 2.0 - mean) > window) tj = nearest_admissible_two_j(mean, su2.two_jmax);
            sn.spins[0] = IrrepLabel{tj};
            sn.intertwiners[0] = 0;
            ds.items.push_back({std::move(sn), cls});
        }
    }
    for (int i = 0; i < static_cast<int>(ds.items.size()); ++i) {
        if (i % 4 == 3)
            ds.test_idx.push_back(i);
        else
            ds.train_idx.push_back(i);
    }
    return ds;
}

LabeledDataset topological_trio(const GroupSpec& su2, int per_class) {
    if (su2.kind != GroupKind::SU2 || su2.two_jmax < 2)
        throw Error("topological_trio needs SU2 with J_max >= 1");
    LabeledDataset ds;
    ds.group = su2;

    Graph loop;
    loop.nodes = {0};
    loop.links = {{0, 0, 0}};
    SpinNetwork loop_ref{su2, loop, {{0, IrrepLabel{1}}}, {{0, 0}}};

    Graph theta;
    theta.nodes = {0, 1};
    theta.links = {{0, 0, 1}, {1, 0, 1}, {2, 0, 1}};
    SpinNetwork theta_ref{
        su2, theta, {{0, IrrepLabel{1}}, {1, IrrepLabel{1}}, {2, IrrepLabel{2}}}, {{0, 0}, {1, 0}}};

    Graph twoloop;
    twoloop.nodes = {0};
    twoloop.links = {{0, 0, 0}, {1, 0, 0}};
    SpinNetwork twoloop_ref{
        su2, twoloop, {{0, IrrepLabel{1}}, {1, IrrepLabel{1}}}, {{0, 0}}};

    ds.classes["loop"] = loop_ref;
    ds.classes["theta"] = theta_ref;
    ds.classes["twoloop"] = twoloop_ref;
    for (int i = 0; i < per_class; ++i) {
        ds.items.push_back({loop_ref, "loop"});
        ds.items.push_back({theta_ref, "theta"});
        ds.items.push_back({twoloop_ref, "twoloop"});
    }
    for (int i = 0; i < static_cast<int>(ds.items.size()); ++i) ds.train_idx.push_back(i);
    return ds;
}

} // namespace datasets

} // namespace tqnn
