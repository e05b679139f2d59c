#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tqnn/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace tqnn;

namespace {

SpinNetwork loop_state(const GroupSpec& g, int irrep) {
    SpinNetwork sn;
    sn.group = g;
    sn.graph.nodes = {0};
    sn.graph.links = {{0, 0, 0}};
    sn.spins = {{0, IrrepLabel{irrep}}};
    sn.intertwiners = {{0, 0}};
    return sn;
}

} // namespace

TEST_CASE("classify: matching class wins, mismatched channels are exact zeros") {
    const auto g = GroupSpec::su2(4);
    const auto ds = datasets::topological_trio(g, 1);
    ClassifierEngine engine(g, ds.classes);

    const auto r = engine.classify(ds.classes.at("loop"));
    CHECK(r.probabilities.at("loop") == doctest::Approx(1.0));
    CHECK(r.amplitudes.at("theta") == cplx{0.0, 0.0});
    CHECK(r.amplitudes.at("twoloop") == cplx{0.0, 0.0});
    CHECK(r.mismatched.at("theta"));
    CHECK(!r.mismatched.at("loop"));
    CHECK(!r.degenerate);
    CHECK(r.decision() == "loop");

    // theta input: only the theta channel opens even though the graph has
    // permutation symmetry
    const auto rt = engine.classify(ds.classes.at("theta"));
    CHECK(rt.decision() == "theta");
    CHECK(rt.probabilities.at("theta") == doctest::Approx(1.0));
}

TEST_CASE("classify: probabilities form a distribution") {
    const auto g = GroupSpec::su2(6);
    std::map<std::string, SpinNetwork> classes;
    classes["a"] = loop_state(g, 1);
    classes["b"] = loop_state(g, 4);
    ClassifierEngine engine(g, classes);
    std::map<std::string, CoherentWeights> weights;
    weights["a"] = {{{0, 0.5}}, {{0, 0.7}}};
    weights["b"] = {{{0, 2.0}}, {{0, 0.7}}};

    const auto r = engine.classify(loop_state(g, 2), weights);
    double sum = 0.0;
    for (const auto& [cls, p] : r.probabilities) {
        CHECK(p >= 0.0);
        sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("classify: all channels mismatched yields the degenerate uniform") {
    const auto g = GroupSpec::su2(4);
    const auto ds = datasets::topological_trio(g, 1);
    ClassifierEngine engine(g, ds.classes);
    // a 4-petal flower matches none of the three classes
    SpinNetwork odd;
    odd.group = g;
    odd.graph.nodes = {0};
    for (int i = 0; i < 4; ++i) odd.graph.links.push_back({i, 0, 0});
    for (int i = 0; i < 4; ++i) odd.spins[i] = IrrepLabel{1};
    odd.intertwiners[0] = 0;
    const auto r = engine.classify(odd);
    CHECK(r.degenerate);
    for (const auto& [cls, p] : r.probabilities)
        CHECK(p == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("classify with loop classes separates by spin overlap") {
    // two loop classes over the cylinder: channel amplitude is the coherent
    // weight at the input spin, so the nearer class wins
    const auto g = GroupSpec::su2(6);
    std::map<std::string, SpinNetwork> classes;
    classes["lo"] = loop_state(g, 1);
    classes["hi"] = loop_state(g, 4);
    ClassifierEngine engine(g, classes);
    std::map<std::string, CoherentWeights> weights;
    weights["lo"] = {{{0, 0.5}}, {{0, 0.6}}};
    weights["hi"] = {{{0, 2.0}}, {{0, 0.6}}};

    CHECK(engine.classify(loop_state(g, 0), weights).decision() == "lo");
    CHECK(engine.classify(loop_state(g, 1), weights).decision() == "lo");
    CHECK(engine.classify(loop_state(g, 5), weights).decision() == "hi");
    CHECK(engine.classify(loop_state(g, 6), weights).decision() == "hi");
}

TEST_CASE("dataset validation") {
    auto ds = datasets::separable_loops(GroupSpec::su2(6), 0.5, 2.0, 4, 7);
    validate_dataset(ds);
    auto broken = ds;
    broken.items[0].label = "nope";
    CHECK_THROWS_AS(validate_dataset(broken), Error);
    auto overlap = ds;
    overlap.test_idx.push_back(overlap.train_idx.front());
    CHECK_THROWS_AS(validate_dataset(overlap), Error);
    auto incomplete = ds;
    incomplete.test_idx.pop_back();
    CHECK_THROWS_AS(validate_dataset(incomplete), Error);
}

TEST_CASE("training separates the two-class loop dataset") {
    const auto g = GroupSpec::su2(6);  // J_max = 3
    const auto ds = datasets::separable_loops(g, 0.5, 2.0, 6, 1);
    TrainingConfig cfg;
    cfg.max_iters = 200;
    const auto res = train(ds, cfg);
    CHECK(res.final_train_error == 0.0);
    CHECK(res.log.size() <= 200);

    // objective never decreases on accepted steps
    double prev = -1e300;
    for (const auto& row : res.log) {
        if (row.accepted) {
            CHECK(row.objective >= prev - 1e-12);
            prev = row.objective;
        }
    }

    // deterministic: re-running gives the identical log
    const auto res2 = train(ds, cfg);
    REQUIRE(res2.log.size() == res.log.size());
    for (size_t i = 0; i < res.log.size(); ++i) {
        CHECK(res2.log[i].objective == res.log[i].objective);
        CHECK(res2.log[i].train_error == res.log[i].train_error);
    }

    // ERM consistency: the logged metric equals a recomputation from the
    // final means
    const double recomputed = [&] {
        double acc = 0.0;
        int used = 0;
        for (int i : ds.train_idx) {
            const auto& item = ds.items[i];
            std::map<int, double> spins;
            for (const auto& [l, j] : std::get<SpinNetwork>(item.input).spins)
                spins[l] = j.id / 2.0;
            acc += erm(spins, res.weights.at(item.label).means);
            ++used;
        }
        return acc / used;
    }();
    CHECK(res.final_erm == doctest::Approx(recomputed).epsilon(1e-12));
}

TEST_CASE("training across seeds reaches zero error deterministically") {
    const auto g = GroupSpec::su2(6);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto ds = datasets::separable_loops(g, 0.5, 2.0, 6, seed);
        TrainingConfig cfg;
        const auto res = train(ds, cfg);
        CHECK(res.final_train_error == 0.0);
    }
}

TEST_CASE("label permutations") {
    const auto ds = datasets::topological_trio(GroupSpec::su2(4), 2);

    SUBCASE("identity permutation leaves the dataset unchanged") {
        std::map<std::string, std::string> id_perm;
        for (const auto& [cls, sn] : ds.classes) id_perm[cls] = cls;
        const auto same = apply_label_permutation(ds, id_perm);
        for (size_t i = 0; i < ds.items.size(); ++i)
            CHECK(same.items[i].label == ds.items[i].label);
    }

    SUBCASE("swap permutation flips every train label") {
        std::map<std::string, std::string> swap{
            {"loop", "theta"}, {"theta", "loop"}, {"twoloop", "twoloop"}};
        const auto flipped = apply_label_permutation(ds, swap);
        for (int i : ds.train_idx) {
            if (ds.items[i].label == "loop") CHECK(flipped.items[i].label == "theta");
            if (ds.items[i].label == "theta") CHECK(flipped.items[i].label == "loop");
        }
    }

    SUBCASE("seeded permutations are bijections and invert cleanly") {
        for (std::uint64_t seed : {0ull, 1ull, 5ull, 99ull}) {
            const auto perm = label_permutation_for_seed(ds, seed);
            std::set<std::string> image;
            for (const auto& [from, to] : perm) image.insert(to);
            CHECK(image.size() == ds.classes.size());

            std::map<std::string, std::string> inverse;
            for (const auto& [from, to] : perm) inverse[to] = from;
            const auto back = apply_label_permutation(randomize_labels(ds, seed), inverse);
            for (size_t i = 0; i < ds.items.size(); ++i)
                CHECK(back.items[i].label == ds.items[i].label);
        }
    }

    SUBCASE("non-bijections are rejected") {
        std::map<std::string, std::string> bad{
            {"loop", "loop"}, {"theta", "loop"}, {"twoloop", "twoloop"}};
        CHECK_THROWS_AS(apply_label_permutation(ds, bad), Error);
    }
}

TEST_CASE("random label experiment: control and exhaustive permutations") {
    const auto g = GroupSpec::su2(4);
    const auto ds = datasets::topological_trio(g, 2);
    TrainingConfig cfg;
    cfg.max_iters = 5;

    const auto report = random_label_experiment(ds, cfg, {3, 4});
    CHECK(report.control.mismatch_fraction == 0.0);
    CHECK(report.control.best_train_accuracy == 1.0);
    CHECK(report.control.trained_accuracy == 1.0);

    // each randomized run's mismatch fraction equals the fraction of train
    // items whose label moved (pure combinatorics of the permutation)
    for (const auto& run : report.runs) {
        int moved = 0;
        for (int i : ds.train_idx)
            if (run.permutation.at(ds.items[i].label) != ds.items[i].label) ++moved;
        CHECK(run.mismatch_fraction ==
              doctest::Approx(double(moved) / ds.train_idx.size()));
        CHECK(run.best_train_accuracy == doctest::Approx(1.0 - run.mismatch_fraction));
        CHECK(run.trained_accuracy == doctest::Approx(1.0 - run.mismatch_fraction));
    }

    // exhaustive check over all six permutations of three classes: the mean
    // mismatch fraction is the derangement-weighted value 2/3
    std::vector<std::string> ids{"loop", "theta", "twoloop"};
    std::vector<int> idx{0, 1, 2};
    double mean = 0.0;
    int count = 0;
    ClassifierEngine engine(g, ds.classes);
    do {
        std::map<std::string, std::string> perm;
        for (int i = 0; i < 3; ++i) perm[ids[i]] = ids[idx[i]];
        const auto permuted = apply_label_permutation(ds, perm);
        int mismatched = 0;
        for (int i : permuted.train_idx) {
            const auto r = engine.classify(permuted.items[i].input);
            if (r.mismatched.at(permuted.items[i].label)) ++mismatched;
        }
        mean += double(mismatched) / permuted.train_idx.size();
        ++count;
    } while (std::next_permutation(idx.begin(), idx.end()));
    CHECK(count == 6);
    CHECK(mean / 6 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("random label experiment needs non-isomorphic classes") {
    const auto g = GroupSpec::su2(4);
    LabeledDataset ds;
    ds.group = g;
    ds.classes["a"] = loop_state(g, 1);
    ds.classes["b"] = loop_state(g, 2);  // isomorphic graphs
    ds.items.push_back({loop_state(g, 1), "a"});
    ds.items.push_back({loop_state(g, 2), "b"});
    ds.train_idx = {0, 1};
    TrainingConfig cfg;
    CHECK_THROWS_AS(random_label_experiment(ds, cfg, {1}), Error);
}

TEST_CASE("capacity sweep emits the full deterministic grid") {
    SweepConfig cfg;
    cfg.two_jmax_list = {2, 4};
    cfg.petal_list = {1, 2};
    cfg.items_per_class = 2;
    cfg.seed = 5;
    cfg.training.max_iters = 3;
    const auto rows = capacity_sweep(cfg);
    REQUIRE(rows.size() == 4);
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].total_valence == 2 * rows[i].petals);
        long long per_link = 0;
        IrrepTable table(GroupSpec::su2(rows[i].two_jmax));
        for (const auto& r : table.irreps())
            per_link += (long long)table.dim(r) * table.dim(r);
        long long expect = 1;
        for (int p = 0; p < rows[i].petals; ++p) expect *= per_link;
        CHECK(rows[i].dim_hilbert == expect);
    }
    const auto rows2 = capacity_sweep(cfg);
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows2[i].train_error == rows[i].train_error);
        CHECK(rows2[i].test_error == rows[i].test_error);
    }
}

TEST_CASE("semiclassical perceptron check approaches the linear rule") {
    PerceptronConfig cfg;
    cfg.two_jmax = 10;  // J_max = 5
    cfg.base_mean = 2.5;
    cfg.coupling = 1.0;
    cfg.spread = 0.5;
    const std::vector<double> w{1.0};
    const double b = -0.5;
    std::vector<std::vector<double>> inputs;
    for (double x : {-0.95, -0.7, -0.35, 0.15, 0.5, 0.633, 0.95}) inputs.push_back({x});
    const auto report =
        semiclassical_perceptron_check(w, b, inputs, {0.75, 1.5, 3.0}, cfg);

    REQUIRE(report.rows.size() == 3);
    // x = 0.5 sits on the decision boundary and is excluded everywhere
    for (const auto& row : report.rows) CHECK(row.ties_excluded == 1);
    // agreement is non-decreasing in the mean-spin scale and ends at 1
    for (size_t i = 0; i + 1 < report.rows.size(); ++i)
        CHECK(report.rows[i + 1].agreement >= report.rows[i].agreement - 1e-12);
    CHECK(report.rows.back().agreement == doctest::Approx(1.0));
    // coarse scales misclassify through quantization; the limit recovers
    CHECK(report.rows.front().agreement < 1.0);
    CHECK(!report.encoding.empty());
}

TEST_CASE("perceptron encoding overflow is reported") {
    PerceptronConfig cfg;
    cfg.two_jmax = 4;
    cfg.base_mean = 1.0;
    CHECK_THROWS_AS(
        semiclassical_perceptron_check({1.0}, 0.0, {{1.0}}, {8.0}, cfg), Error);
}
