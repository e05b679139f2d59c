#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tqnn/graph.hpp"
#include "tqnn/su2.hpp"

#include <cmath>
#include <random>

using namespace tqnn;

namespace {

Graph loop_graph() {
    Graph g;
    g.nodes = {0};
    g.links = {{0, 0, 0}};
    return g;
}

Graph theta_graph() {
    Graph g;
    g.nodes = {0, 1};
    g.links = {{0, 0, 1}, {1, 0, 1}, {2, 0, 1}};
    return g;
}

SpinNetwork theta_network(int tja, int tjb, int tjc) {
    SpinNetwork sn;
    sn.group = GroupSpec::su2(4);
    sn.graph = theta_graph();
    sn.spins = {{0, IrrepLabel{tja}}, {1, IrrepLabel{tjb}}, {2, IrrepLabel{tjc}}};
    sn.intertwiners = {{0, 0}, {1, 0}};
    return sn;
}

GroupElement random_su2(std::mt19937_64& rng, const GroupSpec& g) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    return su2_from_cell(g, {dist(rng), dist(rng)}, {dist(rng), dist(rng)});
}

} // namespace

TEST_CASE("validation accepts the admissible theta and flags parity") {
    CHECK(validate(theta_network(1, 1, 2)).empty());
    const auto violations = validate(theta_network(1, 1, 1));
    REQUIRE(violations.size() >= 2);  // both nodes
    CHECK(violations.front().message.find("parity") != std::string::npos);
    const auto triangle = validate(theta_network(1, 1, 8));
    CHECK(!triangle.empty());
}

TEST_CASE("validation accepts a self-loop on a 2-valent node") {
    SpinNetwork sn;
    sn.group = GroupSpec::su2(4);
    sn.graph = loop_graph();
    sn.spins = {{0, IrrepLabel{2}}};  // j = 1
    sn.intertwiners = {{0, 0}};
    CHECK(validate(sn).empty());
}

TEST_CASE("validation names missing labels and broken graphs") {
    SpinNetwork sn;
    sn.group = GroupSpec::s3();
    sn.graph.nodes = {0};
    sn.graph.links = {{0, 0, 7}};
    const auto v = validate(sn);
    REQUIRE(!v.empty());
    CHECK(v.front().message.find("missing node") != std::string::npos);
}

TEST_CASE("dim_hilbert: literal per-endpoint product") {
    SpinNetwork sn;
    sn.group = GroupSpec::su2(2);
    sn.graph.nodes = {0, 1};
    sn.graph.links = {{0, 0, 1}};
    sn.spins = {{0, IrrepLabel{1}}};
    sn.intertwiners = {{0, 0}, {1, 0}};
    CHECK(dim_hilbert(sn) == 4);  // both endpoints count

    // graph + cutoff J_max = 1: (1 + 4 + 9)^1
    CHECK(dim_hilbert(sn.graph, IrrepTable(GroupSpec::su2(2))) == 14);

    SpinNetwork empty;
    empty.group = GroupSpec::su2(2);
    CHECK(dim_hilbert(empty) == 1);
    CHECK(dim_hilbert(empty.graph, IrrepTable(GroupSpec::su2(2))) == 1);
}

TEST_CASE("dim_hilbert enumeration oracle on a two-link graph") {
    Graph g;
    g.nodes = {0, 1};
    g.links = {{0, 0, 1}, {1, 1, 0}};
    IrrepTable table(GroupSpec::su2(3));
    long long expect = 0;
    for (int tj0 = 0; tj0 <= 3; ++tj0)
        for (int tj1 = 0; tj1 <= 3; ++tj1)
            expect += (tj0 + 1) * (tj0 + 1) * (tj1 + 1) * (tj1 + 1);
    CHECK(dim_hilbert(g, table) == expect);
}

TEST_CASE("dim_hilbert is multiplicative over disjoint unions") {
    SpinNetwork a;
    a.group = GroupSpec::su2(4);
    a.graph = loop_graph();
    a.spins = {{0, IrrepLabel{3}}};
    a.intertwiners = {{0, 0}};

    SpinNetwork both = a;
    both.graph.nodes.push_back(1);
    both.graph.links.push_back({1, 1, 1});
    both.spins[1] = IrrepLabel{2};
    both.intertwiners[1] = 0;

    SpinNetwork b;
    b.group = a.group;
    b.graph.nodes = {1};
    b.graph.links = {{1, 1, 1}};
    b.spins = {{1, IrrepLabel{2}}};
    b.intertwiners = {{1, 0}};

    CHECK(dim_hilbert(both) == dim_hilbert(a) * dim_hilbert(b));
}

TEST_CASE("total_valence is the handshake sum") {
    CHECK(total_valence(theta_graph()) == 6);
    CHECK(total_valence(loop_graph()) == 2);
    Graph two_loops;
    two_loops.nodes = {0};
    two_loops.links = {{0, 0, 0}, {1, 0, 0}};
    CHECK(total_valence(two_loops) == 4);
    CHECK(two_loops.valence(0) == 4);
}

TEST_CASE("erm values") {
    CHECK(erm({{0, 1.0}, {1, 2.0}}, {{0, 1.0}, {1, 2.0}}) == 0.0);
    CHECK(erm({{0, 1.0}, {1, 2.0}}, {{0, 1.0}, {1, 1.0}}) == doctest::Approx(0.25));
    CHECK(erm({{0, 0.0}, {1, 0.0}, {2, 3.0}}, {{0, 1.0}, {1, 1.0}, {2, 1.0}}) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(erm({}, {}), Error);
    CHECK_THROWS_AS(erm({{0, 1.0}}, {{1, 1.0}}), Error);
}

TEST_CASE("erm is relabeling-invariant and positive off the means") {
    const double a = erm({{0, 1.0}, {1, 2.5}}, {{0, 0.5}, {1, 2.0}});
    const double b = erm({{5, 1.0}, {9, 2.5}}, {{5, 0.5}, {9, 2.0}});
    CHECK(a == b);
    CHECK(a > 0.0);
}

TEST_CASE("coherent amplitude: peak normalization and product rule") {
    IrrepTable table(GroupSpec::su2(8));
    CoherentWeights w;
    w.means = {{0, 1.0}};
    w.spreads = {{0, 1.0}};
    CHECK(coherent_amplitude(w, {{0, IrrepLabel{2}}}, table) == doctest::Approx(1.0));
    CHECK(coherent_amplitude(w, {{0, IrrepLabel{4}}}, table) == doctest::Approx(std::exp(-0.5)));
    CoherentWeights two;
    two.means = {{0, 1.0}, {1, 2.0}};
    two.spreads = {{0, 1.0}, {1, 1.0}};
    CHECK(coherent_amplitude(two, {{0, IrrepLabel{4}}, {1, IrrepLabel{6}}}, table) ==
          doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("coherent amplitude argmax sits at the rounded mean, ties downward") {
    IrrepTable table(GroupSpec::su2(8));
    for (double mean : {0.3, 0.75, 1.9, 2.5, 3.24}) {
        CoherentWeights w;
        w.means = {{0, mean}};
        int best = -1;
        double best_v = -1.0;
        for (int tj = 0; tj <= 8; ++tj) {
            const double v = coherent_amplitude(w, {{0, IrrepLabel{tj}}}, table);
            if (v > best_v + 1e-15) {
                best_v = v;
                best = tj;
            }
        }
        CHECK(best == nearest_admissible_two_j(mean, 8));
    }
    CHECK(nearest_admissible_two_j(0.75, 8) == 1);  // tie 0.5 vs 1.0 -> down
    CHECK(nearest_admissible_two_j(2.5, 4) == 4);   // clamped to the cutoff
}

TEST_CASE("default spread implements the 1/sqrt(mean) variance scaling") {
    // sigma^2 = sqrt(mean): variance of the induced spin distribution
    CHECK(default_spread(4.0) * default_spread(4.0) == doctest::Approx(2.0));
    CHECK(default_spread(0.1) == default_spread(0.5));
}

TEST_CASE("cylindrical evaluation: loops reduce to characters") {
    for (auto spec : {GroupSpec::su2(4), GroupSpec::s3()}) {
        IrrepTable table(spec);
        SpinNetwork sn;
        sn.group = spec;
        sn.graph = loop_graph();
        const IrrepLabel r{spec.kind == GroupKind::SU2 ? 1 : 2};
        sn.spins = {{0, r}};
        sn.intertwiners = {{0, 0}};
        const auto u =
            spec.kind == GroupKind::SU2 ? su2_rotation(spec, 1.3) : finite_element(spec, 4);
        CHECK(std::abs(evaluate_cylindrical(sn, {{0, u}}) - table.character(r, u)) < 1e-12);
    }
    // spin-1/2 loop at the identity and at a pi rotation
    SpinNetwork sn;
    sn.group = GroupSpec::su2(2);
    sn.graph = loop_graph();
    sn.spins = {{0, IrrepLabel{1}}};
    sn.intertwiners = {{0, 0}};
    CHECK(evaluate_cylindrical(sn, {{0, identity(sn.group)}}).real() == doctest::Approx(2.0));
    CHECK(std::abs(evaluate_cylindrical(sn, {{0, su2_rotation(sn.group, M_PI)}})) < 1e-12);
}

TEST_CASE("theta network at the identity matches a dense Clebsch-Gordan oracle") {
    const auto sn = theta_network(1, 1, 2);
    const cplx got = evaluate_cylindrical(
        sn, {{0, identity(sn.group)}, {1, identity(sn.group)}, {2, identity(sn.group)}});

    // independent oracle: both trivalent intertwiners are orthonormal
    // invariant tensors built from the same CG data, so the identity-holonomy
    // contraction is the squared norm of the CG column stack
    const Eigen::MatrixXd cg = su2::clebsch_gordan(1, 1, 2);
    double norm2 = 0.0;
    for (int m1 = 0; m1 < 2; ++m1)
        for (int m2 = 0; m2 < 2; ++m2)
            for (int m3 = 0; m3 < 3; ++m3) {
                const double v = cg(m1 * 2 + m2, m3) / std::sqrt(3.0);
                norm2 += v * v;
            }
    CHECK(std::abs(got) == doctest::Approx(norm2).epsilon(1e-10));
}

TEST_CASE("gauge invariance of cylindrical functionals") {
    std::mt19937_64 rng(17);
    const auto g = GroupSpec::su2(4);
    const auto sn = theta_network(1, 1, 2);
    for (int rep = 0; rep < 5; ++rep) {
        std::map<int, GroupElement> holos;
        for (int l : {0, 1, 2}) holos[l] = random_su2(rng, g);
        const cplx before = evaluate_cylindrical(sn, holos);
        const auto g0 = random_su2(rng, g), g1 = random_su2(rng, g);
        std::map<int, GroupElement> gauged;
        // all links run 0 -> 1: U -> g(target) U g(source)^-1
        for (int l : {0, 1, 2}) gauged[l] = compose(compose(g1, holos[l]), invert(g0));
        CHECK(std::abs(evaluate_cylindrical(sn, gauged) - before) < 1e-10);
    }
}

TEST_CASE("gauge invariance for a finite-group theta") {
    const auto spec = GroupSpec::s3();
    SpinNetwork sn;
    sn.group = spec;
    sn.graph = theta_graph();
    // standard (x) standard (x) standard contains the trivial rep once
    sn.spins = {{0, IrrepLabel{2}}, {1, IrrepLabel{2}}, {2, IrrepLabel{2}}};
    sn.intertwiners = {{0, 0}, {1, 0}};
    REQUIRE(validate(sn).empty());
    std::mt19937_64 rng(23);
    for (int rep = 0; rep < 6; ++rep) {
        std::map<int, GroupElement> holos;
        for (int l : {0, 1, 2}) holos[l] = finite_element(spec, rng() % 6);
        const cplx before = evaluate_cylindrical(sn, holos);
        const auto g0 = finite_element(spec, rng() % 6), g1 = finite_element(spec, rng() % 6);
        std::map<int, GroupElement> gauged;
        for (int l : {0, 1, 2}) gauged[l] = compose(compose(g1, holos[l]), invert(g0));
        CHECK(std::abs(evaluate_cylindrical(sn, gauged) - before) < 1e-11);
    }
}

TEST_CASE("cylindrical evaluation rejects missing holonomies and foreign groups") {
    const auto sn = theta_network(1, 1, 2);
    CHECK_THROWS_AS(evaluate_cylindrical(sn, {{0, identity(sn.group)}}), Error);
    std::map<int, GroupElement> holos;
    for (int l : {0, 1, 2}) holos[l] = finite_element(GroupSpec::s3(), 1);
    CHECK_THROWS_AS(evaluate_cylindrical(sn, holos), Error);
}

TEST_CASE("graph isomorphism search") {
    const Graph theta = theta_graph();
    CHECK(!find_graph_isomorphisms(theta, theta).empty());
    CHECK(find_graph_isomorphisms(theta, loop_graph()).empty());

    // out-star vs in-star: related only by orientation reversal
    Graph out_star, in_star;
    out_star.nodes = in_star.nodes = {0, 1, 2};
    out_star.links = {{0, 1, 0}, {1, 1, 2}};
    in_star.links = {{0, 0, 1}, {1, 2, 1}};
    CHECK(find_graph_isomorphisms(out_star, in_star).empty());
    const auto rev = find_graph_isomorphisms(out_star, in_star, true);
    CHECK(!rev.empty());
    CHECK(rev.front().flipped.at(0));
}
