#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tqnn/statesum.hpp"

#include <cmath>

using namespace tqnn;

namespace {

// Brute-force edge-assignment oracle: one nested Haar sum per edge, one
// flatness delta per face, evaluated without the elimination engine.
cplx brute_force_z(const TwoComplex& c, const GroupSpec& g) {
    const int order = g.order();
    const int ne = static_cast<int>(c.edges.size());
    long long total = 1;
    for (int i = 0; i < ne; ++i) total *= order;
    IrrepTable table(g);

    cplx acc = 0.0;
    std::vector<int> vals(ne, 0);
    for (long long it = 0; it < total; ++it) {
        std::map<int, GroupElement> a;
        for (int i = 0; i < ne; ++i) a[c.edges[i].id] = finite_element(g, vals[i]);
        cplx term = 1.0;
        for (const auto& f : c.faces) {
            const auto h = face_holonomy(c, f.id, a);
            term *= (h.index == 0) ? double(order) : 0.0;
            if (term == cplx(0.0)) break;
        }
        acc += term;
        for (int k = ne - 1; k >= 0; --k) {
            if (++vals[k] < order) break;
            vals[k] = 0;
        }
    }
    return acc / std::pow(double(order), ne);
}

SpinNetwork loop_state(const GroupSpec& g, int irrep) {
    SpinNetwork sn;
    sn.group = g;
    sn.graph.nodes = {0};
    sn.graph.links = {{0, 0, 0}};
    sn.spins = {{0, IrrepLabel{irrep}}};
    sn.intertwiners = {{0, 0}};
    return sn;
}

SpinNetwork theta_state(const GroupSpec& g, int a, int b, int c) {
    SpinNetwork sn;
    sn.group = g;
    sn.graph.nodes = {0, 1};
    sn.graph.links = {{0, 0, 1}, {1, 0, 1}, {2, 0, 1}};
    sn.spins = {{0, IrrepLabel{a}}, {1, IrrepLabel{b}}, {2, IrrepLabel{c}}};
    sn.intertwiners = {{0, 0}, {1, 0}};
    return sn;
}

} // namespace

TEST_CASE("closed surfaces: exact values and the brute-force oracle") {
    const auto s3 = GroupSpec::s3();
    const auto z4 = GroupSpec::cyclic(4);

    const auto z_sphere = partition_function(corpus::sphere(), s3);
    CHECK(z_sphere.value.real() == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(z_sphere.exactness.kind == ExactnessKind::Exact);

    CHECK(partition_function(corpus::torus(), s3).value.real() ==
          doctest::Approx(3.0).epsilon(1e-13));
    CHECK(partition_function(corpus::torus(), z4).value.real() ==
          doctest::Approx(4.0).epsilon(1e-13));
    CHECK(partition_function(corpus::genus2(), s3).value.real() ==
          doctest::Approx(2.25).epsilon(1e-13));

    for (const auto& [name, c] : corpus::all()) {
        if (!c.boundaries.empty()) continue;
        INFO(name);
        const cplx oracle = brute_force_z(c, s3);
        const cplx got = partition_function(c, s3).value;
        CHECK(std::abs(got - oracle) <= 1e-12 * std::max(1.0, std::abs(oracle)));
    }
}

TEST_CASE("closed surfaces match sum over irreps of dim^(2-2g)") {
    for (const auto& g : {GroupSpec::s3(), GroupSpec::q8(), GroupSpec::cyclic(5)}) {
        IrrepTable table(g);
        auto expect = [&](int genus) {
            double s = 0.0;
            for (const auto& r : table.irreps()) s += std::pow(double(table.dim(r)), 2 - 2 * genus);
            return s;
        };
        CHECK(partition_function(corpus::sphere(), g).value.real() ==
              doctest::Approx(expect(0)).epsilon(1e-12));
        CHECK(partition_function(corpus::torus(), g).value.real() ==
              doctest::Approx(expect(1)).epsilon(1e-12));
        CHECK(partition_function(corpus::genus2(), g).value.real() ==
              doctest::Approx(expect(2)).epsilon(1e-12));
    }
}

TEST_CASE("SU2 closed surfaces: cutoff character sums") {
    const auto g = GroupSpec::su2(2);  // spins 0, 1/2, 1
    const auto sphere = partition_function(corpus::sphere(), g);
    CHECK(sphere.value.real() == doctest::Approx(14.0).epsilon(1e-12));  // 1+4+9
    CHECK(sphere.exactness.kind == ExactnessKind::CutoffApprox);
    CHECK(partition_function(corpus::torus(), g).value.real() ==
          doctest::Approx(3.0).epsilon(1e-12));
    CHECK(partition_function(corpus::genus2(), g).value.real() ==
          doctest::Approx(1.0 + 1.0 / 4.0 + 1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("empty and trivial complexes") {
    TwoComplex empty;
    CHECK(partition_function(empty, GroupSpec::s3()).value.real() == doctest::Approx(1.0));
    // an edge in no face integrates to one
    TwoComplex lone;
    lone.vertices = {0};
    lone.edges = {{0, 0, 0}};
    CHECK(partition_function(lone, GroupSpec::s3()).value.real() == doctest::Approx(1.0));
    // SU2 without a cutoff is rejected
    GroupSpec su2_nocut{GroupKind::SU2, 0, 0};
    CHECK_THROWS_AS(partition_function(corpus::torus(), su2_nocut), Error);
}

TEST_CASE("partition function is multiplicative over disjoint unions") {
    const auto s3 = GroupSpec::s3();
    TwoComplex both = corpus::torus();
    const auto sphere = corpus::sphere();
    // shift sphere ids by 10 and append
    both.vertices.push_back(10);
    both.edges.push_back({10, 10, 10});
    both.faces.push_back({10, {{10, true}}});
    both.faces.push_back({11, {{10, false}}});
    const double za = partition_function(corpus::torus(), s3).value.real();
    const double zb = partition_function(sphere, s3).value.real();
    CHECK(partition_function(both, s3).value.real() == doctest::Approx(za * zb).epsilon(1e-12));
}

TEST_CASE("subdivision invariance on closed corpus complexes") {
    for (const auto& g : {GroupSpec::s3(), GroupSpec::q8(), GroupSpec::cyclic(3)}) {
        for (const auto& [name, c] : corpus::all()) {
            INFO(name << " over " << g.name());
            const double z0 = std::abs(partition_function(c, g).value);
            for (std::uint64_t seed : {11ull, 12ull}) {
                const auto moved = random_interior_moves(c, 5, seed);
                const double z1 = std::abs(partition_function(moved, g).value);
                CHECK(z1 == doctest::Approx(z0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("face amplitude kernel examples over S3") {
    IrrepTable table(GroupSpec::s3());
    const auto e = identity(GroupSpec::s3());
    // single edge, all identity: sum_R d_R^3 = 1 + 1 + 8
    CHECK(face_amplitude_kernel(table, {e}, e).real() == doctest::Approx(10.0));
    // zero edges: reduces to delta(identity)
    CHECK(face_amplitude_kernel(table, {}, e).real() == doctest::Approx(6.0));
    // one edge holding a 3-cycle, U_f = identity: 1 + 1 + 2*(-1)*2 = -2
    const auto cyc = finite_element(GroupSpec::s3(), 4);
    CHECK(face_amplitude_kernel(table, {cyc}, e).real() == doctest::Approx(-2.0));
}

TEST_CASE("cylindrical boundary amplitude of the disk is the group delta") {
    const auto s3 = GroupSpec::s3();
    IrrepTable table(s3);
    const auto disk = corpus::disk();
    for (int u = 0; u < 6; ++u) {
        const auto z = partition_function(disk, s3, {{0, finite_element(s3, u)}});
        CHECK(z.value.real() == doctest::Approx(u == 0 ? 6.0 : 0.0).epsilon(1e-13));
    }
}

TEST_CASE("physical inner product on the disk: finite groups") {
    const auto s3 = GroupSpec::s3();
    const auto disk = corpus::disk();

    // 2-dim irrep on both sides: chi(e)^2 = 4
    const auto a = physical_inner_product(loop_state(s3, 2), loop_state(s3, 2), disk);
    CHECK(a.value.real() == doctest::Approx(4.0).epsilon(1e-12));

    // trivial vs sign: delta forces u = e, characters both 1
    const auto b = physical_inner_product(loop_state(s3, 0), loop_state(s3, 1), disk);
    CHECK(b.value.real() == doctest::Approx(1.0).epsilon(1e-12));

    // brute-force Haar oracle: (1/6) sum_u conj(chi_r(u)) delta(u) chi_s(u)
    IrrepTable table(s3);
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) {
            cplx oracle = 0.0;
            for (int u = 0; u < 6; ++u) {
                const auto el = finite_element(s3, u);
                oracle += std::conj(table.character(IrrepLabel{r}, el)) * table.delta_kernel(el) *
                          table.character(IrrepLabel{s}, el);
            }
            oracle /= 6.0;
            const auto got = physical_inner_product(loop_state(s3, s), loop_state(s3, r), disk);
            CHECK(std::abs(got.value - oracle) < 1e-12);
        }
}

TEST_CASE("topological mismatch channel is exactly zero") {
    const auto s3 = GroupSpec::s3();
    const auto su2 = GroupSpec::su2(4);
    const auto disk = corpus::disk();
    const auto ann = corpus::annulus();
    // loop against theta: no isomorphism, amplitude identically zero
    for (int r = 0; r < 3; ++r) {
        const auto a = physical_inner_product(theta_state(s3, 2, 2, 2), loop_state(s3, r), disk);
        CHECK(a.value == cplx{0.0, 0.0});
    }
    const auto b =
        physical_inner_product(loop_state(su2, 1), theta_state(su2, 1, 1, 2), ann);
    CHECK(b.value == cplx{0.0, 0.0});
}

TEST_CASE("physical inner product over the annulus: loop sector orthogonality") {
    const auto s3 = GroupSpec::s3();
    const auto ann = corpus::annulus();
    // <chi_r, P chi_s> = delta_rs for the flatness projector on the annulus
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) {
            const auto a = physical_inner_product(loop_state(s3, s), loop_state(s3, r), ann);
            CHECK(a.value.real() == doctest::Approx(r == s ? 1.0 : 0.0).epsilon(1e-12));
            CHECK(std::abs(a.value.imag()) < 1e-13);
        }
}

TEST_CASE("SU2 disk amplitude matches the character sum closed form") {
    // <chi_j, P chi_j>_disk = sum_{l <= min(2j, jmax)} (2l+1) = (2j+1)^2 once
    // the cutoff covers 2j
    for (int two_jmax : {2, 4, 6}) {
        const auto g = GroupSpec::su2(two_jmax);
        const auto disk = corpus::disk();
        for (int tj = 0; 2 * tj <= two_jmax && tj <= 2; ++tj) {
            const auto a = physical_inner_product(loop_state(g, tj), loop_state(g, tj), disk);
            const double expect = (tj + 1.0) * (tj + 1.0);
            CHECK(a.value.real() == doctest::Approx(expect).epsilon(1e-10));
        }
    }
}

TEST_CASE("SU2 amplitudes stabilize once the cutoff passes twice the boundary spin") {
    const auto disk = corpus::disk();
    std::vector<double> values;
    for (int two_jmax : {2, 3, 4, 5, 6}) {
        const auto g = GroupSpec::su2(two_jmax);
        values.push_back(
            physical_inner_product(loop_state(g, 1), loop_state(g, 1), disk).value.real());
    }
    // j = 1/2 needs face spins up to 1 (two_j = 2); stays fixed afterwards
    for (size_t i = 0; i + 1 < values.size(); ++i)
        CHECK(values[i + 1] == doctest::Approx(values[0]).epsilon(1e-10));
}

TEST_CASE("conjugate symmetry under swap and orientation reversal") {
    const auto ann = corpus::annulus();
    const auto rev = reverse_orientation(ann);
    for (const auto& g : {GroupSpec::s3(), GroupSpec::cyclic(4)}) {
        IrrepTable table(g);
        for (int r = 0; r < table.num_irreps(); ++r)
            for (int s = 0; s < table.num_irreps(); ++s) {
                const cplx fwd =
                    physical_inner_product(loop_state(g, r), loop_state(g, s), ann).value;
                const cplx bwd =
                    physical_inner_product(loop_state(g, s), loop_state(g, r), rev).value;
                CHECK(std::abs(fwd - std::conj(bwd)) < 1e-12);
            }
    }
}

TEST_CASE("projector idempotence on the annulus") {
    const auto ann = corpus::annulus();
    const auto rule = self_gluing_rule(ann);

    SUBCASE("finite groups: deviation at machine precision") {
        const auto s3 = GroupSpec::s3();
        std::vector<std::pair<SpinNetwork, SpinNetwork>> pairs;
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s) pairs.push_back({loop_state(s3, r), loop_state(s3, s)});
        const auto report = projector_idempotence_check(ann, rule, pairs);
        CHECK(report.max_abs_deviation <= 1e-12);
    }

    SUBCASE("SU2 cutoff 2 with boundary spins <= 1") {
        const auto g = GroupSpec::su2(4);
        std::vector<std::pair<SpinNetwork, SpinNetwork>> pairs;
        for (int r = 0; r <= 2; ++r)
            for (int s = 0; s <= 2; ++s) pairs.push_back({loop_state(g, r), loop_state(g, s)});
        const auto report = projector_idempotence_check(ann, rule, pairs);
        CHECK(report.max_abs_deviation <= 1e-10);
    }

    SUBCASE("empty boundary degenerates to the partition function") {
        const auto torus = corpus::torus();
        const auto report = projector_idempotence_check(torus, {}, {});
        REQUIRE(report.rows.size() == 1);
        CHECK(report.rows[0].once.real() == doctest::Approx(3.0));
        CHECK(report.rows[0].twice == report.rows[0].once);
    }
}

TEST_CASE("boundary assignment must cover exactly the boundary edges") {
    const auto s3 = GroupSpec::s3();
    const auto ann = corpus::annulus();
    std::map<int, GroupElement> partial{{0, identity(s3)}};
    CHECK_THROWS_AS(partition_function(ann, s3, partial), Error);
    std::map<int, GroupElement> wrong{{2, identity(s3)}};  // radial edge is interior
    CHECK_THROWS_AS(partition_function(corpus::annulus(), s3, wrong), Error);
}

TEST_CASE("group mismatch between states is rejected") {
    const auto disk = corpus::disk();
    CHECK_THROWS_AS(physical_inner_product(loop_state(GroupSpec::s3(), 0),
                                           loop_state(GroupSpec::q8(), 0), disk),
                    Error);
}
