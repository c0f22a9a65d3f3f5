#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gaussdfe/mmse.hpp"
#include "oracles.hpp"

using namespace gaussdfe;

namespace {

// Groups named X, Y, Z (in that order) with the requested sizes.
JointGram make_joint(const CMatrix& g, std::vector<std::size_t> sizes) {
    static const char* names[] = {"X", "Y", "Z", "W"};
    std::vector<VariableGroup> groups;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        VariableGroup grp{names[k], {}};
        for (std::size_t i = 0; i < sizes[k]; ++i) {
            grp.labels.push_back(std::string(1, static_cast<char>('a' + k)) + std::to_string(i));
        }
        groups.push_back(grp);
    }
    return JointGram(groups, HermitianGram(g));
}

JointGram random_joint(oracle::Rng& rng, std::vector<std::size_t> sizes) {
    std::size_t n = 0;
    for (auto s : sizes) {
        n += s;
    }
    return make_joint(rng.gram(n), sizes);
}

// Scalar X with Y = X + N: joint Gram [[S, S], [S, S + s2]].
JointGram scalar_awgn(double s, double s2) { return make_joint(CMatrix{{s, s}, {s, s + s2}}, {1, 1}); }

} // namespace

TEST_CASE("JointGram validation") {
    const HermitianGram g = HermitianGram::identity(3);
    CHECK_THROWS_AS(JointGram({{"X", {"a"}}, {"X", {"b", "c"}}}, g), InvalidArgument);
    CHECK_THROWS_AS(JointGram({{"X", {"a"}}, {"Y", {"a", "c"}}}, g), InvalidArgument);
    CHECK_THROWS_AS(JointGram({{"X", {"a"}}, {"Y", {}}}, g), InvalidArgument);
    CHECK_THROWS_AS(JointGram({{"X", {"a"}}, {"Y", {"b"}}}, g), DimensionMismatch);

    const JointGram j({{"X", {"a"}}, {"Y", {"b", "c"}}}, g);
    CHECK(j.has_group("Y"));
    CHECK_FALSE(j.has_group("Z"));
    CHECK(j.indices(GroupList{"Y", "X"}) == std::vector<std::size_t>{1, 2, 0});
    CHECK_THROWS_AS(j.indices(GroupList{"Q"}), InvalidArgument);

    oracle::Rng rng(40);
    const JointGram r = random_joint(rng, {2, 3});
    CHECK(r.block({"X"}, {"Y"}) == conj_transpose(r.block({"Y"}, {"X"})));
}

TEST_CASE("mmse_project examples") {
    SUBCASE("scalar Wiener") {
        const JointGram j = scalar_awgn(3.0, 1.0);
        const ProjectionResult p = mmse_project(j, {"X"}, {"Y"});
        CHECK(std::abs(p.coefficients(0, 0) - cplx{0.75}) <= 1e-15);
        CHECK(std::abs(p.error_gram(0, 0) - cplx{0.75}) <= 1e-15);
        CHECK(std::abs(p.estimate_gram(0, 0) - cplx{2.25}) <= 1e-15);
    }
    SUBCASE("independent observation") {
        const JointGram j = make_joint(CMatrix{{2.0, 0.0}, {0.0, 5.0}}, {1, 1});
        const ProjectionResult p = mmse_project(j, {"X"}, {"Y"});
        CHECK(p.coefficients == CMatrix{{0.0}});
        CHECK(p.error_gram.matrix() == CMatrix{{2.0}});
        CHECK(orthogonality_residual(j, p, {"X"}, {"Y"}) == 0.0);
    }
    SUBCASE("perfect observation") {
        oracle::Rng rng(41);
        const CMatrix r = rng.gram(3);
        CMatrix g(6, 6);
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t k = 0; k < 6; ++k) {
                g(i, k) = r(i % 3, k % 3);
            }
        }
        const JointGram j = make_joint(g, {3, 3});
        const ProjectionResult p = mmse_project(j, {"X"}, {"Y"});
        CHECK(max_abs_diff(p.coefficients, CMatrix::identity(3)) <= 1e-10);
        CHECK(p.error_gram.matrix().max_abs() <= 1e-10 * j.scale());
        CHECK(mutual_information(j, {"X"}, {"Y"}).infinite);
    }
    SUBCASE("rank-deficient observation is rejected") {
        const JointGram j = make_joint(CMatrix{{1.0, 1.0, 1.0}, {1.0, 2.0, 2.0}, {1.0, 2.0, 2.0}}, {1, 2});
        CHECK_THROWS_AS(mmse_project(j, {"X"}, {"Y"}), SingularGram);
    }
    SUBCASE("overlapping groups are rejected") {
        const JointGram j = scalar_awgn(3.0, 1.0);
        CHECK_THROWS_AS(mmse_project(j, {"X"}, {"X"}), InvalidArgument);
    }
}

TEST_CASE("orthogonality_residual detects perturbed coefficients") {
    oracle::Rng rng(42);
    for (int rep = 0; rep < 50; ++rep) {
        const JointGram j = random_joint(rng, {rng.index(1, 3), rng.index(1, 3)});
        const ProjectionResult p = mmse_project(j, {"X"}, {"Y"});
        CHECK(orthogonality_residual(j, p, {"X"}, {"Y"}) <= 1e-10 * j.scale());

        CMatrix a = p.coefficients;
        a(0, 0) += 0.1;
        // Residual row 0 becomes 0.1 * row 0 of R_yy.
        const CMatrix ryy = j.block({"Y"}, {"Y"});
        double expected = 0.0;
        for (std::size_t k = 0; k < ryy.cols(); ++k) {
            expected = std::max(expected, 0.1 * std::abs(ryy(0, k)));
        }
        const double res = orthogonality_residual(j, a, {"X"}, {"Y"});
        CHECK(res > 1e-10 * j.scale());
        CHECK(std::abs(res - expected) <= 1e-10 * j.scale());
    }
}

TEST_CASE("projection matches an elimination oracle and Pythagoras") {
    oracle::Rng rng(43);
    for (int rep = 0; rep < 150; ++rep) {
        const std::size_t nx = rng.index(1, 6);
        const std::size_t ny = rng.index(1, 6);
        const JointGram j = random_joint(rng, {nx, ny});
        const ProjectionResult p = mmse_project(j, {"X"}, {"Y"});
        const auto xi = oracle::range(0, nx);
        const auto yi = oracle::range(nx, nx + ny);
        const double tol = 1e-10 * j.scale();

        CHECK(max_abs_diff(p.coefficients, oracle::projection_coefficients(j.gram().matrix(), xi, yi)) <= 1e-9);
        CHECK(max_abs_diff(p.error_gram.matrix(), oracle::schur_complement(j.gram().matrix(), xi, yi)) <= tol);
        CHECK(max_abs_diff(p.estimate_gram.matrix() + p.error_gram.matrix(), j.block({"X"}, {"X"})) <= tol);
        CHECK(orthogonality_residual(j, p, {"X"}, {"Y"}) <= tol);
        // Error Grams are exactly Hermitian after symmetrization.
        CHECK(conj_transpose(p.error_gram.matrix()) == p.error_gram.matrix());
    }
}

TEST_CASE("uniqueness of the projection") {
    oracle::Rng rng(44);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t nx = rng.index(1, 4);
        const std::size_t ny = rng.index(1, 4);
        const JointGram j = random_joint(rng, {nx, ny});
        const ProjectionResult p = mmse_project(j, {"X"}, {"Y"});
        // An independently solved A' with an equally small residual is the same matrix.
        const CMatrix alt =
            oracle::projection_coefficients(j.gram().matrix(), oracle::range(0, nx), oracle::range(nx, nx + ny));
        CHECK(orthogonality_residual(j, alt, {"X"}, {"Y"}) <= 1e-10 * j.scale());
        CHECK(max_abs_diff(alt, p.coefficients) <= 1e-8);
    }
}

TEST_CASE("mutual_information examples") {
    const MutualInfo awgn = mutual_information(scalar_awgn(3.0, 1.0), {"X"}, {"Y"});
    CHECK_FALSE(awgn.infinite);
    CHECK(std::abs(awgn.nats - std::log(4.0)) <= 1e-12);
    CHECK(std::abs(awgn.bits() - 2.0) <= 1e-12);

    const MutualInfo indep = mutual_information(make_joint(CMatrix{{2.0, 0.0}, {0.0, 5.0}}, {1, 1}), {"X"}, {"Y"});
    CHECK(indep.nats == 0.0);

    const MutualInfo same = mutual_information(make_joint(CMatrix{{2.0, 2.0}, {2.0, 2.0}}, {1, 1}), {"X"}, {"Y"});
    CHECK(same.infinite);
    CHECK(std::isinf(same.bits()));

    const JointGram sing = make_joint(CMatrix{{1.0, 1.0, 0.0}, {1.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}, {2, 1});
    CHECK_THROWS_AS(mutual_information(sing, {"X"}, {"Y"}), SingularGram);
}

TEST_CASE("mutual information is nonnegative and matches the determinant ratio") {
    oracle::Rng rng(45);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t nx = rng.index(1, 5);
        const std::size_t ny = rng.index(1, 5);
        const JointGram j = random_joint(rng, {nx, ny});
        const MutualInfo mi = mutual_information(j, {"X"}, {"Y"});
        REQUIRE_FALSE(mi.infinite);
        CHECK(mi.nats >= -1e-12);
        const double det_route =
            oracle::log_det_real(j.block({"X"}, {"X"})) -
            oracle::log_det_real(oracle::schur_complement(j.gram().matrix(), oracle::range(0, nx),
                                                          oracle::range(nx, nx + ny)));
        CHECK(std::abs(mi.nats - det_route) <= 1e-9);
        // Symmetry of mutual information
        CHECK(std::abs(mi.nats - mutual_information(j, {"Y"}, {"X"}).nats) <= 1e-9);
    }
}

TEST_CASE("conditional_pivots tolerate dependent conditioning sets") {
    // Y holds X1 twice; conditioning on it leaves X2's innovation only.
    const CMatrix g{{1.0, 0.5, 1.0, 1.0}, {0.5, 2.0, 0.5, 0.5}, {1.0, 0.5, 1.0, 1.0}, {1.0, 0.5, 1.0, 1.0}};
    const JointGram j = make_joint(g, {2, 2});
    const auto d = conditional_pivots(j, {"X"}, {"Y"});
    REQUIRE(d.size() == 2);
    CHECK(d[0] == 0.0);
    CHECK(std::abs(d[1] - 1.75) <= 1e-14);
}

TEST_CASE("chain_rule_project examples") {
    SUBCASE("independent Z adds nothing") {
        // X, Y correlated; Z independent of both.
        const CMatrix g{{2.0, 1.0, 0.0}, {1.0, 3.0, 0.0}, {0.0, 0.0, 1.5}};
        const JointGram j = make_joint(g, {1, 1, 1});
        const ProjectionResult two = chain_rule_project(j, {"X"}, {"Y"}, {"Z"});
        const ProjectionResult one = mmse_project(j, {"X"}, {"Y"});
        CHECK(std::abs(two.coefficients(0, 0) - one.coefficients(0, 0)) <= 1e-15);
        CHECK(two.coefficients(0, 1) == cplx{});
        CHECK(max_abs_diff(two.error_gram.matrix(), one.error_gram.matrix()) <= 1e-15);
    }
    SUBCASE("duplicate Z is singular") {
        const CMatrix g{{2.0, 1.0, 1.0}, {1.0, 3.0, 3.0}, {1.0, 3.0, 3.0}};
        CHECK_THROWS_AS(chain_rule_project(make_joint(g, {1, 1, 1}), {"X"}, {"Y"}, {"Z"}), SingularGram);
    }
    SUBCASE("two noisy looks at a scalar") {
        // Y = X + N1, Z = X + N2, unit powers.
        const CMatrix g{{1.0, 1.0, 1.0}, {1.0, 2.0, 1.0}, {1.0, 1.0, 2.0}};
        const JointGram j = make_joint(g, {1, 1, 1});
        const ProjectionResult two = chain_rule_project(j, {"X"}, {"Y"}, {"Z"});
        const CMatrix direct = oracle::projection_coefficients(g, {0}, {1, 2});
        CHECK(max_abs_diff(two.coefficients, direct) <= 1e-12);
        CHECK(std::abs(two.coefficients(0, 0) - cplx{1.0 / 3.0}) <= 1e-15);
        CHECK(std::abs(two.error_gram(0, 0) - cplx{1.0 / 3.0}) <= 1e-15);
    }
}

TEST_CASE("chain rule of MMSE estimation agrees with the direct projection") {
    oracle::Rng rng(46);
    for (int rep = 0; rep < 150; ++rep) {
        const JointGram j = random_joint(rng, {rng.index(1, 6), rng.index(1, 6), rng.index(1, 6)});
        const ProjectionResult two = chain_rule_project(j, {"X"}, {"Y"}, {"Z"});
        const ProjectionResult direct = mmse_project(j, {"X"}, {"Y", "Z"});
        CHECK(max_abs_diff(two.coefficients, direct.coefficients) <= 1e-9);
        CHECK(max_abs_diff(two.error_gram.matrix(), direct.error_gram.matrix()) <= 1e-9);
        CHECK(max_abs_diff(two.estimate_gram.matrix(), direct.estimate_gram.matrix()) <= 1e-9);
    }
}

TEST_CASE("sufficiency of the MMSE estimate") {
    CHECK(sufficiency_check(scalar_awgn(3.0, 1.0), {"X"}, {"Y"}) <= 1e-9);
    CHECK_THROWS_AS(sufficiency_check(make_joint(CMatrix{{2.0, 0.0}, {0.0, 5.0}}, {1, 1}), {"X"}, {"Y"}),
                    SingularGram);

    oracle::Rng rng(47);
    for (int rep = 0; rep < 150; ++rep) {
        // Estimate Gram nonsingular needs |Y| >= |X|.
        const std::size_t nx = rng.index(1, 3);
        const std::size_t ny = nx + rng.index(0, 2);
        const JointGram j = random_joint(rng, {nx, ny});
        CHECK(sufficiency_check(j, {"X"}, {"Y"}) <= 1e-9);
    }
}
