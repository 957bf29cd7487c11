#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <map>
#include <set>
#include <vector>

#include "kikuchi/combinatorics.hpp"

using namespace kikuchi;

TEST_CASE("binomial table basics") {
    CHECK(binom(0, 0) == 1);
    CHECK(binom(6, 2) == 15);
    CHECK(binom(10, 3) == 120);
    CHECK(binom(52, 5) == 2598960ULL);
    CHECK(binom(5, 7) == 0);
    CHECK(binom(5, -1) == 0);
    CHECK_THROWS_AS(binom(300, 150), std::overflow_error);
    CHECK(std::abs(log_binom(52, 5) - std::log(2598960.0)) < 1e-9);
}

TEST_CASE("rank/unrank is the combinadic bijection") {
    for (auto [n, ell] : std::vector<std::pair<int, int>>{{10, 3}, {12, 6}, {8, 1}, {7, 7}}) {
        SubsetIndexer idx(n, ell);
        // Enumerate subsets in colex order with an odometer; ranks must be 0,1,2,...
        std::vector<int> U(ell);
        for (int i = 0; i < ell; ++i) U[i] = i;
        for (uint64_t r = 0; r < idx.dim(); ++r) {
            REQUIRE(idx.rank(U) == r);
            std::vector<int> back = idx.unrank(r);
            REQUIRE(back == U);
            int i = 0;
            while (i + 1 < ell && U[i] + 1 == U[i + 1]) ++i;
            ++U[i];
            for (int j = 0; j < i; ++j) U[j] = j;
        }
    }
}

TEST_CASE("kikuchi_stats matches direct counting") {
    // delta at (n=8, k=4, ell=4): for fixed S, count U with |U cap S| = 2.
    int n = 8, k = 4, ell = 4;
    SubsetIndexer idx(n, ell);
    std::vector<int> S{0, 1, 2, 3};
    uint64_t count = 0;
    for (uint64_t r = 0; r < idx.dim(); ++r) {
        auto U = idx.unrank(r);
        int inter = 0;
        for (int x : U)
            if (x < 4) ++inter;
        if (inter == 2) ++count;
    }
    KikuchiStats st = kikuchi_stats(n, k, ell, 100.0);
    CHECK(count == binom(n - k, ell - k / 2) * binom(k, k / 2));
    CHECK(st.delta == Catch::Approx(static_cast<double>(count) / idx.dim()));
    CHECK(st.d == Catch::Approx(100.0 * st.delta));
    CHECK(st.Delta == Catch::Approx(static_cast<double>(binom(n - ell, 2) * binom(ell, 2))));
    CHECK(st.E == Catch::Approx(0.5 * 100.0 * count));
    // (6,2,2): delta = 8/15.
    CHECK(kikuchi_stats(6, 2, 2, 1.0).delta == Catch::Approx(8.0 / 15.0));
}

TEST_CASE("embedded sparsity delta_S") {
    // n = 12 with k = 4 blocks of 3, ell = 4 so c = 1:
    // delta_S = C(4,2) * 1^2 * 2^2 / 3^4 = 24/81.
    KikuchiStats st = kikuchi_stats(12, 4, 4, 50.0);
    CHECK(st.delta_S == Catch::Approx(24.0 / 81.0));
    CHECK(st.d_S == Catch::Approx(50.0 * 24.0 / 81.0));
    CHECK(st.Delta_S_max == Catch::Approx(24.0));
}

TEST_CASE("Eberlein polynomials diagonalize the Johnson scheme") {
    // Brute force: eigenvalues of the distance-i graph of J(n, ell) must be
    // { eberlein(n, ell, i, r) } with multiplicities C(n,r) - C(n,r-1).
    for (auto [n, ell] : std::vector<std::pair<int, int>>{{8, 2}, {9, 3}}) {
        SubsetIndexer idx(n, ell);
        int dim = static_cast<int>(idx.dim());
        std::vector<std::vector<int>> subs(dim);
        for (int r = 0; r < dim; ++r) subs[r] = idx.unrank(r);
        for (int i = 1; i <= ell; ++i) {
            Eigen::MatrixXd A = Eigen::MatrixXd::Zero(dim, dim);
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) {
                    std::set<int> s(subs[a].begin(), subs[a].end());
                    int inter = 0;
                    for (int x : subs[b]) inter += s.count(x);
                    if (ell - inter == i) A(a, b) = 1.0;
                }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
            // Expected multiset.
            std::vector<double> expected;
            for (int r = 0; r <= ell; ++r) {
                int mult = static_cast<int>(johnson_multiplicity(n, ell, r));
                for (int t = 0; t < mult; ++t) expected.push_back(eberlein(n, ell, i, r));
            }
            REQUIRE(static_cast<int>(expected.size()) == dim);
            std::sort(expected.begin(), expected.end());
            for (int t = 0; t < dim; ++t) CHECK(es.eigenvalues()(t) == Catch::Approx(expected[t]).margin(1e-7));
        }
    }
    CHECK(eberlein(10, 4, 1, 4) == Catch::Approx(-4.0));  // lambda_ell(n, ell, 1) = -ell
}

TEST_CASE("Johnson multiplicities sum to the dimension") {
    double total = 0;
    for (int r = 0; r <= 4; ++r) total += johnson_multiplicity(12, 4, r);
    CHECK(total == Catch::Approx(static_cast<double>(binom(12, 4))));
}
