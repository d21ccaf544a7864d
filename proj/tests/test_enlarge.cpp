#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "wbe/enlarge.hpp"

using wbe::CodeMatrix;
using wbe::Matrix;

namespace {

Matrix scaled_hadamard(int d) {
    Matrix h = wbe::hadamard(d);
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) h(i, j) *= s;
    return h;
}

CodeMatrix core_7x8() { return CodeMatrix::from_signs(7, 8, wbe::row_deleted_hadamard_signs(8, 0)); }

// Orthonormal-column core (under-loaded WBE): 2 columns of H_4 / 2.
CodeMatrix orthonormal_core() {
    const Matrix h = wbe::hadamard(4);
    Matrix m(4, 2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = h(i, j) * 0.5;
    return CodeMatrix::from_matrix(std::move(m));
}

}  // namespace

TEST_CASE("enlarge 56x64") {
    const CodeMatrix big = wbe::enlarge(scaled_hadamard(8), core_7x8());
    CHECK(big.chips == 56);
    CHECK(big.users == 64);
    CHECK(std::abs(wbe::tsc(big) - 512.0 / 7.0) < 1e-9);
    CHECK(std::abs(wbe::welch_bound(56, 64) - 512.0 / 7.0) < 1e-12);
    CHECK(wbe::classify(big).is_wbe);
}

TEST_CASE("enlarge by identity is block diagonal") {
    const CodeMatrix core = core_7x8();
    const CodeMatrix big = wbe::enlarge(Matrix::identity(3), core);
    for (int bi = 0; bi < 3; ++bi)
        for (int bj = 0; bj < 3; ++bj)
            for (int i = 0; i < 7; ++i)
                for (int j = 0; j < 8; ++j) {
                    const double v = big.mat(bi * 7 + i, bj * 8 + j);
                    if (bi == bj)
                        CHECK(v == core.mat(i, j));
                    else
                        CHECK(v == 0.0);
                }
}

TEST_CASE("enlarge rejects non-unitary q") {
    Matrix q = Matrix::identity(2);
    q(0, 0) = 2.0;
    q(1, 1) = 2.0;
    CHECK_THROWS_AS(wbe::enlarge(q, core_7x8()), std::invalid_argument);
    CHECK_FALSE(wbe::gram_structure_check(q, core_7x8()));
    CHECK_THROWS_AS(wbe::make_enlargement(q, core_7x8()), std::invalid_argument);
}

TEST_CASE("tsc scaling and gram structure under random unitary q") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 4);
        const Matrix q = oracle::random_orthogonal_oracle(d, rng);
        const int l = 2 + static_cast<int>(rng() % 4);
        const int k = 1 + static_cast<int>(rng() % 6);
        const CodeMatrix core = oracle::random_normalized_code(l, k, rng);
        const CodeMatrix big = wbe::enlarge(q, core);
        CHECK(std::abs(wbe::tsc(big) - d * wbe::tsc(core)) < 1e-9);
        CHECK(wbe::gram_structure_check(q, core));
    }
}

TEST_CASE("WBE preservation, both load branches") {
    std::mt19937_64 rng(53);
    // Over-loaded core: 7x8 row-deleted Hadamard.
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix q = oracle::random_orthogonal_oracle(4, rng);
        const CodeMatrix big = wbe::enlarge(q, core_7x8());
        CHECK(wbe::classify(big).is_wbe);
    }
    // Under-loaded core: orthonormal columns.
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix q = oracle::random_orthogonal_oracle(3, rng);
        const CodeMatrix big = wbe::enlarge(q, orthonormal_core());
        CHECK(wbe::classify(big).is_wbe);
        CHECK(big.users <= big.chips);
    }
    // Over-loaded real-valued core: a randomly rotated tight frame of three
    // unit vectors in the plane (TSC = 9/2, the Welch bound for 2x3).
    for (int trial = 0; trial < 5; ++trial) {
        const double theta = oracle::uniform(rng, 0.0, 6.28);
        Matrix frame(2, 3);
        for (int j = 0; j < 3; ++j) {
            frame(0, j) = std::cos(theta + j * 2.0943951023931953);
            frame(1, j) = std::sin(theta + j * 2.0943951023931953);
        }
        const CodeMatrix core = CodeMatrix::from_matrix(std::move(frame));
        CHECK(std::abs(wbe::tsc(core) - 4.5) < 1e-9);
        CHECK(wbe::classify(core).is_wbe);
        const Matrix q = oracle::random_orthogonal_oracle(4, rng);
        const CodeMatrix big = wbe::enlarge(q, core);
        CHECK(std::abs(wbe::tsc(big) - 4.0 * wbe::tsc(core)) < 1e-9);
        CHECK(wbe::classify(big).is_wbe);
    }
}

TEST_CASE("enlarge_hadamard") {
    const CodeMatrix core = core_7x8();

    const CodeMatrix same = wbe::enlarge_hadamard(1, core);
    CHECK(same.signs == core.signs);

    const CodeMatrix big = wbe::enlarge_hadamard(8, core);
    CHECK(big.binary);
    CHECK(big.chips == 56);
    CHECK(big.users == 64);
    const double entry = 1.0 / std::sqrt(56.0);
    for (double v : big.mat.data()) CHECK(std::abs(std::abs(v) - entry) < 1e-15);

    // Sign pattern is the Kronecker product of the sign patterns.
    const Matrix h = wbe::hadamard(8);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            for (int p = 0; p < 7; ++p)
                for (int l = 0; l < 8; ++l)
                    CHECK(big.sign_at(i * 7 + p, j * 8 + l) ==
                          (h(i, j) > 0 ? 1 : -1) * core.sign_at(p, l));

    // H_2 (x) H_2 is exactly the Sylvester H_4.
    const CodeMatrix h2code = CodeMatrix::from_signs(2, 2, {1, 1, 1, -1});
    const CodeMatrix h4built = wbe::enlarge_hadamard(2, h2code);
    const Matrix h4 = wbe::hadamard(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(h4built.sign_at(i, j) == (h4(i, j) > 0 ? 1 : -1));

    CHECK_THROWS_AS(wbe::enlarge_hadamard(2, orthonormal_core()), std::invalid_argument);
    CHECK_THROWS_AS(wbe::enlarge_hadamard(3, core), std::invalid_argument);
}

TEST_CASE("gram structure fuzz") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = 2 + static_cast<int>(rng() % 3);
        const Matrix q = oracle::random_orthogonal_oracle(d, rng);
        const CodeMatrix core =
            oracle::random_normalized_code(2 + static_cast<int>(rng() % 3),
                                           1 + static_cast<int>(rng() % 4), rng);
        CHECK(wbe::gram_structure_check(q, core));
    }
}

TEST_CASE("injectivity transfers through enlargement") {
    // Non-injective core: columns 0 and 2 equal.
    const CodeMatrix bad = CodeMatrix::from_signs(2, 3, {1, 1, 1, 1, -1, 1});
    CHECK_FALSE(wbe::check_binary_injectivity(bad).injective);
    // Injective core.
    const CodeMatrix good = CodeMatrix::from_signs(3, 3, {1, 1, 1, 1, -1, 1, 1, 1, -1});
    CHECK(wbe::check_binary_injectivity(good).injective);

    // Hadamard enlargement keeps everything binary: use the exact oracle.
    CHECK_FALSE(wbe::check_binary_injectivity(wbe::enlarge_hadamard(2, bad)).injective);
    CHECK(wbe::check_binary_injectivity(wbe::enlarge_hadamard(2, good)).injective);

    // General orthogonal q: enumerate all inputs of the materialized code and
    // compare images pairwise.
    std::mt19937_64 rng(61);
    const Matrix q = oracle::random_orthogonal_oracle(2, rng);
    auto enumerate_injective = [&](const CodeMatrix& core) {
        const CodeMatrix big = wbe::enlarge(q, core);
        const int k = big.users;
        const std::uint32_t count = 1u << k;
        std::vector<std::vector<double>> images(count);
        for (std::uint32_t m = 0; m < count; ++m)
            images[m] = wbe::mat_vec(big.mat, oracle::mask_to_pm1(m, k));
        for (std::uint32_t a = 0; a < count; ++a)
            for (std::uint32_t b = a + 1; b < count; ++b) {
                double diff = 0.0;
                for (std::size_t i = 0; i < images[a].size(); ++i)
                    diff = std::max(diff, std::abs(images[a][i] - images[b][i]));
                if (diff <= 1e-9) return false;
            }
        return true;
    };
    CHECK_FALSE(enumerate_injective(bad));
    CHECK(enumerate_injective(good));
}
