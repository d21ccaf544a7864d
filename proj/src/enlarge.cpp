#include "wbe/enlarge.hpp"

#include <cmath>

#include "wbe/channel.hpp"

namespace wbe {

Enlargement make_enlargement(Matrix q, CodeMatrix core) {
    if (q.rows() != q.cols()) throw std::invalid_argument("enlargement: q must be square");
    if (!is_unitary(q, 1e-9)) throw std::invalid_argument("enlargement: q is not unitary");
    Enlargement e;
    e.d = q.rows();
    e.q = std::move(q);
    e.core = std::move(core);
    return e;
}

CodeMatrix enlarge(const Matrix& q, const CodeMatrix& core) {
    if (q.rows() != q.cols() || !is_unitary(q, 1e-9))
        throw std::invalid_argument("enlarge: q is not unitary");
    return CodeMatrix::from_matrix(kron(q, core.mat));
}

CodeMatrix enlarge_hadamard(int d, const CodeMatrix& core) {
    if (!core.binary) throw std::invalid_argument("enlarge_hadamard: core must be binary");
    const Matrix h = hadamard(d);
    std::vector<std::int8_t> signs(static_cast<std::size_t>(d) * d * core.chips * core.users);
    const int out_users = d * core.users;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const int hs = h(i, j) > 0 ? 1 : -1;
            for (int k = 0; k < core.chips; ++k)
                for (int l = 0; l < core.users; ++l)
                    signs[static_cast<std::size_t>(i * core.chips + k) * out_users +
                          (j * core.users + l)] =
                        static_cast<std::int8_t>(hs * core.sign_at(k, l));
        }
    return CodeMatrix::from_signs(d * core.chips, d * core.users, std::move(signs));
}

bool gram_structure_check(const Matrix& q, const CodeMatrix& core) {
    if (q.rows() != q.cols()) throw std::invalid_argument("gram check: q must be square");
    const Matrix enlarged = kron(q, core.mat);
    const Matrix gram = mat_mul(transpose(enlarged), enlarged);
    const Matrix target = kron(Matrix::identity(q.rows()), mat_mul(transpose(core.mat), core.mat));
    return max_abs_diff(gram, target) <= 1e-9;
}

bool gram_structure_check(const Enlargement& e) { return gram_structure_check(e.q, e.core); }

Matrix random_orthogonal(int d, std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("random_orthogonal: d must be >= 1");
    RngStream rng(seed, 0, 0);
    // Modified Gram-Schmidt on Gaussian columns; redraw on near-dependence.
    Matrix q(d, d);
    for (int j = 0; j < d; ++j) {
        for (int attempt = 0;; ++attempt) {
            if (attempt > 100)
                throw std::runtime_error("random_orthogonal: could not orthogonalize");
            std::vector<double> v(d);
            for (auto& x : v) x = rng.gaussian();
            for (int p = 0; p < j; ++p) {
                double dot = 0.0;
                for (int i = 0; i < d; ++i) dot += q(i, p) * v[i];
                for (int i = 0; i < d; ++i) v[i] -= dot * q(i, p);
            }
            double norm = 0.0;
            for (double x : v) norm += x * x;
            norm = std::sqrt(norm);
            if (norm > 1e-6) {
                for (int i = 0; i < d; ++i) q(i, j) = v[i] / norm;
                break;
            }
        }
    }
    return q;
}

}  // namespace wbe
