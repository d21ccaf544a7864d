#include "wbe/decoders.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace wbe {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Lexicographic order on candidate masks, coordinate 0 first, -1 < +1.
// Bit k set means x_k = +1, so the candidate with a 0 at the first
// differing bit is the smaller one.
bool lex_less(std::uint32_t a, std::uint32_t b) {
    const std::uint32_t d = a ^ b;
    if (d == 0) return false;
    return (a & (d & -d)) == 0;
}

std::vector<double> mask_to_vec(std::uint32_t mask, int k) {
    std::vector<double> x(k);
    for (int j = 0; j < k; ++j) x[j] = (mask >> j) & 1u ? 1.0 : -1.0;
    return x;
}

struct MlResult {
    std::uint32_t mask = 0;
    double dist = 0.0;
};

// Exhaustive core search against one received block. Gray-code enumeration:
// the candidate image is updated in O(L) per bit flip. Binary codes keep the
// image in exact integer arithmetic so colliding candidates produce
// bit-identical distances and the tie rule engages deterministically.
MlResult ml_enumerate(const CodeMatrix& c, const double* y) {
    const int k = c.users;
    const int l = c.chips;
    const std::uint32_t count = 1u << k;

    MlResult best;
    std::uint32_t mask = 0;

    if (c.binary) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(l));
        // Column-major copy of the sign pattern for the inner loop.
        std::vector<int> cols(static_cast<std::size_t>(k) * l);
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < l; ++i) cols[static_cast<std::size_t>(j) * l + i] = c.sign_at(i, j);
        std::vector<int> u(l, 0);  // S * x, exact
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < l; ++i) u[i] -= cols[static_cast<std::size_t>(j) * l + i];

        auto dist_of = [&]() {
            double d = 0.0;
            for (int i = 0; i < l; ++i) {
                const double r = y[i] - scale * u[i];
                d += r * r;
            }
            return d;
        };

        best.mask = 0;
        best.dist = dist_of();
        for (std::uint32_t t = 1; t < count; ++t) {
            const int bit = std::countr_zero(t);
            const int old = (mask >> bit) & 1u ? 1 : -1;
            mask ^= 1u << bit;
            const int* col = &cols[static_cast<std::size_t>(bit) * l];
            const int step = -2 * old;
            for (int i = 0; i < l; ++i) u[i] += step * col[i];
            const double d = dist_of();
            if (d < best.dist || (d == best.dist && lex_less(mask, best.mask))) {
                best.dist = d;
                best.mask = mask;
            }
        }
        return best;
    }

    std::vector<double> cols(static_cast<std::size_t>(k) * l);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < l; ++i) cols[static_cast<std::size_t>(j) * l + i] = c.mat(i, j);
    std::vector<double> w(l, 0.0);  // C * x
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < l; ++i) w[i] -= cols[static_cast<std::size_t>(j) * l + i];

    auto dist_of = [&]() {
        double d = 0.0;
        for (int i = 0; i < l; ++i) {
            const double r = y[i] - w[i];
            d += r * r;
        }
        return d;
    };

    best.mask = 0;
    best.dist = dist_of();
    for (std::uint32_t t = 1; t < count; ++t) {
        const int bit = std::countr_zero(t);
        const double old = (mask >> bit) & 1u ? 1.0 : -1.0;
        mask ^= 1u << bit;
        const double* col = &cols[static_cast<std::size_t>(bit) * l];
        const double step = -2.0 * old;
        for (int i = 0; i < l; ++i) w[i] += step * col[i];
        const double d = dist_of();
        if (d < best.dist || (d == best.dist && lex_less(mask, best.mask))) {
            best.dist = d;
            best.mask = mask;
        }
    }
    return best;
}

}  // namespace

DecoderOutcome decode_ml(const CodeMatrix& c, const std::vector<double>& y) {
    require(c.users <= 24, "decode_ml: K too large for exhaustive search");
    require(y.size() == static_cast<std::size_t>(c.chips), "decode_ml: length mismatch");
    const MlResult r = ml_enumerate(c, y.data());
    DecoderOutcome out;
    out.x_hat = mask_to_vec(r.mask, c.users);
    out.distance_evals = 1ull << c.users;
    out.objective = r.dist;
    return out;
}

std::vector<double> rotate_to_core_frame(const Enlargement& e, const std::vector<double>& y) {
    const int d = e.d;
    const int l = e.core.chips;
    require(y.size() == static_cast<std::size_t>(d) * l, "rotate: length mismatch");
    std::vector<double> yp(y.size(), 0.0);
    for (int b = 0; b < d; ++b)
        for (int j = 0; j < d; ++j) {
            const double qjb = e.q(j, b);
            if (qjb == 0.0) continue;
            for (int i = 0; i < l; ++i) yp[b * l + i] += qjb * y[j * l + i];
        }
    return yp;
}

DecoderOutcome decode_decoupled(const Enlargement& e, const std::vector<double>& y) {
    require(e.core.users <= 24, "decode_decoupled: core K too large");
    const std::vector<double> yp = rotate_to_core_frame(e, y);
    const int d = e.d;
    const int k = e.core.users;
    const int l = e.core.chips;
    DecoderOutcome out;
    out.x_hat.resize(static_cast<std::size_t>(d) * k);
    out.objective = 0.0;
    for (int b = 0; b < d; ++b) {
        const MlResult r = ml_enumerate(e.core, yp.data() + static_cast<std::size_t>(b) * l);
        for (int j = 0; j < k; ++j)
            out.x_hat[static_cast<std::size_t>(b) * k + j] = (r.mask >> j) & 1u ? 1.0 : -1.0;
        out.objective += r.dist;
    }
    out.distance_evals = static_cast<std::uint64_t>(d) << k;
    return out;
}

AmlSplit choose_split(const CodeMatrix& c) {
    const int l = c.chips;
    const int k = c.users;
    if (k < l) throw singular_matrix_error("choose_split: fewer columns than rows");
    Matrix w = c.mat;
    std::vector<bool> col_used(k, false), row_used(l, false);
    std::vector<int> selected;
    selected.reserve(l);
    for (int step = 0; step < l; ++step) {
        double best = 0.0;
        int bi = -1, bj = -1;
        for (int i = 0; i < l; ++i) {
            if (row_used[i]) continue;
            for (int j = 0; j < k; ++j) {
                if (col_used[j]) continue;
                if (std::abs(w(i, j)) > best) {
                    best = std::abs(w(i, j));
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best < 1e-12)
            throw singular_matrix_error("choose_split: code is rank deficient");
        col_used[bj] = true;
        row_used[bi] = true;
        selected.push_back(bj);
        for (int r = 0; r < l; ++r) {
            if (row_used[r]) continue;
            const double f = w(r, bj) / w(bi, bj);
            if (f == 0.0) continue;
            for (int j = 0; j < k; ++j) w(r, j) -= f * w(bi, j);
        }
    }

    AmlSplit split;
    split.perm = selected;
    for (int j = 0; j < k; ++j)
        if (!col_used[j]) split.perm.push_back(j);

    split.a = Matrix(l, l);
    for (int p = 0; p < l; ++p)
        for (int i = 0; i < l; ++i) split.a(i, p) = c.mat(i, split.perm[p]);
    if (k > l) {
        split.b = Matrix(l, k - l);
        for (int p = 0; p < k - l; ++p)
            for (int i = 0; i < l; ++i) split.b(i, p) = c.mat(i, split.perm[l + p]);
    }
    split.a_inv = invert(split.a);
    split.a_is_unitary = is_unitary(split.a, 1e-9);
    return split;
}

DecoderOutcome decode_aml(const CodeMatrix& c, const std::vector<double>& y,
                          const AmlSplit& split) {
    const int l = c.chips;
    const int k = c.users;
    const int tail = k - l;
    require(tail >= 0 && tail <= 24, "decode_aml: tail too large for enumeration");
    require(y.size() == static_cast<std::size_t>(l), "decode_aml: length mismatch");
    require(split.perm.size() == static_cast<std::size_t>(k), "decode_aml: split/code mismatch");

    const std::vector<double> ainv_y = mat_vec(split.a_inv, y);
    Matrix m;  // A^-1 B, column-accessed
    if (tail > 0) m = mat_mul(split.a_inv, split.b);

    auto cost_of = [l](const std::vector<double>& z) {
        double cst = 0.0;
        for (int i = 0; i < l; ++i) {
            const double r = std::abs(z[i]) - 1.0;
            cst += r * r;
        }
        return cst;
    };
    auto z_for = [&](std::uint32_t mask) {
        std::vector<double> z = ainv_y;
        for (int p = 0; p < tail; ++p) {
            const double x2 = (mask >> p) & 1u ? 1.0 : -1.0;
            for (int i = 0; i < l; ++i) z[i] -= m(i, p) * x2;
        }
        return z;
    };

    std::uint32_t best_mask = 0;
    {
        std::vector<double> z = z_for(0);
        double best = cost_of(z);
        std::uint32_t mask = 0;
        const std::uint32_t count = 1u << tail;
        for (std::uint32_t t = 1; t < count; ++t) {
            const int bit = std::countr_zero(t);
            const double old = (mask >> bit) & 1u ? 1.0 : -1.0;
            mask ^= 1u << bit;
            for (int i = 0; i < l; ++i) z[i] += 2.0 * old * m(i, bit);
            const double cst = cost_of(z);
            if (cst < best || (cst == best && lex_less(mask, best_mask))) {
                best = cst;
                best_mask = mask;
            }
        }
    }

    // Recompute the winning candidate fresh.
    const std::vector<double> z = z_for(best_mask);
    const std::vector<double> x1 = sign_vec(z);
    DecoderOutcome out;
    out.x_hat.assign(k, 0.0);
    for (int p = 0; p < l; ++p) out.x_hat[split.perm[p]] = x1[p];
    for (int p = 0; p < tail; ++p)
        out.x_hat[split.perm[l + p]] = (best_mask >> p) & 1u ? 1.0 : -1.0;
    double obj = 0.0;
    for (int i = 0; i < l; ++i) {
        const double r = z[i] - x1[i];
        obj += r * r;
    }
    out.objective = obj;
    out.distance_evals = 1ull << tail;
    return out;
}

double max_gram_eigenvalue(const CodeMatrix& c) {
    const Matrix gram = mat_mul(transpose(c.mat), c.mat);
    const int k = c.users;
    std::vector<double> v(k);
    for (int i = 0; i < k; ++i) v[i] = 1.0 + 1e-3 * i;  // deterministic, not an eigenvector
    double lambda = 0.0;
    for (int it = 0; it < 50; ++it) {
        std::vector<double> gv = mat_vec(gram, v);
        double norm = 0.0;
        for (double x : gv) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (auto& x : gv) x /= norm;
        double next = 0.0;
        const std::vector<double> ggv = mat_vec(gram, gv);
        for (int i = 0; i < k; ++i) next += gv[i] * ggv[i];
        v = std::move(gv);
        if (std::abs(next - lambda) <= 1e-6 * std::max(1.0, std::abs(next))) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return lambda;
}

DecoderOutcome decode_iterative(const CodeMatrix& c, const std::vector<double>& y,
                                IterativeParams params) {
    require(params.iterations >= 1, "decode_iterative: iterations must be >= 1");
    require(y.size() == static_cast<std::size_t>(c.chips), "decode_iterative: length mismatch");
    double mu = params.step;
    if (mu == 0.0) mu = 1.0 / max_gram_eigenvalue(c);
    require(mu > 0.0, "decode_iterative: step must be positive");

    const int k = c.users;
    std::vector<double> s(k, 0.0);
    for (int t = 0; t < params.iterations; ++t) {
        const std::vector<double> cs = mat_vec(c.mat, s);
        std::vector<double> resid(c.chips);
        for (int i = 0; i < c.chips; ++i) resid[i] = y[i] - cs[i];
        for (int j = 0; j < k; ++j) {
            double grad = 0.0;
            for (int i = 0; i < c.chips; ++i) grad += c.mat(i, j) * resid[i];
            s[j] = std::clamp(s[j] + mu * grad, -1.0, 1.0);
        }
    }

    DecoderOutcome out;
    out.x_hat = sign_vec(s);
    out.distance_evals = static_cast<std::uint64_t>(params.iterations);
    const std::vector<double> img = c.times(out.x_hat);
    double obj = 0.0;
    for (int i = 0; i < c.chips; ++i) {
        const double r = y[i] - img[i];
        obj += r * r;
    }
    out.objective = obj;
    return out;
}

}  // namespace wbe
