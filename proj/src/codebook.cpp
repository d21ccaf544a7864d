#include "wbe/codebook.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>

namespace wbe {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// Raw integer TSC: sum of squared Gram entries of the sign pattern.
// tsc = raw / L^2 for a binary code with implicit 1/sqrt(L) scale.
long long raw_sign_tsc(const std::vector<std::int8_t>& s, int chips, int users) {
    long long total = 0;
    for (int i = 0; i < users; ++i)
        for (int j = 0; j < users; ++j) {
            long long g = 0;
            for (int l = 0; l < chips; ++l)
                g += static_cast<long long>(s[static_cast<std::size_t>(l) * users + i]) *
                     s[static_cast<std::size_t>(l) * users + j];
            total += g * g;
        }
    return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// CodeMatrix
// ---------------------------------------------------------------------------

CodeMatrix CodeMatrix::from_signs(int chips, int users, std::vector<std::int8_t> signs) {
    require(chips >= 1 && users >= 1, "code dimensions must be positive");
    require(signs.size() == static_cast<std::size_t>(chips) * users,
            "sign pattern size does not match dimensions");
    for (std::int8_t v : signs) require(v == 1 || v == -1, "sign entries must be +-1");
    CodeMatrix c;
    c.chips = chips;
    c.users = users;
    c.binary = true;
    c.signs = std::move(signs);
    const double scale = 1.0 / std::sqrt(static_cast<double>(chips));
    Matrix m(chips, users);
    for (int i = 0; i < chips; ++i)
        for (int j = 0; j < users; ++j) m(i, j) = scale * c.sign_at(i, j);
    c.mat = std::move(m);
    return c;
}

CodeMatrix CodeMatrix::from_matrix(Matrix m) {
    CodeMatrix c;
    c.chips = m.rows();
    c.users = m.cols();
    for (int j = 0; j < c.users; ++j) {
        double norm2 = 0.0;
        for (int i = 0; i < c.chips; ++i) norm2 += m(i, j) * m(i, j);
        require(std::abs(std::sqrt(norm2) - 1.0) <= 1e-9,
                "code columns must have unit norm");
    }
    c.mat = std::move(m);
    return c;
}

std::vector<double> CodeMatrix::times(const std::vector<double>& x) const {
    require(x.size() == static_cast<std::size_t>(users), "times: length mismatch");
    if (!binary) return mat_vec(mat, x);
    // Exact integer image, one rounding at the final scale.
    const double scale = 1.0 / std::sqrt(static_cast<double>(chips));
    std::vector<double> y(chips);
    for (int i = 0; i < chips; ++i) {
        long long acc = 0;
        for (int j = 0; j < users; ++j)
            acc += sign_at(i, j) * (x[j] > 0.0 ? 1 : -1);
        y[i] = scale * static_cast<double>(acc);
    }
    return y;
}

// ---------------------------------------------------------------------------
// Bounds and classification
// ---------------------------------------------------------------------------

Matrix hadamard(int d) {
    require(is_power_of_two(d), "hadamard: order must be a power of two");
    Matrix h(1, 1, {1.0});
    for (int n = 1; n < d; n *= 2) {
        Matrix next(2 * n, 2 * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = h(i, j);
                next(i, j) = v;
                next(i, j + n) = v;
                next(i + n, j) = v;
                next(i + n, j + n) = -v;
            }
        h = std::move(next);
    }
    return h;
}

std::vector<std::int8_t> row_deleted_hadamard_signs(int order, int dropped_row) {
    require(dropped_row >= 0 && dropped_row < order, "dropped row out of range");
    const Matrix h = hadamard(order);
    std::vector<std::int8_t> s;
    s.reserve(static_cast<std::size_t>(order - 1) * order);
    for (int i = 0; i < order; ++i) {
        if (i == dropped_row) continue;
        for (int j = 0; j < order; ++j) s.push_back(h(i, j) > 0 ? 1 : -1);
    }
    return s;
}

double tsc(const CodeMatrix& c) {
    if (c.binary) {
        const long long raw = raw_sign_tsc(c.signs, c.chips, c.users);
        return static_cast<double>(raw) /
               (static_cast<double>(c.chips) * static_cast<double>(c.chips));
    }
    const Matrix gram = mat_mul(transpose(c.mat), c.mat);
    double total = 0.0;
    for (double v : gram.data()) total += v * v;
    return total;
}

double welch_bound(int chips, int users) {
    require(chips >= 1 && users >= 1, "welch_bound: dimensions must be positive");
    if (users <= chips) return static_cast<double>(users);
    return static_cast<double>(users) * users / chips;
}

namespace {

double kp_underloaded(int chips, int users) {
    const double l = chips;
    const double k = users;
    if (chips % 4 == 0) return k;
    if (chips % 4 == 2) {
        if (users % 2 == 0) return k + 2.0 * k * (k - 2.0) / (l * l);
        return k + 2.0 * ((k - 1.0) / l) * ((k - 1.0) / l);
    }
    return k + k * (k - 1.0) / (l * l);  // L odd
}

double kp_overloaded(int chips, int users) {
    const double l = chips;
    const double k = users;
    if (users % 4 == 0) return k * k / l;
    if (users % 4 == 2) {
        if (chips % 2 == 0) return k * k / l + 2.0 * (l - 2.0) / l;
        return k * k / l + 2.0 * ((l - 1.0) / l) * ((l - 1.0) / l);
    }
    return k * k / l + (l - 1.0) / l;  // K odd
}

}  // namespace

double kp_bound(int chips, int users) {
    require(chips >= 1 && users >= 1, "kp_bound: dimensions must be positive");
    if (users < chips) return kp_underloaded(chips, users);
    if (users > chips) return kp_overloaded(chips, users);
    // Both tables cover K == L; they must agree there.
    const double a = kp_underloaded(chips, users);
    const double b = kp_overloaded(chips, users);
    if (std::abs(a - b) > 1e-9)
        throw std::logic_error("kp_bound: under/over-loaded tables disagree at K == L");
    return a;
}

TscReport classify(const CodeMatrix& c) {
    TscReport r;
    r.tsc = tsc(c);
    r.welch = welch_bound(c.chips, c.users);
    r.kp = kp_bound(c.chips, c.users);
    const double k2 = static_cast<double>(c.users) * c.users;
    r.is_wbe = r.tsc <= r.welch + 1e-9 * k2;
    r.is_bwbe_candidate = c.binary && r.tsc <= r.kp + 1e-6;
    return r;
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

namespace {

std::vector<std::int8_t> random_signs(int chips, int users, std::mt19937_64& rng) {
    std::vector<std::int8_t> s(static_cast<std::size_t>(chips) * users);
    for (auto& v : s) v = (rng() >> 63) ? 1 : -1;
    return s;
}

// Gram matrix of a sign pattern, K x K row-major.
std::vector<long long> sign_gram(const std::vector<std::int8_t>& s, int chips, int users) {
    std::vector<long long> g(static_cast<std::size_t>(users) * users, 0);
    for (int i = 0; i < users; ++i)
        for (int j = 0; j < users; ++j) {
            long long acc = 0;
            for (int l = 0; l < chips; ++l)
                acc += static_cast<long long>(s[static_cast<std::size_t>(l) * users + i]) *
                       s[static_cast<std::size_t>(l) * users + j];
            g[static_cast<std::size_t>(i) * users + j] = acc;
        }
    return g;
}

long long gram_sq_sum(const std::vector<long long>& g) {
    long long total = 0;
    for (long long v : g) total += v * v;
    return total;
}

}  // namespace

SearchResult min_tsc_search(int chips, int users, long budget, std::uint64_t seed,
                            const std::vector<std::int8_t>* warm_start) {
    require(budget >= 1, "min_tsc_search: budget must be >= 1");
    require(chips >= 1 && users >= 1, "min_tsc_search: dimensions must be positive");
    const double l2 = static_cast<double>(chips) * chips;
    const double kp = kp_bound(chips, users);

    std::mt19937_64 rng(seed);
    std::vector<std::int8_t> s =
        warm_start ? *warm_start : random_signs(chips, users, rng);
    require(s.size() == static_cast<std::size_t>(chips) * users,
            "min_tsc_search: warm start size mismatch");
    std::vector<long long> gram = sign_gram(s, chips, users);
    long long cur = gram_sq_sum(gram);

    SearchResult best;
    long long best_raw = cur;
    std::vector<std::int8_t> best_signs = s;
    best.trace.push_back(static_cast<double>(cur) / l2);

    auto at = [users](const std::vector<std::int8_t>& v, int l, int k) -> std::int8_t {
        return v[static_cast<std::size_t>(l) * users + k];
    };

    // Moves = applied flips plus restarts, both charged against the budget.
    for (long moves = 0; moves < budget; ++moves) {
        if (static_cast<double>(best_raw) / l2 <= kp + 1e-9) break;

        long long best_delta = 0;
        int bl = -1, bk = -1;
        for (int l = 0; l < chips; ++l)
            for (int k = 0; k < users; ++k) {
                const int slk = at(s, l, k);
                long long delta = 0;
                for (int j = 0; j < users; ++j) {
                    if (j == k) continue;
                    const long long g = gram[static_cast<std::size_t>(k) * users + j];
                    const long long gn = g - 2LL * slk * at(s, l, j);
                    delta += gn * gn - g * g;
                }
                delta *= 2;  // entries (k,j) and (j,k) change together
                if (delta < best_delta) {
                    best_delta = delta;
                    bl = l;
                    bk = k;
                }
            }

        if (bk < 0) {
            // Local minimum above the bound: restart.
            s = random_signs(chips, users, rng);
            gram = sign_gram(s, chips, users);
            cur = gram_sq_sum(gram);
        } else {
            const int old = at(s, bl, bk);
            for (int j = 0; j < users; ++j) {
                if (j == bk) continue;
                const long long upd = -2LL * old * at(s, bl, j);
                gram[static_cast<std::size_t>(bk) * users + j] += upd;
                gram[static_cast<std::size_t>(j) * users + bk] += upd;
            }
            s[static_cast<std::size_t>(bl) * users + bk] = static_cast<std::int8_t>(-old);
            cur += best_delta;
        }
        if (cur < best_raw) {
            best_raw = cur;
            best_signs = s;
        }
        best.trace.push_back(static_cast<double>(best_raw) / l2);
    }

    best.code = CodeMatrix::from_signs(chips, users, std::move(best_signs));
    best.achieved_tsc = static_cast<double>(best_raw) / l2;
    return best;
}

namespace {

bool column_matches(const std::vector<std::int8_t>& candidate,
                    const std::vector<std::int8_t>& signs, int chips, int users, int col) {
    bool same = true, neg = true;
    for (int i = 0; i < chips; ++i) {
        const std::int8_t v = signs[static_cast<std::size_t>(i) * users + col];
        if (candidate[i] != v) same = false;
        if (candidate[i] != -v) neg = false;
    }
    return same || neg;
}

// [H_L | extra +-1 columns], extras drawn from the seed and rejected when
// equal to +- any earlier column.
std::vector<std::int8_t> hadamard_plus_columns(int chips, int users, std::mt19937_64& rng) {
    const Matrix h = hadamard(chips);
    std::vector<std::int8_t> s(static_cast<std::size_t>(chips) * users);
    for (int i = 0; i < chips; ++i)
        for (int j = 0; j < chips; ++j)
            s[static_cast<std::size_t>(i) * users + j] = h(i, j) > 0 ? 1 : -1;
    std::vector<std::int8_t> col(chips);
    for (int j = chips; j < users; ++j) {
        for (int attempt = 0;; ++attempt) {
            require(attempt < 10000, "build_core: cannot seed enough distinct columns");
            for (int i = 0; i < chips; ++i) col[i] = (rng() >> 63) ? 1 : -1;
            bool clash = false;
            for (int prev = 0; prev < j && !clash; ++prev)
                clash = column_matches(col, s, chips, users, prev);
            if (!clash) break;
        }
        for (int i = 0; i < chips; ++i) s[static_cast<std::size_t>(i) * users + j] = col[i];
    }
    return s;
}

}  // namespace

CodeMatrix build_core(int chips, int users, std::uint64_t seed, CoreVariant variant,
                      int dropped_row, long budget) {
    require(chips >= 1 && users >= 1, "build_core: dimensions must be positive");
    std::mt19937_64 rng(seed);

    if (variant == CoreVariant::collide) {
        require(is_power_of_two(chips) && users == chips + 1,
                "collide variant needs L a power of two and K == L+1");
        const Matrix h = hadamard(chips);
        std::vector<std::int8_t> s(static_cast<std::size_t>(chips) * users);
        for (int i = 0; i < chips; ++i) {
            for (int j = 0; j < chips; ++j)
                s[static_cast<std::size_t>(i) * users + j] = h(i, j) > 0 ? 1 : -1;
            s[static_cast<std::size_t>(i) * users + chips] = h(i, 0) > 0 ? 1 : -1;
        }
        return CodeMatrix::from_signs(chips, users, std::move(s));
    }

    if (variant == CoreVariant::automatic) {
        if (users == chips && is_power_of_two(chips)) {
            const Matrix h = hadamard(chips);
            std::vector<std::int8_t> s(static_cast<std::size_t>(chips) * users);
            for (int i = 0; i < chips; ++i)
                for (int j = 0; j < users; ++j)
                    s[static_cast<std::size_t>(i) * users + j] = h(i, j) > 0 ? 1 : -1;
            return CodeMatrix::from_signs(chips, users, std::move(s));
        }
        if (is_power_of_two(chips + 1) && users == chips + 1)
            return CodeMatrix::from_signs(chips, users,
                                          row_deleted_hadamard_signs(users, dropped_row));
        if (is_power_of_two(chips) && users > chips) {
            const std::vector<std::int8_t> warm = hadamard_plus_columns(chips, users, rng);
            return min_tsc_search(chips, users, budget, rng(), &warm).code;
        }
    }

    return min_tsc_search(chips, users, budget, rng()).code;
}

// ---------------------------------------------------------------------------
// Injectivity
// ---------------------------------------------------------------------------

InjectivityReport check_binary_injectivity(const CodeMatrix& c) {
    require(c.binary, "check_binary_injectivity: code must be binary antipodal");
    require(c.users <= 24, "check_binary_injectivity: K too large for enumeration");
    const int k = c.users;
    const int l = c.chips;
    const std::uint32_t count = 1u << k;

    // Integer images S*x keyed exactly; entries fit in [-L, L].
    std::unordered_map<std::string, std::vector<std::uint32_t>> classes;
    classes.reserve(count);
    std::string key(static_cast<std::size_t>(l), '\0');
    for (std::uint32_t m = 0; m < count; ++m) {
        for (int i = 0; i < l; ++i) {
            int acc = 0;
            for (int j = 0; j < k; ++j) {
                const int x = (m >> j) & 1u ? 1 : -1;
                acc += c.sign_at(i, j) * x;
            }
            key[i] = static_cast<char>(acc + 128);
        }
        classes[key].push_back(m);
    }

    auto to_vec = [k](std::uint32_t m) {
        std::vector<std::int8_t> v(k);
        for (int j = 0; j < k; ++j) v[j] = (m >> j) & 1u ? 1 : -1;
        return v;
    };

    InjectivityReport rep;
    double err_sum = 0.0;  // sum over ambiguous inputs of expected Hamming errors
    for (const auto& [img, members] : classes) {
        if (members.size() < 2) continue;
        const double m = static_cast<double>(members.size());
        for (std::size_t a = 0; a < members.size(); ++a) {
            double exp_err = 0.0;
            for (std::size_t b = 0; b < members.size(); ++b)
                exp_err += std::popcount(members[a] ^ members[b]);
            err_sum += exp_err / m;
            for (std::size_t b = a + 1; b < members.size(); ++b)
                rep.colliding_pairs.emplace_back(to_vec(members[a]), to_vec(members[b]));
        }
    }
    rep.injective = rep.colliding_pairs.empty();
    rep.noiseless_floor = err_sum / (static_cast<double>(count) * k);
    return rep;
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

void write_code_file(const CodeMatrix& c, std::ostream& out, const EnlargedSidecar* sidecar) {
    out << c.chips << ' ' << c.users << " binary:" << (c.binary ? 1 : 0) << '\n';
    char buf[40];
    for (int i = 0; i < c.chips; ++i) {
        for (int j = 0; j < c.users; ++j) {
            if (j) out << ' ';
            if (c.binary) {
                out << static_cast<int>(c.sign_at(i, j));
            } else {
                std::snprintf(buf, sizeof buf, "%.17g", c.mat(i, j));
                out << buf;
            }
        }
        out << '\n';
    }
    if (sidecar)
        out << "# enlarged d=" << sidecar->d << " core=" << sidecar->core_chips << 'x'
            << sidecar->core_users << '\n';
    if (!out) throw std::runtime_error("write_code_file: write failed");
}

namespace {

[[noreturn]] void bad_file(const std::string& what) {
    throw std::runtime_error("code file: " + what);
}

}  // namespace

CodeMatrix read_code_file(std::istream& in, std::optional<EnlargedSidecar>* sidecar_out) {
    if (sidecar_out) sidecar_out->reset();
    std::string header;
    if (!std::getline(in, header)) bad_file("missing header line");
    std::istringstream hs(header);
    int chips = 0, users = 0;
    std::string flag, extra;
    if (!(hs >> chips >> users >> flag) || (hs >> extra)) bad_file("malformed header");
    if (chips < 1 || users < 1) bad_file("non-positive dimensions");
    bool binary;
    if (flag == "binary:1")
        binary = true;
    else if (flag == "binary:0")
        binary = false;
    else
        bad_file("header flag must be binary:0 or binary:1");

    std::vector<std::int8_t> signs;
    std::vector<double> entries;
    for (int i = 0; i < chips; ++i) {
        std::string line;
        if (!std::getline(in, line)) bad_file("unexpected end of file in matrix body");
        std::istringstream ls(line);
        for (int j = 0; j < users; ++j) {
            if (binary) {
                int v;
                if (!(ls >> v) || (v != 1 && v != -1)) bad_file("binary entries must be -1 or 1");
                signs.push_back(static_cast<std::int8_t>(v));
            } else {
                double v;
                if (!(ls >> v) || !std::isfinite(v)) bad_file("entries must be finite numbers");
                entries.push_back(v);
            }
        }
        std::string trailing;
        if (ls >> trailing) bad_file("too many entries on a row");
    }

    // Optional sidecar, then end of file.
    std::string line;
    bool saw_sidecar = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#' && !saw_sidecar) {
            EnlargedSidecar sc;
            char x = 0;
            if (std::sscanf(line.c_str(), "# enlarged d=%d core=%d%c%d", &sc.d, &sc.core_chips,
                            &x, &sc.core_users) != 4 ||
                x != 'x')
                bad_file("malformed sidecar line");
            if (sidecar_out) *sidecar_out = sc;
            saw_sidecar = true;
            continue;
        }
        bad_file("unexpected trailing content");
    }

    try {
        if (binary) return CodeMatrix::from_signs(chips, users, std::move(signs));
        return CodeMatrix::from_matrix(Matrix(chips, users, std::move(entries)));
    } catch (const std::invalid_argument& e) {
        bad_file(e.what());
    }
}

}  // namespace wbe
