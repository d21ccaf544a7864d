// Multiuser detectors: brute-force ML over {-1,+1}^K, decoupled ML for
// Kronecker-enlarged codes, the reduced-search AML decoder, and a
// soft-limiter iterative interference-cancellation baseline. Every decoder
// reports how many Euclidean distance evaluations it performed.

#pragma once

#include <cstdint>
#include <vector>

#include "wbe/enlarge.hpp"

namespace wbe {

struct DecoderOutcome {
    std::vector<double> x_hat;  // entries +-1
    std::uint64_t distance_evals = 0;
    double objective = 0.0;  // achieved squared distance (AML: transformed-domain cost)
};

// Column partition C = [A|B] with A invertible. perm[i] is the original
// column index occupying position i of the partition (first L positions = A).
struct AmlSplit {
    std::vector<int> perm;
    Matrix a;
    Matrix b;
    Matrix a_inv;
    bool a_is_unitary = false;
};

// Exhaustive argmin of ||y - C x||^2 over all 2^K candidates, Gray-code
// enumeration with O(L) incremental image updates. Ties (exactly equal
// distances) go to the lexicographically smallest candidate, -1 < +1. K <= 24.
DecoderOutcome decode_ml(const CodeMatrix& c, const std::vector<double>& y);

// y' = (q^T (x) I_L) y computed by mixing the d length-L blocks of y by q^T;
// the dL x dL rotation is never materialized.
std::vector<double> rotate_to_core_frame(const Enlargement& e, const std::vector<double>& y);

// Rotates into the core frame and runs the core ML independently per block:
// d * 2^K distance evaluations instead of 2^(dK).
DecoderOutcome decode_decoupled(const Enlargement& e, const std::vector<double>& y);

// Greedy column-pivoted elimination; throws singular_matrix_error when no
// invertible L-column block exists.
AmlSplit choose_split(const CodeMatrix& c);

// For each tail candidate x2 in {-1,+1}^(K-L): z = A^-1 y - (A^-1 B) x2,
// head x1 = sign(z), cost ||z - x1||^2; returns the minimizing pair in
// original column order. 2^(K-L) distance evaluations.
DecoderOutcome decode_aml(const CodeMatrix& c, const std::vector<double>& y, const AmlSplit& split);

struct IterativeParams {
    double step = 0.0;   // 0 = auto: 1 / lambda_max(C^T C)
    int iterations = 20;
};

// s <- clamp(s + mu C^T (y - C s), -1, +1) from s = 0, hard decision at the end.
DecoderOutcome decode_iterative(const CodeMatrix& c, const std::vector<double>& y,
                                IterativeParams params = {});

// Largest eigenvalue of C^T C by power iteration (50 iterations, tol 1e-6).
double max_gram_eigenvalue(const CodeMatrix& c);

}  // namespace wbe
