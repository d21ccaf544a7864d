// Kronecker enlargement of signature codebooks: a d x d unitary Q turns an
// L x K core into the dL x dK code Q (x) C, preserving TSC optimality. The
// Hadamard special case keeps binary antipodal codes binary.

#pragma once

#include <cstdint>

#include "wbe/codebook.hpp"

namespace wbe {

struct Enlargement {
    Matrix q;         // d x d, unitary within 1e-9
    CodeMatrix core;  // L x K
    int d = 0;
};

// Validates unitarity (tolerance 1e-9) and sets d.
Enlargement make_enlargement(Matrix q, CodeMatrix core);

// Materializes q (x) core.mat as a dL x dK code. Throws on non-unitary q.
CodeMatrix enlarge(const Matrix& q, const CodeMatrix& core);

// (H_d / sqrt(d)) (x) core for binary cores; result is binary antipodal with
// sign pattern kron(sign(H_d), core signs).
CodeMatrix enlarge_hadamard(int d, const CodeMatrix& core);

// True iff the Gram matrix of q (x) core equals I_d (x) (core^T core)
// entrywise within 1e-9. Accepts non-unitary q (and then returns false).
bool gram_structure_check(const Matrix& q, const CodeMatrix& core);
bool gram_structure_check(const Enlargement& e);

// Seeded random orthogonal matrix (Gram-Schmidt of a Gaussian draw).
Matrix random_orthogonal(int d, std::uint64_t seed);

}  // namespace wbe
