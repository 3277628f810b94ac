"""Independent reference implementations used only by the tests.

These deliberately avoid the package's multiset tables and partition code:
dense arrays are built straight from the documented storage order
(combinations_with_replacement), and the extended inner product is the
literal sum over all n! permutations, each contributing the diagonal
integral of its cycle decomposition via einsum.
"""

from __future__ import annotations

import string
from itertools import combinations_with_replacement, permutations, product

import numpy as np


def dense_from_symtensor(t) -> np.ndarray:
    """Full ordered array from multiset storage, bypassing the rank tables."""
    lookup = dict(zip(combinations_with_replacement(range(t.m), t.degree),
                      t.values.tolist()))
    if t.degree == 0:
        return np.asarray(t.values[0])
    out = np.empty((t.m,) * t.degree)
    for idx in product(range(t.m), repeat=t.degree):
        out[idx] = lookup[tuple(sorted(idx))]
    return out


def _cycles(perm: tuple[int, ...]) -> list[list[int]]:
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cyc = []
        j = start
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = perm[j]
        cycles.append(cyc)
    return cycles


def ext_inner_n_perm(weights: np.ndarray, F: np.ndarray, G: np.ndarray) -> float:
    """Brute-force degree-n extended inner product.

    Sums over all n! permutations; each permutation contributes the integral
    of conj(F) * G restricted to the diagonal of its cycle decomposition,
    with one measure weight per cycle.
    """
    n = F.ndim
    if n == 0:
        return float(np.conj(F) * G)
    FG = np.conj(F) * G
    total = 0.0
    for perm in permutations(range(n)):
        cycles = _cycles(perm)
        letters = string.ascii_lowercase
        subs = [""] * n
        for ci, cyc in enumerate(cycles):
            for pos in cyc:
                subs[pos] = letters[ci]
        expr = "".join(subs) + "," + ",".join(letters[ci] for ci in range(len(cycles))) + "->"
        total += float(np.einsum(expr, FG, *([weights] * len(cycles))))
    return total


def fock_inner_n_dense(weights: np.ndarray, F: np.ndarray, G: np.ndarray) -> float:
    """Plain symmetric-power inner product on dense arrays."""
    n = F.ndim
    if n == 0:
        return float(np.conj(F) * G)
    W = weights
    for _ in range(n - 1):
        W = np.multiply.outer(W, weights)
    return float(np.sum(W * np.conj(F) * G))


def sym_product_dense(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Symmetrized product by averaging over all orderings of the joint slots."""
    na, nb = A.ndim, B.ndim
    raw = np.multiply.outer(A, B)
    n = na + nb
    acc = np.zeros_like(raw)
    for perm in permutations(range(n)):
        acc += np.transpose(raw, perm)
    import math
    return acc / math.factorial(n)
