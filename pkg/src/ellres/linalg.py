"""Exact linear algebra over F_p.

Scalar routines work on lists of int rows.  The batched rank routine works
on numpy int64 stacks and is the kernel used by exhaustive enumeration.
"""

from __future__ import annotations

import numpy as np


def rref(rows, p: int, col_order=None):
    """Reduced row-echelon form; returns (matrix, pivot columns).

    ``col_order`` fixes the order in which columns are tried as pivots, so
    a reversed order yields a basis with distinct *last* nonzero entries.
    """
    A = [[x % p for x in r] for r in rows]
    if not A:
        return [], []
    ncols = len(A[0])
    order = list(range(ncols)) if col_order is None else list(col_order)
    pivots = []
    r = 0
    for c in order:
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [x * inv % p for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def rank(rows, p: int) -> int:
    return len(rref(rows, p)[1])


def nullspace(rows, ncols: int, p: int):
    """Basis of {v : rows @ v = 0}, returned in reduced row-echelon form."""
    R, pivots = rref(rows, p) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(R, pivots):
            v[pc] = (-row[f]) % p
        basis.append(v)
    if not basis:
        return []
    return rref(basis, p)[0]


def solve(rows, rhs, p: int):
    """One solution x of rows @ x = rhs, or None when inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    R, pivots = rref(aug, p, col_order=range(ncols + 1))
    if ncols in pivots:
        return None
    x = [0] * ncols
    for row, pc in zip(R, pivots):
        x[pc] = row[ncols]
    return x


def row_basis_indices(rows, p: int):
    """Indices of a maximal independent subset of ``rows`` (first-come)."""
    chosen = []
    basis: list = []
    pivots: list = []
    for idx, r in enumerate(rows):
        v = [x % p for x in r]
        for b, pc in zip(basis, pivots):
            if v[pc]:
                f = v[pc]
                v = [(x - f * y) % p for x, y in zip(v, b)]
        nz = next((c for c, x in enumerate(v) if x), None)
        if nz is None:
            continue
        inv = pow(v[nz], -1, p)
        v = [x * inv % p for x in v]
        for i, b in enumerate(basis):
            if b[nz]:
                f = b[nz]
                basis[i] = [(x - f * y) % p for x, y in zip(b, v)]
        basis.append(v)
        pivots.append(nz)
        chosen.append(idx)
    return chosen


def inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for i in range(1, p):
        inv[i] = pow(i, -1, p)
    return inv


def batch_rank(A: np.ndarray, p: int, inv: np.ndarray | None = None) -> np.ndarray:
    """Ranks over F_p of a stack of matrices with shape (batch, rows, cols)."""
    A = np.array(A, dtype=np.int64) % p
    if A.ndim != 3:
        raise ValueError("expected a (batch, rows, cols) stack")
    B, m, n = A.shape
    if B == 0 or m == 0 or n == 0:
        return np.zeros(B, dtype=np.int64)
    if inv is None:
        inv = inverse_table(p)
    used = np.zeros((B, m), dtype=bool)
    ar = np.arange(B)
    for c in range(n):
        cand = (A[:, :, c] != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        idx = ar[has]
        piv = cand[idx].argmax(axis=1)
        prow = A[idx, piv, :]
        prow = prow * inv[prow[:, c]][:, None] % p
        factors = A[idx, :, c].copy()
        A[idx] = (A[idx] - factors[:, :, None] * prow[:, None, :]) % p
        A[idx, piv, :] = prow
        used[idx, piv] = True
    return used.sum(axis=1)
