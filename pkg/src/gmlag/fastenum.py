"""Vectorized exact arithmetic over small prime fields.

Everything here is integer-only: matrices of residues mod p in int64 numpy
arrays, Gaussian elimination batched over stacks of small matrices, and
enumeration of canonical projective representatives.  Used by the census and
probe routines where the point counts run into the millions; results agree
bit for bit with the scalar field routines (tested against them).
"""

from __future__ import annotations

from typing import Iterator

import numpy as np


def inverse_table(p: int) -> np.ndarray:
    """inv[a] = a^-1 mod p for a in 1..p-1 (inv[0] unused)."""
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


def batch_rank(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices mod p.

    ``mats`` has shape (N, m, n) with entries already reduced mod p.
    Entries stay below p throughout, so int64 products never overflow.
    """
    a = np.array(mats, dtype=np.int64, copy=True)
    if a.ndim != 3:
        raise ValueError("expected a stack of matrices")
    n_mats, m, n = a.shape
    if n_mats == 0:
        return np.zeros(0, dtype=np.int64)
    inv = inverse_table(p)
    piv = np.zeros(n_mats, dtype=np.int64)
    rows = np.arange(m, dtype=np.int64)
    for col in range(n):
        if m == 0:
            break
        col_vals = a[:, :, col]
        active = rows[None, :] >= piv[:, None]
        nz = (col_vals != 0) & active
        has = nz.any(axis=1)
        sel = np.nonzero(has)[0]
        if sel.size == 0:
            continue
        first = nz[sel].argmax(axis=1)
        pr = piv[sel]
        # swap the found row up to the pivot position
        tmp = a[sel, pr, :].copy()
        a[sel, pr, :] = a[sel, first, :]
        a[sel, first, :] = tmp
        pv = a[sel, pr, col]
        a[sel, pr, :] = a[sel, pr, :] * inv[pv][:, None] % p
        # eliminate strictly below the pivot row
        fac = np.where(rows[None, :] > pr[:, None], a[sel, :, col], 0)
        a[sel] = (a[sel] - fac[:, :, None] * a[sel, pr, :][:, None, :]) % p
        piv[sel] = pr + 1
        if (piv >= m).all():
            break
    return piv


def count_projective(dim: int, p: int) -> int:
    return (p**dim - 1) // (p - 1)


def projective_chunks(dim: int, p: int, chunk: int = 65536) -> Iterator[np.ndarray]:
    """Canonical representatives of P^(dim-1)(F_p) in deterministic order.

    Each point appears once, scaled so its first nonzero coordinate is 1.
    Yields (c, dim) int64 blocks.
    """
    for lead in range(dim):
        free = dim - lead - 1
        total = p**free
        start = 0
        while start < total:
            cnt = min(chunk, total - start)
            block = np.zeros((cnt, dim), dtype=np.int64)
            block[:, lead] = 1
            rem = np.arange(start, start + cnt, dtype=np.int64)
            for j in range(dim - 1, lead, -1):
                block[:, j] = rem % p
                rem //= p
            yield block
            start += cnt


def mat_residues(m) -> np.ndarray:
    """Residue array of a Mat over a prime field."""
    return np.array([[e.v for e in row] for row in m.entries], dtype=np.int64)


def int_array(table) -> np.ndarray:
    return np.array(table, dtype=np.int64)


# column pairs for a 2x2 Laplace expansion along the top two rows
_DET4_PAIRS = (
    (0, 1, 2, 3, 1),
    (0, 2, 1, 3, -1),
    (0, 3, 1, 2, 1),
    (1, 2, 0, 3, 1),
    (1, 3, 0, 2, -1),
    (2, 3, 0, 1, 1),
)


def det4_batch(mats: np.ndarray, p: int) -> np.ndarray:
    """Determinants mod p of an (N, 4, 4) int64 batch.

    Values stay below 6*p*p in magnitude, so p must be small enough for
    int64; every caller here works with single-digit primes.
    """
    m = mats % p
    acc = np.zeros(m.shape[0], dtype=np.int64)
    for a, b, c, d, s in _DET4_PAIRS:
        top = (m[:, 0, a] * m[:, 1, b] - m[:, 0, b] * m[:, 1, a]) % p
        bot = (m[:, 2, c] * m[:, 3, d] - m[:, 2, d] * m[:, 3, c]) % p
        acc += s * top * bot
    return acc % p
