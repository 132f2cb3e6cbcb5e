"""Dense exact linear algebra over the scalar fields and over k[t].

One ``Mat`` container serves both: entries are field scalars (Fraction / Fp)
or ``UniPoly``.  Field routines use ordinary Gaussian elimination; polynomial
routines only ever apply unimodular operations so that spans and kernels are
computed as saturated k[t]-submodules, never just generically.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

from .errors import ValidationError
from .exactnum import (
    DivisorIdeal,
    Field,
    PrimeField,
    Scalar,
    UniPoly,
    poly_divexact,
    poly_interpolate,
)


class Mat:
    """Dense matrix; entries need +, -, *, unary -, and truthiness."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence]):
        self.entries = [list(r) for r in entries]
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        for r in self.entries:
            if len(r) != self.cols:
                raise ValueError("ragged rows")

    @classmethod
    def zero(cls, rows: int, cols: int, zero) -> "Mat":
        return cls([[zero for _ in range(cols)] for _ in range(rows)])

    @classmethod
    def identity(cls, n: int, zero, one) -> "Mat":
        m = cls.zero(n, n, zero)
        for i in range(n):
            m.entries[i][i] = one
        return m

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def copy(self) -> "Mat":
        return Mat(self.entries)

    def __getitem__(self, ij: tuple[int, int]):
        return self.entries[ij[0]][ij[1]]

    def row(self, i: int) -> list:
        return list(self.entries[i])

    def col(self, j: int) -> list:
        return [self.entries[i][j] for i in range(self.rows)]

    @property
    def T(self) -> "Mat":
        return Mat([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def __add__(self, other: "Mat") -> "Mat":
        self._shape_check(other)
        return Mat([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __sub__(self, other: "Mat") -> "Mat":
        self._shape_check(other)
        return Mat([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __neg__(self) -> "Mat":
        return Mat([[-a for a in r] for r in self.entries])

    def _shape_check(self, other: "Mat") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ot = [other.col(j) for j in range(other.cols)]
        out = []
        for i in range(self.rows):
            ri = self.entries[i]
            out_row = []
            for j in range(other.cols):
                cj = ot[j]
                acc = None
                for a, b in zip(ri, cj):
                    if a and b:
                        term = a * b
                        acc = term if acc is None else acc + term
                if acc is None:
                    acc = ri[0] * cj[0]  # a zero of the right type
                out_row.append(acc)
            out.append(out_row)
        return Mat(out)

    def scale(self, c) -> "Mat":
        return Mat([[c * a for a in r] for r in self.entries])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Mat) and self.entries == other.entries

    def is_zero(self) -> bool:
        return all(not a for r in self.entries for a in r)

    def stack(self, other: "Mat") -> "Mat":
        if self.cols != other.cols:
            raise ValueError("column count mismatch in stack")
        return Mat(self.entries + other.entries)

    def hjoin(self, other: "Mat") -> "Mat":
        if self.rows != other.rows:
            raise ValueError("row count mismatch in hjoin")
        return Mat([ra + rb for ra, rb in zip(self.entries, other.entries)])

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Mat":
        return Mat([[self.entries[i][j] for j in col_idx] for i in row_idx])

    def map(self, f: Callable) -> "Mat":
        return Mat([[f(a) for a in r] for r in self.entries])

    def __repr__(self) -> str:
        return f"Mat({self.rows}x{self.cols})"


def mat_from_ints(field: Field, entries: Sequence[Sequence[int]]) -> Mat:
    return Mat([[field.from_int(a) for a in r] for r in entries])


def poly_mat_from_const(f: Mat, field: Field) -> Mat:
    """Lift a scalar matrix to constant polynomials."""
    return f.map(lambda a: UniPoly.const(field, a))


def mat_eval(m: Mat, x: Scalar) -> Mat:
    """Evaluate a polynomial matrix at a point of the base."""
    return m.map(lambda p: p.eval(x))


# ---------------------------------------------------------------------------
# field linear algebra


def _rref(entries: list[list], ncols: int) -> tuple[list[list], list[int]]:
    """In-place reduced row echelon form; returns (entries, pivot columns)."""
    pivots = []
    r = 0
    nrows = len(entries)
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if entries[i][c]:
                pr = i
                break
        if pr is None:
            continue
        entries[r], entries[pr] = entries[pr], entries[r]
        piv = entries[r][c]
        if piv != piv / piv:  # not already one
            inv = (piv / piv) / piv
            entries[r] = [inv * a for a in entries[r]]
        for i in range(nrows):
            if i != r and entries[i][c]:
                f = entries[i][c]
                entries[i] = [a - f * b for a, b in zip(entries[i], entries[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return entries, pivots


def rank_kernel_image(m: Mat) -> tuple[int, list[list[Scalar]], list[int]]:
    """Rank, a kernel basis (vectors x with m@x = 0), and the pivot columns.

    The pivot column indices select an image basis among the original
    columns, so repeated runs give identical output.
    """
    work = [list(r) for r in m.entries]
    red, pivots = _rref(work, m.cols)
    rank = len(pivots)
    pivset = set(pivots)
    kernel = []
    zero = None
    one = None
    if m.rows and m.cols:
        sample = m.entries[0][0]
        zero = sample - sample
        one_candidates = [a for r in m.entries for a in r if a]
        one = (one_candidates[0] / one_candidates[0]) if one_candidates else None
    for c in range(m.cols):
        if c in pivset:
            continue
        v = [zero] * m.cols
        if one is None:
            kernel.append(v)
            continue
        v[c] = one
        for r_i, p_c in enumerate(pivots):
            v[p_c] = -red[r_i][c]
        kernel.append(v)
    return rank, kernel, pivots


def field_rank(m: Mat) -> int:
    work = [list(r) for r in m.entries]
    _, pivots = _rref(work, m.cols)
    return len(pivots)


def same_row_span(m1: Mat, m2: Mat) -> bool:
    """Whether two field matrices with equal column count span the same row space."""
    if m1.cols != m2.cols:
        raise ValidationError("row spans live in different ambient spaces")
    r1 = field_rank(m1)
    if r1 != field_rank(m2):
        return False
    stacked = Mat(list(m1.entries) + list(m2.entries))
    return field_rank(stacked) == r1


def field_solve(m: Mat, b: list) -> list | None:
    """One solution of m @ x = b, or None."""
    aug = [list(r) + [b[i]] for i, r in enumerate(m.entries)]
    red, pivots = _rref(aug, m.cols)
    rank = len(pivots)
    for i in range(rank, m.rows):
        if red[i][m.cols]:
            return None
    sample = b[0] if m.rows else None
    zero = sample - sample if m.rows else None
    x = [zero] * m.cols
    for r_i, c in enumerate(pivots):
        x[c] = red[r_i][m.cols]
    return x


def field_inverse(m: Mat) -> Mat:
    if m.rows != m.cols:
        raise ValueError("inverse of non-square matrix")
    n = m.rows
    sample = m.entries[0][0]
    zero = sample - sample
    aug = [list(r) for r in m.entries]
    one = None
    for r in m.entries:
        for a in r:
            if a:
                one = a / a
                break
        if one:
            break
    if one is None:
        raise ValueError("singular matrix")
    for i in range(n):
        aug[i] += [one if j == i else zero for j in range(n)]
    red, pivots = _rref(aug, n)
    if len(pivots) != n:
        raise ValueError("singular matrix")
    return Mat([r[n:] for r in red])


def field_det(m: Mat) -> Scalar:
    if m.rows != m.cols:
        raise ValueError("determinant of non-square matrix")
    n = m.rows
    work = [list(r) for r in m.entries]
    sample = work[0][0]
    det = None
    sign_flip = False
    for c in range(n):
        pr = None
        for i in range(c, n):
            if work[i][c]:
                pr = i
                break
        if pr is None:
            return sample - sample
        if pr != c:
            work[c], work[pr] = work[pr], work[c]
            sign_flip = not sign_flip
        piv = work[c][c]
        det = piv if det is None else det * piv
        for i in range(c + 1, n):
            if work[i][c]:
                f = work[i][c] / piv
                work[i] = [a - f * b for a, b in zip(work[i], work[c])]
    return -det if sign_flip else det


# ---------------------------------------------------------------------------
# polynomial matrices: echelon, Smith form, Fitting divisors


def _content_unit(polys: list[UniPoly]):
    """Unit scalar making the coefficient list primitive over Q.

    Returns the rational u with u * polys having coprime integer
    coefficients and a positive first nonzero coefficient, or None when no
    rescaling is needed (or the field is not Q).  Rescaling by units keeps
    every elimination step unimodular while stopping coefficient growth.
    """
    num_gcd = 0
    den_lcm = 1
    sign = 0
    for p in polys:
        for c in p.coeffs:
            if not c:
                continue
            if not isinstance(c, Fraction):
                return None
            num_gcd = math.gcd(num_gcd, c.numerator)
            den_lcm = den_lcm // math.gcd(den_lcm, c.denominator) * c.denominator
            if sign == 0:
                sign = 1 if c.numerator > 0 else -1
    if num_gcd == 0:
        return None
    u = Fraction(den_lcm * sign, num_gcd)
    return None if u == 1 else u


def _poly_column_echelon(m: Mat, track: bool) -> tuple[list[list[UniPoly]], "Mat | None", int]:
    """Column echelon via unimodular column operations (Euclidean steps).

    After the sweep, columns beyond the rank are identically zero, so the
    matching columns of the accumulated V form a saturated kernel basis.
    Columns are rescaled to primitive form after every operation; over Q the
    entries would otherwise grow exponentially.
    """
    if not m.entries or not m.entries[0]:
        return [list(r) for r in m.entries], None, 0
    field = None
    for r in m.entries:
        for a in r:
            field = a.field
            break
        break
    work = [list(r) for r in m.entries]
    nrows, ncols = m.rows, m.cols
    v = None
    if track:
        zero_p = UniPoly(field, [])
        one_p = UniPoly.const(field, field.one())
        v = Mat.identity(ncols, zero_p, one_p)

    def col_swap(a: int, b: int) -> None:
        for i in range(nrows):
            work[i][a], work[i][b] = work[i][b], work[i][a]
        if v is not None:
            for i in range(ncols):
                v.entries[i][a], v.entries[i][b] = v.entries[i][b], v.entries[i][a]

    def col_normalize(c: int) -> None:
        unit = _content_unit([work[i][c] for i in range(nrows)])
        if unit is not None:
            for i in range(nrows):
                work[i][c] = work[i][c].scale(unit)
            if v is not None:
                for i in range(ncols):
                    v.entries[i][c] = v.entries[i][c].scale(unit)

    def col_addmul(dst: int, src: int, q: UniPoly) -> None:
        # col_dst -= q * col_src
        for i in range(nrows):
            if work[i][src]:
                work[i][dst] = work[i][dst] - q * work[i][src]
        if v is not None:
            for i in range(ncols):
                if v.entries[i][src]:
                    v.entries[i][dst] = v.entries[i][dst] - q * v.entries[i][src]
        col_normalize(dst)

    for c in range(ncols):
        col_normalize(c)
    k = 0
    for r in range(nrows):
        if k == ncols:
            break
        live = [c for c in range(k, ncols) if work[r][c]]
        if not live:
            continue
        while True:
            live = [c for c in range(k, ncols) if work[r][c]]
            if len(live) <= 1:
                break
            best = min(live, key=lambda c: (work[r][c].degree(), c))
            if best != k:
                col_swap(k, best)
            elif not work[r][k]:
                col_swap(k, live[0])
            done = True
            for c in range(k + 1, ncols):
                if work[r][c]:
                    q, rem = work[r][c].divmod(work[r][k])
                    col_addmul(c, k, q)
                    if rem:
                        done = False
            if done:
                break
        if not work[r][k]:
            live = [c for c in range(k, ncols) if work[r][c]]
            if live:
                col_swap(k, live[0])
            else:
                continue
        k += 1
    if v is not None:
        # kernel columns pair with zero work columns, so their own content
        # can be stripped without touching the echelon identity
        for c in range(ncols):
            if all(not work[i][c] for i in range(nrows)):
                unit = _content_unit([v.entries[i][c] for i in range(ncols)])
                if unit is not None:
                    for i in range(ncols):
                        v.entries[i][c] = v.entries[i][c].scale(unit)
    return work, v, k


def morphism_rank(m: Mat) -> int:
    """Rank over the fraction field k(t).

    Computed by evaluation: a minor of size s has degree at most s * d, so
    once s * d + 1 distinct base points all realize rank below s, every
    s-minor vanishes identically.  The max point rank is the generic rank.
    """
    s = min(m.rows, m.cols)
    if s == 0:
        return 0
    field = m.entries[0][0].field
    d = max(max(p.degree() for p in row) for row in m.entries)
    if d <= 0:
        return field_rank(mat_eval(m, field.zero()))
    npts = s * d + 1
    if isinstance(field, PrimeField) and field.p < npts:
        _, _, rank = _poly_column_echelon(m, track=False)
        return rank
    best = 0
    for i in range(npts):
        r_i = field_rank(mat_eval(m, field.from_int(i)))
        if r_i > best:
            best = r_i
            if best == s:
                break
    return best


def saturate_kernel(m: Mat) -> Mat:
    """Saturated kernel of a polynomial matrix; columns form the basis.

    The quotient by a saturated kernel is free, so the basis extends to a
    basis of the ambient module.
    """
    work, v, rank = _poly_column_echelon(m, track=True)
    if v is None:
        raise ValueError("empty matrix")
    for i in range(m.rows):
        for c in range(rank, m.cols):
            if work[i][c]:
                raise ValidationError("echelon sweep left a nonzero tail column")
    idx = list(range(rank, m.cols))
    return v.submatrix(range(m.cols), idx)


def saturated_image(m: Mat) -> Mat:
    """Saturation of the column span; columns form the basis (may be empty)."""
    left_kernel = saturate_kernel(m.T)  # columns: vectors y with yT m = 0
    if left_kernel.cols == 0:
        field = m.entries[0][0].field
        zero_p = UniPoly(field, [])
        one_p = UniPoly.const(field, field.one())
        return Mat.identity(m.rows, zero_p, one_p)
    return saturate_kernel(left_kernel.T)


def column_reduced(m: Mat) -> tuple[Mat, Mat]:
    """Column-reduce a polynomial matrix: (reduced, s) with reduced = m @ s.

    s is unimodular, so the column module is unchanged while the column
    degrees become minimal (the leading-coefficient matrix gets full column
    rank).  Zero columns are left in place.
    """
    field = m.entries[0][0].field
    zero_p = UniPoly(field, [])
    one_p = UniPoly.const(field, field.one())
    work = [list(r) for r in m.entries]
    nrows, ncols = m.rows, m.cols
    s = Mat.identity(ncols, zero_p, one_p)

    def col_scale(c: int) -> None:
        unit = _content_unit([work[i][c] for i in range(nrows)])
        if unit is not None:
            for i in range(nrows):
                work[i][c] = work[i][c].scale(unit)
            for i in range(ncols):
                s.entries[i][c] = s.entries[i][c].scale(unit)

    for c in range(ncols):
        col_scale(c)
    while True:
        degs = []
        for c in range(ncols):
            degs.append(max((work[i][c].degree() for i in range(nrows)), default=-1))
        live = [c for c in range(ncols) if degs[c] >= 0]
        if not live:
            break
        lead_rows = []
        for i in range(nrows):
            row = []
            for c in live:
                p = work[i][c]
                row.append(p.coeffs[degs[c]] if p.degree() == degs[c] else field.zero())
            lead_rows.append(row)
        lead = Mat(lead_rows)
        rank, kernel, _ = rank_kernel_image(lead)
        if rank == len(live):
            break
        coeffs = kernel[0]
        target = max((j for j in range(len(live)) if coeffs[j]), key=lambda j: degs[live[j]])
        ct = live[target]
        for j in range(len(live)):
            if j == target or not coeffs[j]:
                continue
            cj = live[j]
            shift = degs[ct] - degs[cj]
            factor = UniPoly(field, [field.zero()] * shift + [coeffs[j] / coeffs[target]])
            for i in range(nrows):
                if work[i][cj]:
                    work[i][ct] = work[i][ct] + factor * work[i][cj]
            for i in range(ncols):
                if s.entries[i][cj]:
                    s.entries[i][ct] = s.entries[i][ct] + factor * s.entries[i][cj]
        col_scale(ct)
    return Mat(work), s


def row_reduced(m: Mat) -> tuple[Mat, Mat]:
    """Row-reduce a polynomial matrix: (reduced, s) with reduced = s @ m."""
    red_t, s_t = column_reduced(m.T)
    return red_t.T, s_t.T


def _lll_reduce(vecs: list[list[int]]) -> list[list[int]]:
    """Textbook LLL (delta = 3/4) on integer vectors, exact arithmetic."""
    b = [list(v) for v in vecs]
    n = len(b)
    if n <= 1:
        return b

    def dot(u, v):
        return sum(x * y for x, y in zip(u, v))

    mu = [[Fraction(0)] * n for _ in range(n)]
    norms = [Fraction(0)] * n

    def compute_gso() -> None:
        for i in range(n):
            for j in range(i):
                s = Fraction(dot(b[i], b[j]))
                for k in range(j):
                    s -= mu[i][k] * mu[j][k] * norms[k]
                mu[i][j] = s / norms[j]
            s = Fraction(dot(b[i], b[i]))
            for k in range(i):
                s -= mu[i][k] * mu[i][k] * norms[k]
            norms[i] = s

    compute_gso()
    if any(not x for x in norms):
        raise ValueError("lattice basis is linearly dependent")
    k = 1
    steps = 0
    limit = 20000 * n
    while k < n:
        steps += 1
        if steps > limit:
            break
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                for idx in range(len(b[k])):
                    b[k][idx] -= q * b[j][idx]
                for i in range(j):
                    mu[k][i] -= q * mu[j][i]
                mu[k][j] -= q
        if norms[k] >= (Fraction(3, 4) - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
            continue
        b[k], b[k - 1] = b[k - 1], b[k]
        m_ = mu[k][k - 1]
        big = norms[k] + m_ * m_ * norms[k - 1]
        mu[k][k - 1] = m_ * norms[k - 1] / big
        norms[k] = norms[k - 1] * norms[k] / big
        norms[k - 1] = big
        for j in range(k - 1):
            mu[k - 1][j], mu[k][j] = mu[k][j], mu[k - 1][j]
        for i in range(k + 1, n):
            tmp = mu[i][k]
            mu[i][k] = mu[i][k - 1] - m_ * tmp
            mu[i][k - 1] = tmp + mu[k][k - 1] * mu[i][k]
        k = max(k - 1, 1)
    return b


def _unit_fitting_sampled(m: Mat, size: int, tries: int) -> bool:
    """True if some sampled set of size x size minors has unit gcd.

    Sound one-way certificate: a unit gcd over a subset forces a unit gcd
    over all minors.  A False answer is inconclusive.
    """
    from .exactnum import poly_gcd

    if size > min(m.rows, m.cols):
        return False
    # lex-ordered subsets are heavily correlated; sample them at random
    rng = random.Random(0x5EED ^ (m.rows << 8) ^ m.cols)
    acc: UniPoly | None = None
    for _ in range(tries):
        rows = sorted(rng.sample(range(m.rows), size))
        cols = sorted(rng.sample(range(m.cols), size))
        minor = poly_det(m.submatrix(rows, cols))
        if not minor:
            continue
        acc = minor.monic() if acc is None else poly_gcd(acc, minor)
        if acc.degree() == 0:
            return True
    return False


def coefficient_reduced_rows(m: Mat, slack: int = 2) -> Mat:
    """Shrink the integer size of a Q[t] row basis by lattice reduction.

    Rows of the output are integer combinations of t-power shifts of the
    input rows (degrees allowed up to max + slack: a little extra degree
    often buys exponentially smaller coefficients), so the row module can
    only shrink; the result is kept only when a sampled minor certificate
    shows it is saturated of full rank, which forces equality with the input
    module.  Any other field, or a failed certificate, returns the input
    unchanged.
    """
    if m.rows == 0 or m.cols == 0:
        return m
    field = m.entries[0][0].field
    if not isinstance(field.zero(), Fraction):
        return m
    degs = [max(p.degree() for p in row) for row in m.entries]
    if any(d < 0 for d in degs):
        return m
    top = max(degs) + slack
    width = m.cols * (top + 1)
    vecs: list[list[int]] = []
    for i, row in enumerate(m.entries):
        den = 1
        for p in row:
            for c in p.coeffs:
                den = den // math.gcd(den, c.denominator) * c.denominator
        for shift in range(top - degs[i] + 1):
            vec = [0] * width
            for c_idx, p in enumerate(row):
                for e, c in enumerate(p.coeffs):
                    vec[c_idx * (top + 1) + e + shift] = int(c * den)
            g = 0
            for x in vec:
                g = math.gcd(g, x)
            if g > 1:
                vec = [x // g for x in vec]
            vecs.append(vec)
    try:
        reduced = _lll_reduce(vecs)
    except ValueError:
        return m
    cands = []
    for vec in reduced:
        row = []
        deg = -1
        for c_idx in range(m.cols):
            chunk = vec[c_idx * (top + 1) : (c_idx + 1) * (top + 1)]
            p = UniPoly(field, [Fraction(x) for x in chunk])
            deg = max(deg, p.degree())
            row.append(p)
        size = max(abs(x) for x in vec)
        cands.append((len(str(size)), deg, row))
    cands.sort(key=lambda c: (c[0], c[1]))
    chosen: list[list[UniPoly]] = []
    for _, _, row in cands:
        if len(chosen) == m.rows:
            break
        stacked = Mat(chosen + [row])
        if morphism_rank(stacked) == len(chosen) + 1:
            chosen.append(row)
    if len(chosen) != m.rows:
        return m
    out = Mat(chosen)
    if not _unit_fitting_sampled(out, m.rows, 40):
        return m
    return out


def reduced_row_basis(m: Mat) -> Mat:
    """Degree- and coefficient-minimized basis of the row module of m."""
    red, _ = row_reduced(m)
    return coefficient_reduced_rows(red)


def reduced_column_basis(m: Mat) -> Mat:
    """Degree- and coefficient-minimized basis of the column module of m."""
    return reduced_row_basis(m.T).T


def _int_column_echelon(work: list[list[int]]) -> tuple[list[list[int]], int]:
    """Column echelon over Z by unimodular operations; returns (u, rank).

    work is reduced in place.  Columns of u matching the zero columns of the
    echelon form give a saturated basis of the integer kernel: any integer
    kernel vector has integer coordinates in u because u is unimodular.
    """
    nrows = len(work)
    ncols = len(work[0]) if work else 0
    u = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]
    k = 0
    for r in range(nrows):
        if k == ncols:
            break
        while True:
            live = [c for c in range(k, ncols) if work[r][c]]
            if not live:
                break
            best = min(live, key=lambda c: abs(work[r][c]))
            if best != k:
                for row in work:
                    row[k], row[best] = row[best], row[k]
                for row in u:
                    row[k], row[best] = row[best], row[k]
            piv = work[r][k]
            done = True
            for c in range(k + 1, ncols):
                val = work[r][c]
                if not val:
                    continue
                q = (2 * val + piv) // (2 * piv)  # nearest quotient, less growth
                if q:
                    for row in work:
                        if row[k]:
                            row[c] -= q * row[k]
                    for row in u:
                        if row[k]:
                            row[c] -= q * row[k]
                if work[r][c]:
                    done = False
            if done:
                break
        if k < ncols and work[r][k]:
            if work[r][k] < 0:
                for row in work:
                    row[k] = -row[k]
                for row in u:
                    row[k] = -row[k]
            k += 1
    return u, k


def _poly_kernel_by_lattice(m: Mat, want: int, max_deg: int) -> Mat | None:
    """Small-coefficient saturated kernel basis over Q[t], or None.

    Linearizes m @ x = 0 with deg x <= d into an integer system, takes the
    saturated integer kernel, LLL-reduces it, and re-selects a module basis
    certified by a sampled unit-fitting check (which forces equality with the
    kernel module).  Degrees are raised until the certificate passes.
    """
    field = m.entries[0][0].field
    if not isinstance(field.zero(), Fraction):
        return None
    rows_int: list[tuple[list[tuple[int, list[int]]], int]] = []
    for row in m.entries:
        den = 1
        for p in row:
            for c in p.coeffs:
                den = den // math.gcd(den, c.denominator) * c.denominator
        ints = [(j, [int(c * den) for c in p.coeffs]) for j, p in enumerate(row) if p]
        rdeg = max((len(cs) - 1 for _, cs in ints), default=-1)
        rows_int.append((ints, rdeg))
    ncols = m.cols
    # Pool a small basis of each degree slice of the saturated kernel.  A
    # degree-ascending greedy rank selection over such a pool realizes the
    # minimal Forney degrees, and that forces the chosen rows to generate the
    # whole saturated module, not a finite-index piece of it.
    cands: list[tuple[int, int, list[UniPoly]]] = []
    for d in range(max_deg + 1):
        width = ncols * (d + 1)
        sys_rows: list[list[int]] = []
        for ints, rdeg in rows_int:
            if rdeg < 0:
                continue
            for e in range(rdeg + d + 1):
                out = [0] * width
                hit = False
                for j, cs in ints:
                    for a, c in enumerate(cs):
                        b = e - a
                        if 0 <= b <= d and c:
                            out[j * (d + 1) + b] += c
                            hit = True
                if hit:
                    sys_rows.append(out)
        if not sys_rows:
            return None
        work = [list(r) for r in sys_rows]
        u, _ = _int_column_echelon(work)
        kern = []
        for c in range(width):
            if all(not work[i][c] for i in range(len(work))):
                kern.append([u[i][c] for i in range(width)])
        if len(kern) > 1:
            kern = _lll_reduce(kern)
        for vec in kern:
            col = []
            deg = -1
            for j in range(ncols):
                chunk = vec[j * (d + 1) : (j + 1) * (d + 1)]
                p = UniPoly(field, [Fraction(x) for x in chunk])
                deg = max(deg, p.degree())
                col.append(p)
            size = max(abs(x) for x in vec)
            cands.append((deg, len(str(size)), col))
        if len(cands) < want:
            continue
        cands.sort(key=lambda c: (c[0], c[1]))
        chosen: list[list[UniPoly]] = []
        for _, _, col in cands:
            if len(chosen) == want:
                break
            if morphism_rank(Mat(chosen + [col])) == len(chosen) + 1:
                chosen.append(col)
        if len(chosen) != want:
            continue
        out_m = Mat(chosen).T  # kernel vectors as columns
        if _unit_fitting_sampled(out_m, want, 40):
            return out_m
    return None


def _signed_minor_vector(sub: Mat) -> list[UniPoly] | None:
    """Alternating maximal minors of an r x (r+1) polynomial block.

    Entry i is (-1)^i det(sub with column i deleted); the vector spans the
    kernel of sub over k(t).  Over a field with enough points, one plain
    elimination per sample point yields the kernel direction and the pivot
    product, hence every signed minor at that point at once; the entries
    are then interpolated.  Small prime fields take one determinant per
    column instead.
    """
    rank = sub.rows
    ncols = sub.cols
    field = sub.entries[0][0].field
    dbound = 0
    for row in sub.entries:
        dbound += max(0, max(p.degree() for p in row))
    if isinstance(field, PrimeField) and field.p < dbound + 1:
        cols = list(range(ncols))
        vec = []
        for i in range(ncols):
            minor = poly_det(sub.submatrix(range(rank), [c for c in cols if c != i]))
            vec.append(minor if i % 2 == 0 else -minor)
        return vec
    zero = field.zero()
    vals: list[list] = [[] for _ in range(ncols)]
    xs = []
    for s in range(dbound + 1):
        x = field.from_int(s)
        xs.append(x)
        bx = [[p.eval(x) for p in row] for row in sub.entries]
        sign = 1
        prow = 0
        pivots: list[tuple[int, int]] = []
        for col in range(ncols):
            piv = None
            for i in range(prow, rank):
                if bx[i][col]:
                    piv = i
                    break
            if piv is None:
                continue
            if piv != prow:
                bx[prow], bx[piv] = bx[piv], bx[prow]
                sign = -sign
            pv = bx[prow][col]
            for i in range(prow + 1, rank):
                if bx[i][col]:
                    f = bx[i][col] / pv
                    bx[i] = [a - f * b for a, b in zip(bx[i], bx[prow])]
            pivots.append((prow, col))
            prow += 1
        if prow < rank:
            # rank drop at x: every maximal minor vanishes there
            for j in range(ncols):
                vals[j].append(zero)
            continue
        pivcols = [c for _, c in pivots]
        free = next(c for c in range(ncols) if c not in pivcols)
        kx = [zero] * ncols
        kx[free] = field.one()
        for prow_i, col in reversed(pivots):
            acc = zero
            row = bx[prow_i]
            for c in range(col + 1, ncols):
                if kx[c]:
                    acc = acc + row[c] * kx[c]
            kx[col] = -acc / row[col]
        det_piv = field.one()
        for prow_i, col in pivots:
            det_piv = det_piv * bx[prow_i][col]
        if sign < 0:
            det_piv = -det_piv
        # det(sub del col free) = det of the pivot block; scale the kernel
        # direction so coordinate `free` matches its signed minor
        lam = det_piv if free % 2 == 0 else -det_piv
        for j in range(ncols):
            vals[j].append(lam * kx[j])
    return [poly_interpolate(field, list(zip(xs, vals[j]))) for j in range(ncols)]


def _kernel_line_minors(m: Mat, rank: int) -> Mat | None:
    """Primitive generator of a corank-1 kernel through Cramer minors.

    Picks rank independent rows, takes the signed maximal minors of that
    (rank) x (rank+1) block, and strips polynomial and rational content.
    A rank-1 saturated module has a unique primitive generator, so content
    stripping alone saturates.  Returns None when the construction fails.
    """
    from .exactnum import poly_gcd

    if m.cols != rank + 1:
        return None
    field = m.entries[0][0].field
    sel: list[int] = []
    if m.rows >= rank and morphism_rank(Mat(m.entries[:rank])) == rank:
        sel = list(range(rank))
    else:
        for i in range(m.rows):
            if len(sel) == rank:
                break
            trial = sel + [i]
            if morphism_rank(Mat([m.entries[j] for j in trial])) == len(trial):
                sel.append(i)
    if len(sel) != rank:
        return None
    sub = Mat([m.entries[j] for j in sel])
    vec = _signed_minor_vector(sub)
    if vec is None or not any(vec):
        return None
    content = None
    for p in vec:
        if p:
            content = p if content is None else poly_gcd(content, p)
        if content is not None and content.degree() == 0:
            break
    if content.degree() > 0:
        vec = [poly_divexact(p, content) for p in vec]
    unit = _content_unit(vec)
    if unit is not None:
        vec = [p.scale(unit) for p in vec]
    out = Mat([[p] for p in vec])
    if not (m @ out).is_zero():
        return None
    return out


def saturate_kernel_small(m: Mat) -> Mat:
    """saturate_kernel with small coefficients over Q; falls back if needed."""
    rank = morphism_rank(m)
    want = m.cols - rank
    if want == 0:
        return saturate_kernel(m)
    if want == 1:
        res = _kernel_line_minors(m, rank)
        if res is not None:
            return res
    res = _poly_kernel_by_lattice(m, want, 10)
    if res is not None:
        return res
    return saturate_kernel(m)


def saturated_image_small(m: Mat) -> Mat:
    """saturated_image with small coefficients over Q; falls back if needed."""
    left = saturate_kernel_small(m.T)
    if left.cols == 0:
        field = m.entries[0][0].field
        zero_p = UniPoly(field, [])
        one_p = UniPoly.const(field, field.one())
        return Mat.identity(m.rows, zero_p, one_p)
    return saturate_kernel_small(left.T)


@dataclass
class SNFResult:
    d: Mat
    u: Mat
    v: Mat
    u_inv: Mat
    v_inv: Mat
    diagonal: list[UniPoly]


def _snf_full(m: Mat, track: bool = True) -> SNFResult:
    """Smith normal form over k[t] with all four change-of-basis matrices.

    Pivot selection: the nonzero entry of minimal degree in the remaining
    block, ties broken by lowest (row, col).  Diagonal entries come out monic.
    With track=False only the diagonal is produced (the transforms are None);
    skipping the four tracking matrices keeps large runs cheap.
    """
    field = None
    for r in m.entries:
        for a in r:
            field = a.field
            break
        break
    if field is None:
        raise ValueError("empty matrix")
    zero_p = UniPoly(field, [])
    one_p = UniPoly.const(field, field.one())
    a = [list(r) for r in m.entries]
    nr, nc = m.rows, m.cols
    if track:
        u = Mat.identity(nr, zero_p, one_p)
        ui = Mat.identity(nr, zero_p, one_p)
        v = Mat.identity(nc, zero_p, one_p)
        vi = Mat.identity(nc, zero_p, one_p)
    else:
        u = ui = v = vi = None

    def row_swap(i, j):
        a[i], a[j] = a[j], a[i]
        if not track:
            return
        u.entries[i], u.entries[j] = u.entries[j], u.entries[i]
        for k in range(nr):
            ui.entries[k][i], ui.entries[k][j] = ui.entries[k][j], ui.entries[k][i]

    def col_swap(i, j):
        for k in range(nr):
            a[k][i], a[k][j] = a[k][j], a[k][i]
        if not track:
            return
        for k in range(nc):
            v.entries[k][i], v.entries[k][j] = v.entries[k][j], v.entries[k][i]
        vi.entries[i], vi.entries[j] = vi.entries[j], vi.entries[i]

    def row_normalize(i):
        unit = _content_unit(a[i])
        if unit is None:
            return
        a[i] = [x.scale(unit) for x in a[i]]
        if not track:
            return
        inv = field.one() / unit
        u.entries[i] = [x.scale(unit) for x in u.entries[i]]
        for k in range(nr):
            ui.entries[k][i] = ui.entries[k][i].scale(inv)

    def col_normalize(j):
        unit = _content_unit([a[k][j] for k in range(nr)])
        if unit is None:
            return
        for k in range(nr):
            a[k][j] = a[k][j].scale(unit)
        if not track:
            return
        inv = field.one() / unit
        for k in range(nc):
            v.entries[k][j] = v.entries[k][j].scale(unit)
        vi.entries[j] = [x.scale(inv) for x in vi.entries[j]]

    def row_addmul(dst, src, q):
        # row_dst -= q * row_src ; inverse op on ui columns
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        if track:
            u.entries[dst] = [x - q * y for x, y in zip(u.entries[dst], u.entries[src])]
            for k in range(nr):
                ui.entries[k][src] = ui.entries[k][src] + q * ui.entries[k][dst]
        row_normalize(dst)

    def col_addmul(dst, src, q):
        for k in range(nr):
            a[k][dst] = a[k][dst] - q * a[k][src]
        if track:
            for k in range(nc):
                v.entries[k][dst] = v.entries[k][dst] - q * v.entries[k][src]
            vi.entries[src] = [x + q * y for x, y in zip(vi.entries[src], vi.entries[dst])]
        col_normalize(dst)

    def row_scale(i, c):
        a[i] = [x.scale(c) for x in a[i]]
        if not track:
            return
        u.entries[i] = [x.scale(c) for x in u.entries[i]]
        cinv = field.one() / c
        for k in range(nr):
            ui.entries[k][i] = ui.entries[k][i].scale(cinv)

    for i in range(nr):
        row_normalize(i)
    t = 0
    limit = min(nr, nc)
    while t < limit:
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j]:
                    key = (a[i][j].degree(), i, j)
                    if best is None or key < best[0]:
                        best = (key, i, j)
        if best is None:
            break
        _, bi, bj = best
        if bi != t:
            row_swap(t, bi)
        if bj != t:
            col_swap(t, bj)
        while True:
            # clear column t
            restart = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    q, rem = a[i][t].divmod(a[t][t])
                    if q:
                        row_addmul(i, t, q)
                    if rem:
                        row_swap(t, i)
                        restart = True
                        break
            if restart:
                continue
            for j in range(t + 1, nc):
                if a[t][j]:
                    q, rem = a[t][j].divmod(a[t][t])
                    if q:
                        col_addmul(j, t, q)
                    if rem:
                        col_swap(t, j)
                        restart = True
                        break
            if restart:
                continue
            col_ok = all(not a[i][t] for i in range(t + 1, nr))
            row_ok = all(not a[t][j] for j in range(t + 1, nc))
            if col_ok and row_ok:
                # divisibility of the remaining block
                bad = None
                for i in range(t + 1, nr):
                    for j in range(t + 1, nc):
                        if a[i][j] and a[i][j] % a[t][t]:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                row_addmul(t, bad, UniPoly.const(field, -field.one()))
        lead = a[t][t].leading()
        if lead != field.one():
            row_scale(t, field.one() / lead)
        t += 1

    d = Mat([[a[i][j] for j in range(nc)] for i in range(nr)])
    diag = [a[i][i] for i in range(limit)]
    return SNFResult(d, u, v, ui, vi, diag)


def smith_normal_form(m: Mat) -> tuple[Mat, Mat, Mat]:
    """(D, U, V) with U @ m @ V = D, d_i monic and d_i | d_{i+1}."""
    res = _snf_full(m)
    return res.d, res.u, res.v


def poly_det(m: Mat) -> UniPoly:
    """Determinant over k[t]: interpolated when the field is large enough.

    The degree is bounded by the smaller of the row and column degree
    sums, so evaluating at that many points plus one and interpolating is
    exact.  Small prime fields without enough points fall back to
    fraction-free (Bareiss) elimination.
    """
    if m.rows != m.cols:
        raise ValueError("determinant of non-square matrix")
    n = m.rows
    field = m.entries[0][0].field
    if n > 1:
        rbound = 0
        cbound = 0
        for i in range(n):
            rbound += max(0, max(m.entries[i][j].degree() for j in range(n)))
            cbound += max(0, max(m.entries[j][i].degree() for j in range(n)))
        dbound = min(rbound, cbound)
        if not (isinstance(field, PrimeField) and field.p < dbound + 1):
            pts = []
            for i in range(dbound + 1):
                x = field.from_int(i)
                pts.append((x, field_det(mat_eval(m, x))))
            return poly_interpolate(field, pts)
    one = UniPoly.const(field, field.one())
    work = [list(r) for r in m.entries]
    prev = one
    sign = 1
    for k in range(n - 1):
        if not work[k][k]:
            swap = None
            for i in range(k + 1, n):
                if work[i][k]:
                    swap = i
                    break
            if swap is None:
                return UniPoly(field, [])
            work[k], work[swap] = work[swap], work[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = work[k][k] * work[i][j] - work[i][k] * work[k][j]
                work[i][j] = poly_divexact(num, prev)
        prev = work[k][k]
    result = work[n - 1][n - 1]
    return -result if sign < 0 else result


def fitting_divisor(m: Mat, k: int) -> DivisorIdeal:
    """Monic generator of the gcd of all (k+1) x (k+1) minors.

    Computed through the Smith form: the gcd of j x j minors is d_1 ... d_j.
    Raises if the gcd is zero (k at or above the rank), since a zero
    generator does not define a divisor.  When k+1 exceeds the matrix size
    the minor set is empty and the unit ideal is returned.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    field = m.entries[0][0].field
    if k + 1 > min(m.rows, m.cols):
        return DivisorIdeal.unit(field)
    res = _snf_full(m, track=False)
    prod = UniPoly.const(field, field.one())
    for i in range(k + 1):
        prod = prod * res.diagonal[i]
    if not prod:
        raise ValidationError(
            f"all {k + 1} x {k + 1} minors vanish identically; zero ideal is not a divisor"
        )
    return DivisorIdeal(prod)


def fitting_divisor_minors(m: Mat, k: int) -> DivisorIdeal:
    """Brute-force variant: gcd over explicit minors, early exit at a unit.

    Exponential in the size; used as the independent cross-check in tests.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    field = m.entries[0][0].field
    size = k + 1
    if size > min(m.rows, m.cols):
        return DivisorIdeal.unit(field)
    acc: UniPoly | None = None
    for rows in combinations(range(m.rows), size):
        for cols in combinations(range(m.cols), size):
            minor = poly_det(m.submatrix(rows, cols))
            if not minor:
                continue
            if acc is None:
                acc = minor.monic()
            else:
                from .exactnum import poly_gcd

                acc = poly_gcd(acc, minor)
            if acc.degree() == 0:
                return DivisorIdeal.unit(field)
    if acc is None:
        raise ValidationError(
            f"all {size} x {size} minors vanish identically; zero ideal is not a divisor"
        )
    return DivisorIdeal(acc)


def _solve_unique_interp(m: Mat, b: Mat) -> tuple[bool, Mat | None]:
    """Interpolation solve when m has full column rank over k(t).

    Returns (True, X) or (True, None) when decided, (False, None) when the
    base field has too few points to carry the interpolation.  Sound because
    the solution is unique: a polynomial solution has Cramer-bounded degree
    and matches the pointwise solutions at every good sample point, so the
    interpolant either verifies exactly or no polynomial solution exists.
    """
    from .exactnum import poly_interpolate

    field = m.entries[0][0].field
    degm = max((p.degree() for row in m.entries for p in row), default=-1)
    degb = max((p.degree() for row in b.entries for p in row), default=-1)
    zero_p = UniPoly(field, [])
    if degb < 0:
        return True, Mat([[zero_p] * b.cols for _ in range(m.cols)])
    dbound = (m.cols - 1) * max(degm, 0) + degb
    npts = dbound + 1
    bad_cap = m.cols * max(degm, 0) + 5
    if not isinstance(field.zero(), Fraction):
        if getattr(field, "p", 0) < npts + bad_cap:
            return False, None
    xs: list = []
    vals: list[list[list]] = []
    c = 0
    bad = 0
    while len(xs) < npts:
        x = field.from_int(c)
        c += 1
        mc = mat_eval(m, x)
        bc = mat_eval(b, x)
        aug = [list(mc.entries[i]) + list(bc.entries[i]) for i in range(m.rows)]
        red, pivots = _rref(aug, m.cols)
        if len(pivots) < m.cols:
            bad += 1
            if bad > bad_cap:
                return False, None
            continue
        consistent = all(
            not red[i][m.cols + j]
            for i in range(m.cols, m.rows)
            for j in range(b.cols)
        )
        if not consistent:
            bad += 1
            if bad > bad_cap:
                return False, None
            continue
        xs.append(x)
        vals.append([[red[i][m.cols + j] for j in range(b.cols)] for i in range(m.cols)])
    out = [
        [
            poly_interpolate(field, [(xs[k], vals[k][i][j]) for k in range(npts)])
            for j in range(b.cols)
        ]
        for i in range(m.cols)
    ]
    x_mat = Mat(out)
    if m @ x_mat != b:
        return True, None
    return True, x_mat


def poly_solve_mat(m: Mat, b: Mat) -> Mat | None:
    """One polynomial solution X of m @ X = b, or None if there is none.

    Full-column-rank systems go through pointwise interpolation, which keeps
    the unique solution's coefficients at their true size.  Otherwise works
    through the column echelon form: echelon columns vanish strictly above
    their pivot rows, so forward substitution with exact divisions either
    produces the unique coordinates or proves non-membership.
    """
    if m.rows != b.rows:
        raise ValueError("shape mismatch in poly_solve_mat")
    field = m.entries[0][0].field
    zero_p = UniPoly(field, [])
    if 0 < m.cols <= m.rows and morphism_rank(m) == m.cols:
        decided, sol = _solve_unique_interp(m, b)
        if decided:
            return sol
    work, v, rank = _poly_column_echelon(m, track=True)
    if v is None:
        raise ValueError("empty matrix")
    pivot_row = []
    for j in range(rank):
        i = 0
        while not work[i][j]:
            i += 1
        pivot_row.append(i)
    coords: list[list[UniPoly]] = []
    for c in range(b.cols):
        target = [b.entries[i][c] for i in range(m.rows)]
        ys = []
        for j in range(rank):
            val = target[pivot_row[j]]
            if not val:
                ys.append(zero_p)
                continue
            q, rem = val.divmod(work[pivot_row[j]][j])
            if rem:
                return None
            ys.append(q)
            for i in range(m.rows):
                if work[i][j]:
                    target[i] = target[i] - q * work[i][j]
        if any(target):
            return None
        coords.append(ys)
    out = [[zero_p] * b.cols for _ in range(m.cols)]
    for c in range(b.cols):
        for j in range(rank):
            yj = coords[c][j]
            if not yj:
                continue
            for i in range(m.cols):
                if v.entries[i][j]:
                    out[i][c] = out[i][c] + yj * v.entries[i][j]
    return Mat(out)


def poly_solve(m: Mat, b: list[UniPoly]) -> list[UniPoly] | None:
    """One solution of m @ x = b over k[t], or None if there is none."""
    res = poly_solve_mat(m, Mat([[p] for p in b]))
    if res is None:
        return None
    return [res.entries[i][0] for i in range(m.cols)]


@dataclass
class CanonicalFactorization:
    """phi = include @ middle @ project with the degeneration on the middle.

    project has a polynomial right inverse, include has full column rank at
    every point of the base, and middle is diag(1, ..., 1, g) where (g)
    generates the degeneration divisor.
    """

    project: Mat
    middle: Mat
    include: Mat
    divisor: DivisorIdeal
    project_rinv: Mat
    # saturated ker(project), or None when project is square (empty kernel)
    project_kernel: "Mat | None" = None


def _reduce_columns_mod(m: Mat, gens: Mat) -> Mat:
    """Reduce each column of m by the column module of gens, degrees only.

    Subtracts polynomial multiples of generator columns while the leading
    coefficient vector stays proportional to a generator's, so each output
    column is congruent to the input modulo the module and never grows.
    """
    if gens.cols == 0:
        return m
    field = m.entries[0][0].field
    gcols = []
    for j in range(gens.cols):
        col = [gens.entries[i][j] for i in range(gens.rows)]
        dg = max(p.degree() for p in col)
        if dg < 0:
            continue
        lc = [p.coeffs[dg] if p.degree() == dg else field.zero() for p in col]
        gcols.append((dg, lc, col))
    out_cols = []
    for c in range(m.cols):
        v = [m.entries[i][c] for i in range(m.rows)]
        while True:
            dv = max(p.degree() for p in v)
            if dv < 0:
                break
            lv = [p.coeffs[dv] if p.degree() == dv else field.zero() for p in v]
            hit = False
            for dg, lc, col in gcols:
                if dg > dv:
                    continue
                lam = None
                ok = True
                for a, b in zip(lv, lc):
                    if b:
                        lam = a / b
                        break
                if lam is None or not lam:
                    continue
                for a, b in zip(lv, lc):
                    if a != lam * b:
                        ok = False
                        break
                if not ok:
                    continue
                fac = UniPoly(field, [field.zero()] * (dv - dg) + [lam])
                v = [p - fac * q for p, q in zip(v, col)]
                hit = True
                break
            if not hit:
                break
        out_cols.append(v)
    return Mat([[out_cols[c][i] for c in range(m.cols)] for i in range(m.rows)])


def canonical_factorization(m: Mat, r: int) -> CanonicalFactorization:
    """Factor a generically-rank-r map whose corank-1 locus is a divisor.

    Requires rank r over k(t), all (r-1) x (r-1) minors jointly coprime, and
    r x r minors not all zero.  These make the factorization canonical: the
    row span of ``project`` and column span of ``include`` over k(t) agree
    across any valid factorization.

    project and include are reduced bases of the saturated row and column
    modules of m, so they are fiberwise surjective / injective; the middle
    carries the whole degeneration and its Smith form is diag(1, ..., 1, g).
    """
    field = m.entries[0][0].field
    if r == 0:
        raise ValidationError("rank 0 map has no canonical factorization")
    rank = morphism_rank(m)
    if rank != r:
        raise ValidationError(f"rank over k(t) is {rank}, expected {r}")
    zero_p = UniPoly(field, [])
    one_p = UniPoly.const(field, field.one())
    project = saturated_image_small(m.T).T
    include = saturated_image_small(m)
    lifted = poly_solve_mat(include, m)
    if lifted is None:
        raise ValidationError("factorization identity failed")
    middle_t = poly_solve_mat(project.T, lifted.T)
    if middle_t is None:
        raise ValidationError("factorization identity failed")
    middle = middle_t.T
    if include @ middle @ project != m:
        raise ValidationError("factorization identity failed")
    det = poly_det(middle)
    if not det:
        raise ValidationError("factorization identity failed")
    if r > 1 and not fitting_is_unit(middle, r - 2):
        raise ValidationError(
            "lower determinantal divisor is nontrivial; degeneration is not divisorial"
        )
    g = det.monic()
    right = poly_solve_mat(project, Mat.identity(r, zero_p, one_p))
    if right is None:
        raise ValidationError("projection lost its right inverse")
    kern = None
    if project.cols > r:
        # the solver's section can carry large degrees; reduce it modulo
        # ker(project) to pin the canonical low-degree representative
        kern = saturate_kernel_small(project)
        right = _reduce_columns_mod(right, kern)
    if project @ right != Mat.identity(r, zero_p, one_p):
        raise ValidationError("projection lost its right inverse")
    return CanonicalFactorization(project, middle, include, DivisorIdeal(g), right, kern)


def kernel_vector_mod(m: Mat, h: UniPoly) -> list[UniPoly]:
    """Generator of ker(m mod h) when that kernel is a line at every factor.

    h must be monic of degree >= 1 (squarefree in the intended use).  Runs
    Gaussian elimination over k[t]/(h); pivots must be invertible mod h, so a
    divisor whose factors degenerate in different directions is rejected.
    The returned vector has a unit coordinate (the free column gets 1).
    """
    from .exactnum import poly_ext_gcd, poly_gcd

    field = h.field
    if h.degree() < 1 or h.leading() != field.one():
        raise ValueError("modulus must be monic of degree >= 1")
    n = m.cols
    work = [[m.entries[i][j] % h for j in range(n)] for i in range(m.rows)]
    pivots: list[tuple[int, int]] = []
    prow = 0
    free: list[int] = []
    for col in range(n):
        sel = None
        for i in range(prow, m.rows):
            e = work[i][col]
            if e and poly_gcd(e, h).degree() == 0:
                sel = i
                break
        if sel is None:
            if any(work[i][col] for i in range(prow, m.rows)):
                raise ValidationError(
                    "degeneration splits across the divisor; no single kernel line"
                )
            free.append(col)
            continue
        work[prow], work[sel] = work[sel], work[prow]
        _, inv, _ = poly_ext_gcd(work[prow][col], h)
        work[prow] = [(inv * x) % h for x in work[prow]]
        for i in range(m.rows):
            if i != prow and work[i][col]:
                f = work[i][col]
                work[i] = [(x - f * y) % h for x, y in zip(work[i], work[prow])]
        pivots.append((prow, col))
        prow += 1
    if len(free) != 1:
        raise ValidationError("kernel mod the divisor is not a line")
    fc = free[0]
    v = [UniPoly(field, []) for _ in range(n)]
    v[fc] = UniPoly.const(field, field.one())
    for row_i, col in pivots:
        v[col] = (-work[row_i][fc]) % h
    return v


def linear_solve_mod(m: Mat, b: list[UniPoly], h: UniPoly) -> list[UniPoly] | None:
    """One solution of m @ x = b over k[t]/(h), or None if inconsistent.

    Same pivot discipline as kernel_vector_mod: pivots must be invertible
    mod h, and a nonzero column with no invertible entry is rejected because
    the system splits across the factors of h.  Free coordinates are set to
    zero; all returned entries are reduced mod h.
    """
    from .exactnum import poly_ext_gcd, poly_gcd

    field = h.field
    if h.degree() < 1 or h.leading() != field.one():
        raise ValueError("modulus must be monic of degree >= 1")
    n = m.cols
    work = [[m.entries[i][j] % h for j in range(n)] + [b[i] % h] for i in range(m.rows)]
    pivots: list[tuple[int, int]] = []
    prow = 0
    for col in range(n):
        sel = None
        for i in range(prow, m.rows):
            e = work[i][col]
            if e and poly_gcd(e, h).degree() == 0:
                sel = i
                break
        if sel is None:
            if any(work[i][col] for i in range(prow, m.rows)):
                raise ValidationError(
                    "degeneration splits across the divisor; no single kernel line"
                )
            continue
        work[prow], work[sel] = work[sel], work[prow]
        _, inv, _ = poly_ext_gcd(work[prow][col], h)
        work[prow] = [(inv * x) % h for x in work[prow]]
        for i in range(m.rows):
            if i != prow and work[i][col]:
                f = work[i][col]
                work[i] = [(x - f * y) % h for x, y in zip(work[i], work[prow])]
        pivots.append((prow, col))
        prow += 1
    for i in range(prow, m.rows):
        if work[i][n]:
            return None
    x = [UniPoly(field, []) for _ in range(n)]
    for row_i, col in pivots:
        x[col] = work[row_i][n]
    return x


def fitting_is_unit(m: Mat, k: int) -> bool:
    """Whether the gcd of all (k+1) x (k+1) minors is a unit.

    Tries a handful of random minors first (a unit gcd over a sample is
    already conclusive), then settles the negative case through the Smith
    diagonal, which stays exact without enumerating every minor.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k + 1 > min(m.rows, m.cols):
        return True
    if _unit_fitting_sampled(m, k + 1, 24):
        return True
    try:
        return fitting_divisor(m, k).is_unit()
    except ValidationError:
        return False


def unimodular_completion_last(v: list[UniPoly]) -> tuple[Mat, Mat]:
    """Unimodular (e, e_inv) over k[t] whose last column of e equals v.

    Some entry of v must be a unit (nonzero constant); that is guaranteed for
    vectors coming out of kernel_vector_mod.
    """
    n = len(v)
    if n == 0:
        raise ValueError("empty vector")
    field = v[0].field
    idx = None
    for i, p in enumerate(v):
        if p and p.degree() == 0:
            idx = i
            break
    if idx is None:
        raise ValidationError("no unit coordinate to pivot the completion on")
    zero_p = UniPoly(field, [])
    one_p = UniPoly.const(field, field.one())
    unit = v[idx].coeffs[0]
    e0 = Mat.identity(n, zero_p, one_p)
    e0_inv = Mat.identity(n, zero_p, one_p)
    for i in range(n):
        e0.entries[i][idx] = v[i]
        if i == idx:
            e0_inv.entries[i][idx] = UniPoly.const(field, field.one() / unit)
        else:
            e0_inv.entries[i][idx] = v[i].scale(-(field.one() / unit))
    perm = list(range(n))
    perm[idx], perm[n - 1] = perm[n - 1], perm[idx]
    e = e0.submatrix(range(n), perm)
    e_inv = e0_inv.submatrix(perm, range(n))
    return e, e_inv
