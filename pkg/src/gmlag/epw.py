"""EPW strata of P(V6) and the dual strata of P(V6*) for a Lagrangian A.

The stratum of [v] is dim(A intersect v^Lambda^2 V6), read off the corank
of a 10x15 wedge pairing; the dual stratum of a hyperplane ker(w) is
dim(A intersect Lambda^3 ker w), read off a contraction pairing.  Prime
fields get exhaustive censuses (vectorized, chunked, merged per range with
deterministic order); over the rationals the level-1 locus is a sextic
hypersurface whose equation is extracted from compressed determinants and
certified pointwise against the rank oracle.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field as _dfield
from fractions import Fraction
from math import gcd, isqrt
from typing import Sequence

import numpy as np

from . import fastenum
from .errors import ResourceBoundError, ValidationError
from .exactnum import Field, PrimeField, UniPoly, squarefree_decomposition
from .exterior import CONTRACT_TABLES, EPW_TABLES, V6WEDGE2_TABLES
from .gmdata import LagrangianData, decomposable_scan, validate_lagrangian
from .linalg import Mat, field_rank

# degree-6 monomials in the six coordinates of V6, as exponent tuples, in
# the order combinations_with_replacement generates them
MON6: tuple = tuple(
    tuple(combo.count(i) for i in range(6))
    for combo in itertools.combinations_with_replacement(range(6), 6)
)

_EPW_NP = np.stack([fastenum.int_array(t) for t in EPW_TABLES])
_CONTRACT_NP = np.stack([fastenum.int_array(t) for t in CONTRACT_TABLES])


def _coerce_vec(field: Field, v: Sequence, name: str) -> list:
    if len(v) != 6:
        raise ValidationError(f"{name} must have six coordinates")
    out = [field.from_int(x) if isinstance(x, int) else x for x in v]
    if not any(out):
        raise ValidationError(f"{name} must be nonzero")
    return out


def _combined_table(field: Field, v: list, tables) -> Mat:
    """sum_k v[k] * tables[k] as a 20 x 15 matrix over the field.

    Table entries are always -1, 0 or 1, so no general scalar products are
    needed.
    """
    rows = [[field.zero()] * 15 for _ in range(20)]
    for k, vk in enumerate(v):
        if not vk:
            continue
        tab = tables[k]
        for s in range(20):
            trow = tab[s]
            orow = rows[s]
            for b in range(15):
                e = trow[b]
                if e == 1:
                    orow[b] = orow[b] + vk
                elif e == -1:
                    orow[b] = orow[b] - vk
    return Mat(rows)


def pairing_matrix(lag: LagrangianData, v: Sequence) -> Mat:
    """10 x 15 matrix of <a_i ^ v ^ beta_j> over the bivector basis.

    The subspace v ^ Lambda^2 V6 is Lagrangian, hence equal to its own
    perp, so a member of A lies in it exactly when its row pairs to zero
    with every column.  dim(A intersect v^Lambda^2 V6) = 10 - rank.
    """
    vv = _coerce_vec(lag.field, v, "v")
    return lag.a @ _combined_table(lag.field, vv, EPW_TABLES)


def stratum(lag: LagrangianData, v: Sequence) -> int:
    """The level of [v] in the chain Y >= 0, Y >= 1, ..."""
    return 10 - field_rank(pairing_matrix(lag, v))


def dual_pairing_matrix(lag: LagrangianData, w: Sequence) -> Mat:
    """10 x 15 matrix whose corank is dim(A intersect Lambda^3 ker w).

    A trivector lies in Lambda^3 of the hyperplane ker(w) exactly when its
    contraction against the covector w vanishes.
    """
    ww = _coerce_vec(lag.field, w, "w")
    return lag.a @ _combined_table(lag.field, ww, CONTRACT_TABLES)


def dual_stratum(lag: LagrangianData, w: Sequence) -> int:
    return 10 - field_rank(dual_pairing_matrix(lag, w))


def fv_span(field: Field, v: Sequence) -> Mat:
    """15 x 20 matrix whose rows span v ^ Lambda^2 V6 (rank 10).

    Used as the brute-force route to the stratum: stack these rows under
    the rows of A and eliminate over all 20 coordinates.
    """
    vv = _coerce_vec(field, v, "v")
    return _combined_table(field, vv, EPW_TABLES).T


# ---------------------------------------------------------------------------
# censuses over prime fields


@dataclass
class EPWReport:
    """Census of the strata and dual strata over one finite field.

    counts[l] is the number of points of P^5(F_q) with stratum exactly l;
    the dual side counts hyperplanes the same way.  Witnesses hold the
    first point found at each level, in enumeration order.
    """

    field_label: str
    total: int
    counts: dict
    dual_counts: dict
    witnesses: dict
    dual_witnesses: dict
    certified_free: bool
    notes: list = _dfield(default_factory=list)
    sextic: "HomogeneousForm | None" = None

    def at_least(self, ell: int, dual: bool = False) -> int:
        src = self.dual_counts if dual else self.counts
        return sum(c for l, c in src.items() if l >= ell)


def _strata_census(tabs: np.ndarray, p: int) -> tuple[dict, dict]:
    """Exhaustive strata of P^5(F_p) for a stacked (6, 10, 15) pairing.

    Chunks of canonical representatives are processed independently and the
    per-level counts added, so ranges could run concurrently; the witness
    for each level is the first point in the fixed enumeration order.
    """
    counts: dict = {}
    witnesses: dict = {}
    for block in fastenum.projective_chunks(6, p):
        mats = np.einsum("nk,kij->nij", block, tabs) % p
        levels = 10 - fastenum.batch_rank(mats, p)
        for ell in np.unique(levels):
            sel = np.nonzero(levels == ell)[0]
            ell_i = int(ell)
            counts[ell_i] = counts.get(ell_i, 0) + int(sel.size)
            if ell_i not in witnesses:
                witnesses[ell_i] = tuple(int(x) for x in block[sel[0]])
    return counts, witnesses


def census(
    lag: LagrangianData,
    q: int | None = None,
    bound: int = 13,
    certified_decomposable_free: bool = False,
) -> EPWReport:
    """Exhaustive primal and dual stratum counts over the field of A.

    Pass certified_decomposable_free=True only when an exhaustive scan
    (decomposable_scan over this field) returned no members; the report
    then hard-asserts that Y>=4 is empty.  Without the certificate, empty
    levels are reported as inconclusive: a nonempty scheme over F_q can
    lack F_q-points.
    """
    validate_lagrangian(lag)
    if not isinstance(lag.field, PrimeField):
        raise ValidationError("censuses enumerate a finite prime field")
    p = lag.field.p
    if q is not None and q != p:
        raise ValidationError(f"q = {q} does not match the field of A (order {p})")
    if p > bound:
        raise ResourceBoundError(f"census over F_{p} exceeds the bound q <= {bound}")
    a_res = fastenum.mat_residues(lag.a)
    primal = np.stack([a_res @ _EPW_NP[k] % p for k in range(6)])
    dual = np.stack([a_res @ _CONTRACT_NP[k] % p for k in range(6)])
    counts, wit = _strata_census(primal, p)
    dcounts, dwit = _strata_census(dual, p)
    total = fastenum.count_projective(6, p)
    if sum(counts.values()) != total or sum(dcounts.values()) != total:
        raise ValidationError("census counts do not add up to #P^5(F_q)")

    notes = []
    y1 = sum(c for l, c in counts.items() if l >= 1)
    ref = p**4 + p**3 + p**2 + p + 1
    notes.append(f"Y>=1 has {y1} points; smooth sextic reference q^4+...+1 = {ref}")
    y2 = sum(c for l, c in counts.items() if l >= 2)
    notes.append(f"Y>=2 has {y2} points; surface scale q^2 = {p * p}")
    for ell in (1, 2, 3):
        if sum(c for l, c in counts.items() if l >= ell) == 0:
            notes.append(
                f"Y>={ell} has no F_{p}-points: inconclusive, a nonempty "
                "scheme over a finite field can lack rational points"
            )
    y4 = sum(c for l, c in counts.items() if l >= 4)
    if certified_decomposable_free:
        if y4 != 0:
            raise ValidationError(
                "nonempty Y>=4 contradicts the attached decomposable-freeness certificate"
            )
        notes.append("Y>=4 empty, as forced for a certified decomposable-free A")
    elif y4 == 0:
        notes.append(
            "Y>=4 has no F_p-points; without a decomposable-freeness "
            "certificate this is inconclusive"
        )
    return EPWReport(
        field_label=f"F{p}",
        total=total,
        counts=counts,
        dual_counts=dcounts,
        witnesses=wit,
        dual_witnesses=dwit,
        certified_free=certified_decomposable_free,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# reduction mod p and the decomposable-freeness heuristic


def reduce_lagrangian_mod(lag: LagrangianData, p: int) -> LagrangianData | None:
    """Reduction of a rational Lagrangian mod p, or None at a bad prime.

    Needs every denominator invertible and the reduced rank to stay 10;
    then the reduced span equals the reduction of the saturated lattice of
    A, so membership statements transfer.
    """
    if isinstance(lag.field, PrimeField):
        raise ValidationError("input already lives over a prime field")
    fp = PrimeField(p)
    rows = []
    for row in lag.a.entries:
        out = []
        for x in row:
            fr = Fraction(x)
            if fr.denominator % p == 0:
                return None
            out.append(fp.from_int(fr.numerator) / fp.from_int(fr.denominator))
        rows.append(out)
    a_p = Mat(rows)
    if field_rank(a_p) != 10:
        return None
    return LagrangianData(field=fp, a=a_p)


def decomposable_free_heuristic(lag: LagrangianData, primes: Sequence[int] = (3, 5)) -> bool:
    """True certifies that A over Q contains no decomposable vector.

    A primitive decomposable member is the Pluecker vector of a saturated
    rank-3 sublattice, so it reduces to a nonzero decomposable member of
    the reduced Lagrangian at every good prime; an exhaustive scan finding
    none over one good prime therefore rules them out over Q.  False is
    inconclusive (a reduction can acquire decomposables of its own).
    """
    validate_lagrangian(lag)
    for p in primes:
        red = reduce_lagrangian_mod(lag, p)
        if red is None:
            continue
        try:
            rep = decomposable_scan(red, "exhaustive")
        except ResourceBoundError:
            continue
        if rep.certified:
            return True
    return False


# ---------------------------------------------------------------------------
# the sextic


@dataclass
class HomogeneousForm:
    """Dense degree-6 form in six variables, coefficients parallel to MON6."""

    field: Field
    coeffs: list

    def __post_init__(self):
        if len(self.coeffs) != len(MON6):
            raise ValidationError(f"expected {len(MON6)} coefficients")

    @classmethod
    def from_terms(cls, field: Field, terms: dict) -> "HomogeneousForm":
        """Build from a sparse {exponent tuple: coefficient} mapping."""
        idx = {m: i for i, m in enumerate(MON6)}
        coeffs = [field.zero()] * len(MON6)
        for mono, c in terms.items():
            if mono not in idx:
                raise ValidationError(f"{mono} is not a degree-6 exponent tuple")
            coeffs[idx[mono]] = coeffs[idx[mono]] + c
        return cls(field, coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def eval(self, vals: Sequence):
        f = self.field
        vv = _coerce_vec(f, vals, "point")
        pw = []
        for x in vv:
            row = [f.one()]
            for _ in range(6):
                row.append(row[-1] * x)
            pw.append(row)
        acc = f.zero()
        for mono, c in zip(MON6, self.coeffs):
            if not c:
                continue
            term = c
            for i in range(6):
                if mono[i]:
                    term = term * pw[i][mono[i]]
            acc = acc + term
        return acc

    def restrict(self, v0: Sequence, v1: Sequence) -> UniPoly:
        """Substitute v0 + s*v1 and return the polynomial in s."""
        f = self.field
        a = _coerce_vec(f, v0, "v0")
        b = _coerce_vec(f, v1, "v1")
        lin = [UniPoly(f, [a[i], b[i]]) for i in range(6)]
        pw = []
        for i in range(6):
            row = [UniPoly.const(f, f.one())]
            for _ in range(6):
                row.append(row[-1] * lin[i])
            pw.append(row)
        acc = UniPoly(f, [])
        for mono, c in zip(MON6, self.coeffs):
            if not c:
                continue
            term = UniPoly.const(f, c)
            for i in range(6):
                if mono[i]:
                    term = term * pw[i][mono[i]]
            acc = acc + term
        return acc


# deterministic Miller-Rabin, valid far beyond 64 bits with these witnesses
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n % w == 0:
            return n == w
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_stream():
    """Primes just below 2^29, descending; elimination products fit int64."""
    n = 2**29 - 1
    while n > 2**28:
        if _is_prime(n):
            yield n
        n -= 2


def _rank_mod_p(rows: list, p: int) -> int:
    """Rank of a small integer matrix mod p (entries any ints)."""
    m = [[x % p for x in row] for row in rows]
    nr, nc = len(m), len(m[0])
    rank = 0
    for c in range(nc):
        piv = None
        for r in range(rank, nr):
            if m[r][c]:
                piv = r
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], p - 2, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for r in range(nr):
            if r != rank and m[r][c]:
                f = m[r][c]
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[rank])]
        rank += 1
        if rank == nr:
            break
    return rank


def _det_mod_p(rows: list, p: int) -> int:
    m = [[x % p for x in row] for row in rows]
    n = len(m)
    det = 1
    for c in range(n):
        piv = None
        for r in range(c, n):
            if m[r][c]:
                piv = r
                break
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = p - det
        det = det * m[c][c] % p
        inv = pow(m[c][c], p - 2, p)
        for r in range(c + 1, n):
            if m[r][c]:
                f = m[r][c] * inv % p
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[c])]
    return det


# univariate polynomials mod p as int lists, low degree first


def _ptrim(c: list) -> list:
    while c and c[-1] == 0:
        c.pop()
    return c


def _pmul(a: list, b: list, p: int) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _pmod(a: list, m: list, p: int) -> list:
    out = [x % p for x in a]
    dm = len(m) - 1
    inv = pow(m[-1], p - 2, p)
    while len(out) - 1 >= dm and _ptrim(out):
        d = len(out) - 1
        f = out[-1] * inv % p
        for i in range(dm + 1):
            out[d - dm + i] = (out[d - dm + i] - f * m[i]) % p
        _ptrim(out)
    return out


def _pgcd(a: list, b: list, p: int) -> list:
    a, b = _ptrim([x % p for x in a]), _ptrim([x % p for x in b])
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], p - 2, p)
        a = [x * inv % p for x in a]
    return a


def _ppowmod(base: list, e: int, m: list, p: int) -> list:
    out = [1]
    acc = _pmod(base, m, p)
    while e:
        if e & 1:
            out = _pmod(_pmul(out, acc, p), m, p)
        acc = _pmod(_pmul(acc, acc, p), m, p)
        e >>= 1
    return out


def _proots(g: list, p: int, rng: random.Random) -> list:
    """Roots in F_p of a monic squarefree-enough g of small degree."""
    g = _ptrim([x % p for x in g])
    if len(g) <= 1:
        return []
    xp = _ppowmod([0, 1], p, g, p)
    lin = _pgcd(_psub(xp, [0, 1], p), g, p)
    out = []
    stack = [lin]
    while stack:
        f = stack.pop()
        d = len(f) - 1
        if d <= 0:
            continue
        if d == 1:
            out.append((-f[0]) % p)
            continue
        # random split: gcd with (x+a)^((p-1)/2) - 1 separates the roots
        while True:
            a = rng.randrange(p)
            h = _ppowmod([a, 1], (p - 1) // 2, f, p)
            h = _pgcd(_psub(h, [1], p), f, p)
            if 0 < len(h) - 1 < d:
                stack.append(h)
                stack.append(_pdivexact(f, h, p))
                break
    return sorted(out)


def _psub(a: list, b: list, p: int) -> list:
    n = max(len(a), len(b))
    return _ptrim([
        ((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p
        for i in range(n)
    ])


def _pdivexact(a: list, b: list, p: int) -> list:
    out = []
    rem = [x % p for x in a]
    inv = pow(b[-1], p - 2, p)
    db = len(b) - 1
    while len(rem) - 1 >= db:
        f = rem[-1] * inv % p
        out.append(f)
        for i in range(db + 1):
            rem[len(rem) - 1 - db + i] = (rem[len(rem) - 1 - db + i] - f * b[i]) % p
        rem.pop()
        _ptrim(rem)
    out.reverse()
    return _ptrim(out)


def _inv_vandermonde(nodes: list, p: int) -> list:
    """Inverse of the Vandermonde matrix at the given nodes, mod p."""
    n = len(nodes)
    aug = []
    for i, x in enumerate(nodes):
        row = [pow(x, j, p) for j in range(n)]
        row += [1 if k == i else 0 for k in range(n)]
        aug.append(row)
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c])
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = pow(aug[c][c], p - 2, p)
        aug[c] = [x * inv % p for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [(x - f * y) % p for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def _reduce_a_mod(lag: LagrangianData, p: int) -> np.ndarray | None:
    """A's matrix reduced mod p as int64, or None at a bad prime."""
    rows = []
    for row in lag.a.entries:
        out = []
        for x in row:
            fr = Fraction(x)
            if fr.denominator % p == 0:
                return None
            out.append(fr.numerator * pow(fr.denominator, p - 2, p) % p)
        rows.append(out)
    arr = np.array(rows, dtype=np.int64)
    if _rank_mod_p(rows, p) != 10:
        return None
    return arr


def _sample_stratum_points(
    btab: np.ndarray, c1: np.ndarray, c2: np.ndarray, p: int, rng: random.Random,
    want: int = 520, line_cap: int = 6000,
) -> np.ndarray | None:
    """Points of the level->=1 locus over F_p, found on random pencils.

    On each line the two compressed determinants are interpolated from 11
    nodes; roots of their gcd are the candidate base points and the rank
    oracle keeps the genuine ones.  Points are deduplicated projectively.
    """
    nodes = list(range(11))
    vinv = _inv_vandermonde(nodes, p)
    found: dict = {}
    for _ in range(line_cap):
        if len(found) >= want:
            break
        u = np.array([rng.randrange(p) for _ in range(6)], dtype=np.int64)
        w = np.array([rng.randrange(p) for _ in range(6)], dtype=np.int64)
        if not w.any():
            continue
        mu = np.einsum("k,kij->ij", u, btab) % p
        mw = np.einsum("k,kij->ij", w, btab) % p
        d1, d2 = [], []
        for s in nodes:
            mv = (mu + s * mw) % p
            d1.append(_det_mod_p((mv @ c1 % p).tolist(), p))
            d2.append(_det_mod_p((mv @ c2 % p).tolist(), p))
        p1 = _ptrim([sum(vinv[j][i] * d1[i] for i in range(11)) % p for j in range(11)])
        p2 = _ptrim([sum(vinv[j][i] * d2[i] for i in range(11)) % p for j in range(11)])
        if not p1 or not p2:
            continue
        g = _pgcd(p1, p2, p)
        if len(g) <= 1:
            continue
        for s0 in _proots(g, p, rng):
            v = (u + s0 * w) % p
            if not v.any():
                continue
            mv = np.einsum("k,kij->ij", v, btab) % p
            if _rank_mod_p(mv.tolist(), p) > 9:
                continue
            lead = int(np.nonzero(v)[0][0])
            inv = pow(int(v[lead]), p - 2, p)
            key = tuple(int(x) * inv % p for x in v)
            found[key] = True
    if len(found) < want:
        return None
    return np.array(list(found.keys())[:want], dtype=np.int64)


def _monomial_matrix(pts: np.ndarray, p: int) -> np.ndarray:
    n = pts.shape[0]
    pw = np.ones((n, 6, 7), dtype=np.int64)
    for e in range(1, 7):
        pw[:, :, e] = pw[:, :, e - 1] * pts % p
    cols = []
    for mono in MON6:
        acc = np.ones(n, dtype=np.int64)
        for i in range(6):
            if mono[i]:
                acc = acc * pw[:, i, mono[i]] % p
        cols.append(acc)
    return np.stack(cols, axis=1)


def _kernel_dim1_mod_p(e_mat: np.ndarray, p: int) -> list | None:
    """The kernel vector of an (N, 462) system mod p, if the kernel is a line."""
    r = e_mat % p
    nrows, ncols = r.shape
    pivots = []
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        cand = np.nonzero(r[row:, col])[0]
        if cand.size == 0:
            continue
        sel = row + int(cand[0])
        if sel != row:
            r[[row, sel]] = r[[sel, row]]
        inv = pow(int(r[row, col]), p - 2, p)
        r[row] = r[row] * inv % p
        fac = r[:, col].copy()
        fac[row] = 0
        r -= fac[:, None] * r[row][None, :]
        r %= p
        pivots.append(col)
        row += 1
    if len(pivots) != ncols - 1:
        return None
    pivset = set(pivots)
    free = next(c for c in range(ncols) if c not in pivset)
    vec = [0] * ncols
    vec[free] = 1
    for i, c in enumerate(pivots):
        vec[c] = (-int(r[i, free])) % p
    return vec


def _rat_recon(r: int, m: int) -> Fraction | None:
    """num/den congruent to r mod m with both below sqrt(m/2)."""
    bound = isqrt(m // 2)
    a0, a1 = m, r % m
    x0, x1 = 0, 1
    while a1 > bound:
        q = a0 // a1
        a0, a1 = a1, a0 - q * a1
        x0, x1 = x1, x0 - q * x1
    if x1 == 0 or abs(x1) > bound:
        return None
    num, den = a1, x1
    if den < 0:
        num, den = -num, -den
    if (num - r * den) % m != 0 or gcd(den, m) != 1:
        return None
    return Fraction(num, den)


def _rand_compression(rng: random.Random) -> np.ndarray:
    return np.array(
        [[rng.randint(-3, 3) for _ in range(10)] for _ in range(15)], dtype=np.int64
    )


def _extract_once(
    lag: LagrangianData, c1: np.ndarray, c2: np.ndarray, rng: random.Random, nprimes: int
) -> list | None:
    """One full modular extraction: per-prime kernels, CRT, rational lift.

    Returns the primitive integer coefficient list (as Fractions) or None
    when any stage degenerates; the caller retries with fresh compressions.
    """
    kerns = []
    tried = 0
    for p in _prime_stream():
        tried += 1
        if tried > nprimes + 6:
            break
        a_p = _reduce_a_mod(lag, p)
        if a_p is None:
            continue
        btab = np.stack([a_p @ _EPW_NP[k] % p for k in range(6)])
        pts = _sample_stratum_points(btab, c1 % p, c2 % p, p, rng)
        if pts is None:
            continue
        kv = _kernel_dim1_mod_p(_monomial_matrix(pts, p), p)
        if kv is None:
            continue
        kerns.append((p, kv))
        if len(kerns) == nprimes:
            break
    if len(kerns) < nprimes:
        return None
    idx = next(
        (i for i in range(len(MON6)) if all(kv[i] for _, kv in kerns)), None
    )
    if idx is None:
        return None
    modulus = 1
    residues = [0] * len(MON6)
    for p, kv in kerns:
        inv = pow(kv[idx], p - 2, p)
        scaled = [x * inv % p for x in kv]
        if modulus == 1:
            residues = scaled
            modulus = p
            continue
        # combine one prime at a time
        minv = pow(modulus % p, p - 2, p)
        residues = [
            (r + modulus * ((s - r) * minv % p)) % (modulus * p)
            for r, s in zip(residues, scaled)
        ]
        modulus *= p
    lifted = []
    for r in residues:
        fr = _rat_recon(r, modulus)
        if fr is None:
            return None
        lifted.append(fr)
    den_lcm = 1
    for fr in lifted:
        den_lcm = den_lcm * fr.denominator // gcd(den_lcm, fr.denominator)
    ints = [int(fr * den_lcm) for fr in lifted]
    content = 0
    for x in ints:
        content = gcd(content, x)
    ints = [x // content for x in ints]
    first = next(x for x in ints if x)
    if first < 0:
        ints = [-x for x in ints]
    return [Fraction(x) for x in ints]


def _verify_sextic(lag: LagrangianData, form: "HomogeneousForm", rng: random.Random,
                   samples: int = 500) -> bool:
    """Pointwise agreement of the form's zero set with the rank oracle."""
    if form.is_zero():
        return False
    f = lag.field
    btabs = [lag.a @ _combined_table(f, [f.from_int(1 if i == k else 0) for i in range(6)],
                                     EPW_TABLES) for k in range(6)]
    done = 0
    while done < samples:
        v = [rng.randint(-9, 9) for _ in range(6)]
        if not any(v):
            continue
        mv = None
        for k in range(6):
            if v[k]:
                term = btabs[k].scale(f.from_int(v[k]))
                mv = term if mv is None else mv + term
        ell = 10 - field_rank(mv)
        val = form.eval([f.from_int(x) for x in v])
        if (not val) != (ell >= 1):
            return False
        done += 1
    return True


def sextic_extract(
    lag: LagrangianData, rng: random.Random | None = None, retries: int = 2
) -> "HomogeneousForm":
    """The degree-6 equation of the level->=1 locus of a rational A.

    Two seeded 15x10 compressions make det(pairing @ C) a degree-10 form;
    on random pencils the two determinants are interpolated from 11 nodes
    and their univariate gcd locates the base points, with the rank oracle
    keeping the genuine ones.  The unique sextic through those points is
    computed modulo several word-size primes and lifted by rational
    reconstruction.  Nothing is trusted: the result must be nonzero, agree
    with the rank oracle at 500 rational sample points in both directions,
    and come out identical (up to scale) from an independent pair of
    compressions.  Failures raise with the instance attached.
    """
    validate_lagrangian(lag)
    if isinstance(lag.field, PrimeField):
        raise ValidationError("the sextic is extracted over the rationals")
    if not decomposable_free_heuristic(lag):
        raise ValidationError(
            "decomposable-free heuristic failed (every tested reduction "
            "kept decomposable members)"
        )
    if rng is None:
        rng = random.Random(0x53E6)
    for attempt in range(retries + 1):
        nprimes = 5 + 2 * attempt
        c_mats = [_rand_compression(rng) for _ in range(4)]
        first = _extract_once(lag, c_mats[0], c_mats[1], rng, nprimes)
        if first is None:
            continue
        second = _extract_once(lag, c_mats[2], c_mats[3], rng, nprimes)
        if second != first:
            continue
        form = HomogeneousForm(lag.field, list(first))
        if _verify_sextic(lag, form, rng):
            return form
    err = ValidationError(f"sextic extraction failed after {retries + 1} attempts")
    err.instance = lag
    raise err


def line_degree_profile(source, v0: Sequence, v1: Sequence) -> list:
    """Root multiplicities of the sextic on the pencil v0 + s*v1.

    A squarefree factor of degree d contributes d roots of its exponent
    over a splitting field, so the multiset is read off the squarefree
    decomposition; the sum is at most 6 (the far point of the pencil is
    not charged).  Accepts a HomogeneousForm or extracts one from a
    Lagrangian.
    """
    form = source if isinstance(source, HomogeneousForm) else sextic_extract(source)
    f = form.field
    if isinstance(f, PrimeField) and f.p <= 6:
        raise ValidationError("root multiplicities need characteristic 0 or p > 6")
    a = _coerce_vec(f, v0, "v0")
    b = _coerce_vec(f, v1, "v1")
    if field_rank(Mat([a, b])) != 2:
        raise ValidationError("the base points do not span a line")
    g = form.restrict(a, b)
    if not g:
        raise ValidationError("line inside Y_A")
    out = []
    for fac, mult in squarefree_decomposition(g):
        out.extend([mult] * fac.degree())
    return sorted(out)
