"""Gushel-Mukai data sets and the Lagrangian correspondence.

A data set of dimension n (3 <= n <= 6) consists of a subspace W of
Lambda^2 V5 of dimension n+5, recorded by the 10 x (n+5) coordinate matrix
``mu`` of its inclusion, together with six symmetric (n+5) x (n+5) matrices
``q`` giving a quadratic form on W for every basis vector of V6.  The first
five forms are constrained: q(e_i)(w, w') must equal the coefficient of
e12345 in e_i ^ mu(w) ^ mu(w').  The sixth is a free symmetric form.

The correspondence sends such a data set to a Lagrangian subspace A of
Lambda^3 V6 (rows of a 10 x 20 matrix) and back.  Both directions are exact
and are implemented for any field of characteristic other than 2; the
forward direction also runs unchanged over polynomial rings (see famkit).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .errors import ObstructionError, ResourceBoundError, ValidationError
from .exactnum import Field, PrimeField, Scalar
from .exterior import (
    INCL3_TABLE,
    LAMBDA3_ROWS,
    V5_3_IN_6,
    MU_WEDGE_TABLES,
    QA_TABLES,
    VWEDGE2_TABLES,
    W32_TABLE,
    field_table_mat,
    graph_lagrangian_matrix,
    int_table_to_mat,
    symplectic_gram,
)
from .linalg import Mat, field_inverse, field_rank, field_solve, rank_kernel_image


@dataclass
class GMData:
    """One Gushel-Mukai data set over a field."""

    n: int
    field: Field
    mu: Mat
    q: list[Mat]

    @property
    def w_dim(self) -> int:
        return self.n + 5


@dataclass
class LagrangianData:
    """A Lagrangian subspace of Lambda^3 V6, rows of a 10 x 20 matrix."""

    field: Field
    a: Mat


@dataclass
class Bridge:
    """Output of the forward correspondence: the Lagrangian together with
    the surjection nu from it onto W (columns follow the rows of ``lag.a``)."""

    lag: LagrangianData
    nu: Mat


@dataclass
class SpecialSplit:
    """Decomposition of a special data set: W = W0 + ker(mu)."""

    ordinary: GMData
    w0: Mat          # (n+5) x (n+4) basis of W0 inside W
    w1: list          # the kernel vector spanning ker(mu), first pivot = 1
    q1: Scalar        # q(e6)(w1, w1), nonzero

    @property
    def vertex_value(self) -> Scalar:
        return self.q1


@dataclass
class ScanReport:
    mode: str
    field_order: Optional[int]
    total: int
    hits: int
    witnesses: list
    certified: bool


@dataclass
class ProbeReport:
    field_order: int
    ambient_points: int
    points_on_x: int
    violations: list
    min_jacobian_rank: Optional[int]
    vacuous: bool


def _like(m: Mat):
    return m.entries[0][0]


def _ring_zero(like):
    return like - like


def _ring_one(like):
    from fractions import Fraction

    from .exactnum import Fp, UniPoly

    if isinstance(like, UniPoly):
        return UniPoly.const(like.field, like.field.one())
    if isinstance(like, Fp):
        return Fp(1, like.p)
    return Fraction(1)


def validate_gm(d: GMData) -> bool:
    """True iff the five wedge constraints hold; shape or symmetry defects raise.

    Works for entries in a field or in a polynomial ring.
    """
    if d.n not in (3, 4, 5, 6):
        raise ValidationError(f"dimension must be 3..6, got {d.n}")
    r = d.n + 5
    if d.mu.shape != (10, r):
        raise ValidationError(f"mu must be 10 x {r}, got {d.mu.shape}")
    if len(d.q) != 6:
        raise ValidationError("expected six quadratic forms")
    for k, qm in enumerate(d.q):
        if qm.shape != (r, r):
            raise ValidationError(f"q[{k}] must be {r} x {r}")
        if qm != qm.T:
            raise ValidationError(f"q[{k}] is not symmetric")
    like = _like(d.mu)
    mt = d.mu.T
    for i in range(5):
        t = int_table_to_mat(MU_WEDGE_TABLES[i], like)
        if mt @ t @ d.mu != d.q[i]:
            return False
    return True


def ensure_valid(d: GMData) -> None:
    if not validate_gm(d):
        raise ValidationError("wedge identity fails: q(e_i) is not the form induced by mu")


def classify(d: GMData) -> str:
    """"ordinary" when mu is injective, "special" when its kernel is a line."""
    r = field_rank(d.mu)
    if r == d.n + 5:
        kind = "ordinary"
    elif r == d.n + 4:
        kind = "special"
    else:
        raise ValidationError(
            f"not a GM data set at this point: rank of mu is {r}, need {d.n + 4} or {d.n + 5}"
        )
    stacked = d.q[0]
    for i in range(1, 5):
        stacked = stacked.hjoin(d.q[i])
    if field_rank(stacked) != r:
        raise ValidationError("rank of the induced quadric system disagrees with mu")
    return kind


def split_special(d: GMData) -> SpecialSplit:
    """Split a special data set along the kernel line of mu.

    Returns the induced ordinary data set of dimension n-1 on the
    q(e6)-orthogonal complement of the kernel, and the value q1 of q(e6)
    on the kernel vector.  q1 = 0 means the quadric is a cone with vertex
    on the Grassmannian cone, which is excluded.
    """
    ensure_valid(d)
    if classify(d) != "special":
        raise ValidationError("split_special expects special data")
    _, ker, _ = rank_kernel_image(d.mu)
    if len(ker) != 1:
        raise ValidationError("kernel of mu is not a line")
    w1 = list(ker[0])
    r = d.w_dim
    q6 = d.q[5]
    q6w1 = [sum((q6.entries[i][j] * w1[j] for j in range(r)), d.field.zero()) for i in range(r)]
    q1 = sum((w1[i] * q6w1[i] for i in range(r)), d.field.zero())
    if not q1:
        raise ValidationError("degenerate: cone, not a GM variety (q(e6) vanishes on ker mu)")
    _, comp, _ = rank_kernel_image(Mat([q6w1]))
    if len(comp) != r - 1:
        raise ValidationError("orthogonal complement has wrong dimension")
    w0 = Mat([[comp[j][i] for j in range(r - 1)] for i in range(r)])
    mu0 = d.mu @ w0
    q0 = [w0.T @ qm @ w0 for qm in d.q]
    d0 = GMData(d.n - 1, d.field, mu0, q0)
    ensure_valid(d0)
    if classify(d0) != "ordinary":
        raise ValidationError("restriction to the complement is not ordinary")
    return SpecialSplit(ordinary=d0, w0=w0, w1=w1, q1=q1)


def assemble_special(d0: GMData, c: Scalar) -> GMData:
    """Inverse of split_special: enlarge W by a kernel line with q(e6) value c."""
    ensure_valid(d0)
    if classify(d0) != "ordinary":
        raise ValidationError("assemble_special expects ordinary data")
    if not c:
        raise ValidationError("the vertex value must be nonzero (cones are excluded)")
    if d0.n + 1 > 6:
        raise ValidationError("cannot assemble beyond dimension 6")
    f = d0.field
    r0 = d0.w_dim
    zero = f.zero()
    mu = Mat([row + [zero] for row in d0.mu.entries])
    q = []
    for k, qm in enumerate(d0.q):
        rows = [row + [zero] for row in qm.entries]
        last = [zero] * (r0 + 1)
        if k == 5:
            last[r0] = c
        rows.append(last)
        q.append(Mat(rows))
    out = GMData(d0.n + 1, f, mu, q)
    ensure_valid(out)
    return out


def lambda3_matrix(a: Mat) -> Mat:
    """10 x 10 matrix whose column j is lambda_3 of row j of ``a``.

    Rows are coordinates on Lambda^2 V5.  Entries may be field scalars or
    polynomials.
    """
    l3 = int_table_to_mat(LAMBDA3_ROWS, _like(a))
    return l3 @ a.T


def q_on_A(a, v) -> Mat:
    """Gram matrix of the induced form q_A(v) on the rows of ``a``.

    ``a`` is a LagrangianData or a 10 x 20 coordinate matrix; ``v`` is a
    1-based basis index in 1..6, or a sequence of six coordinates in the
    ring of the entries.  Raises when the result is not symmetric, which
    happens exactly when the rows fail to span a Lagrangian subspace in the
    direction of v.
    """
    if isinstance(a, LagrangianData):
        a = a.a
    if a.shape[1] != 20:
        raise ValidationError("expected 20 columns")
    like = _like(a)
    if isinstance(v, int):
        if not 1 <= v <= 6:
            raise ValidationError("basis index must lie in 1..6")
        acc = a @ int_table_to_mat(QA_TABLES[v - 1], like) @ a.T
    else:
        if len(v) != 6:
            raise ValidationError("v needs six coordinates")
        acc = None
        for k in range(6):
            if not v[k]:
                continue
            qk = int_table_to_mat(QA_TABLES[k], like)
            term = (a @ qk @ a.T).scale(v[k])
            acc = term if acc is None else acc + term
        if acc is None:
            qk = int_table_to_mat(QA_TABLES[0], like)
            acc = (a @ qk @ a.T).scale(v[0])
    if acc != acc.T:
        raise ValidationError("Lagrangian property violated: induced form is not symmetric")
    return acc


def q_gram_basis(a: Mat) -> list[Mat]:
    """The six Gram matrices q_A(e_k) on the rows of ``a``, unchecked."""
    like = _like(a)
    return [a @ int_table_to_mat(QA_TABLES[k], like) @ a.T for k in range(6)]


def monad_maps(mu: Mat, q: list[Mat]) -> tuple[Mat, Mat, Mat]:
    """The three maps of the presentation used by the forward correspondence,
    over the ring of the entries.

    Middle coordinates: 10 for Lambda^3 V5 followed by six blocks of size
    r = mu.cols for V6 tensor W.  f1 comes in from V5 tensor W (5r columns),
    f2 maps out to W*, f3 to Lambda^3 V6.  f2 @ f1 and f3 @ f1 vanish.
    """
    like = _like(mu)
    r = mu.cols
    w32 = int_table_to_mat(W32_TABLE, like)
    f2 = mu.T @ w32.T
    for k in range(6):
        f2 = f2.hjoin(q[k])
    f3 = int_table_to_mat(INCL3_TABLE, like)
    for k in range(6):
        f3 = f3.hjoin(int_table_to_mat(VWEDGE2_TABLES[k], like) @ mu)
    # f1(v tensor w) = (-v ^ mu(w), v tensor w) for v in V5
    f1_top = None
    for k in range(5):
        # e_k ^ Lambda^2 V5 lands in Lambda^3 V5; reindex the 20-row table
        rows = [VWEDGE2_TABLES[k][i6] for i6 in V5_3_IN_6]
        blk = -(int_table_to_mat(rows, like) @ mu)
        f1_top = blk if f1_top is None else f1_top.hjoin(blk)
    zero = _ring_zero(like)
    one = _ring_one(like)
    lower = Mat.zero(6 * r, 5 * r, zero)
    for i in range(5 * r):
        lower.entries[i][i] = one
    f1 = f1_top.stack(lower)
    return f1, f2, f3


def gm_to_lagrangian(d: GMData) -> Bridge:
    """Forward correspondence over a field.

    Returns the Lagrangian data together with nu: column j of ``nu`` is the
    W-component of a monad kernel vector mapping to row j of the Lagrangian
    matrix, so that mu @ nu equals lambda_3 on the rows and nu intertwines
    the quadratic forms exactly.
    """
    ensure_valid(d)
    kind = classify(d)
    f = d.field
    r = d.w_dim
    f1, f2, f3 = monad_maps(d.mu, d.q)
    if not (f2 @ f1).is_zero():
        raise ValidationError("presentation identity f2 @ f1 = 0 fails")
    if not (f3 @ f1).is_zero():
        raise ValidationError("presentation identity f3 @ f1 = 0 fails")
    rank2, ker2, _ = rank_kernel_image(f2)
    if rank2 != r:
        raise ValidationError(
            "presentation is not exact over W* (degenerate special data: a cone)"
        )
    if len(ker2) - 5 * r != 10:
        raise ValidationError("kernel of f2 does not have the expected dimension")
    k_mat = Mat([[ker2[j][i] for j in range(len(ker2))] for i in range(10 + 6 * r)])
    g = f3 @ k_mat
    rank_a, _, img_cols = rank_kernel_image(g)
    if rank_a != 10:
        raise ValidationError("image of the kernel is not 10-dimensional")
    a_rows = [[g.entries[i][c] for i in range(20)] for c in img_cols]
    a = Mat(a_rows)
    nu = Mat([[k_mat.entries[10 + 5 * r + i][c] for c in img_cols] for i in range(r)])
    if not symplectic_gram(a).is_zero():
        raise ValidationError("constructed span is not isotropic")
    phi = lambda3_matrix(a)
    if d.mu @ nu != phi:
        raise ValidationError("nu does not intertwine mu with lambda_3")
    for k in range(6):
        qk = int_table_to_mat(QA_TABLES[k], _like(a))
        if nu.T @ d.q[k] @ nu != a @ qk @ a.T:
            raise ValidationError("nu does not intertwine the quadratic forms")
    expected = 5 - d.n if kind == "ordinary" else 6 - d.n
    if 10 - field_rank(phi) != expected:
        raise ValidationError("intersection with Lambda^3 V5 has unexpected dimension")
    return Bridge(lag=LagrangianData(field=f, a=a), nu=nu)


def dual_stratum_dim(lag: LagrangianData) -> int:
    """Dimension of the intersection with Lambda^3 V5 (the stratum of the
    distinguished point of the dual space)."""
    return 10 - field_rank(lambda3_matrix(lag.a))


def validate_lagrangian(lag: LagrangianData) -> None:
    if lag.a.shape != (10, 20):
        raise ValidationError("expected a 10 x 20 matrix")
    if field_rank(lag.a) != 10:
        raise ValidationError("rows are not independent")
    if not symplectic_gram(lag.a).is_zero():
        raise ValidationError("rows do not span a Lagrangian subspace")


def lagrangian_to_gm_point(lag: LagrangianData, n: int) -> GMData:
    """Backward correspondence: the ordinary data set of dimension n.

    Requires the intersection with Lambda^3 V5 to have dimension exactly
    5 - n.  W is realized as the image of lambda_3 restricted to the
    Lagrangian; the forms descend along lambda_3 because its kernel on the
    Lagrangian is contained in the kernel of every Gram matrix.
    """
    if n not in (3, 4, 5):
        raise ValidationError("point reconstruction needs 3 <= n <= 5")
    validate_lagrangian(lag)
    f = lag.field
    a = lag.a
    phi = lambda3_matrix(a)
    rank_phi, ker_phi, img_cols = rank_kernel_image(phi)
    ell = 10 - rank_phi
    if ell != 5 - n:
        raise ValidationError(
            f"point is special or deeper (intersection with Lambda^3 V5 is "
            f"{ell}-dimensional, need {5 - n} for n = {n}); use the family pipeline"
        )
    r = n + 5
    mu = Mat([[phi.entries[i][c] for c in img_cols] for i in range(10)])
    grams = q_gram_basis(a)
    for gm in grams:
        for kv in ker_phi:
            for i in range(10):
                s = sum((gm.entries[i][j] * kv[j] for j in range(10)), f.zero())
                if s:
                    raise ValidationError("forms do not descend along lambda_3")
    q = [Mat([[gm.entries[ci][cj] for cj in img_cols] for ci in img_cols]) for gm in grams]
    out = GMData(n, f, mu, q)
    ensure_valid(out)
    if classify(out) != "ordinary":
        raise ValidationError("reconstructed data is not ordinary")
    return out


def point_roundtrip(d: GMData) -> GMData:
    """Forward then backward, comparing through the explicit transport.

    The kernel construction hands back nu with mu @ nu = lambda_3 on the
    span; restricting nu to the pivot set used by the reconstruction gives
    the change of basis sigma carrying d onto the reconstructed data.  All
    comparisons are exact equalities, not equivalence up to choices.
    """
    bridge = gm_to_lagrangian(d)
    d2 = lagrangian_to_gm_point(bridge.lag, d.n)
    phi = lambda3_matrix(bridge.lag.a)
    _, _, piv = rank_kernel_image(phi)
    r = d.w_dim
    sigma = Mat([[bridge.nu.entries[i][c] for c in piv] for i in range(r)])
    if field_rank(sigma) != r:
        raise ValidationError("transport between the two W bases is singular")
    if d.mu @ sigma != d2.mu:
        raise ValidationError("round trip does not restore mu through the transport")
    for k in range(6):
        if sigma.T @ d.q[k] @ sigma != d2.q[k]:
            raise ValidationError("round trip does not restore the forms")
    return d2


def gm_equiv(d1: GMData, d2: GMData) -> bool:
    """Equality of ordinary data sets up to a change of basis of W.

    Solves mu2 @ s = mu1 column by column; when both inclusions have the
    same image there is a unique such s and the forms must match through it.
    """
    if d1.n != d2.n or d1.field != d2.field:
        return False
    r = d1.w_dim
    cols = []
    for j in range(r):
        b = [d1.mu.entries[i][j] for i in range(10)]
        x = field_solve(d2.mu, b)
        if x is None:
            return False
        cols.append(x)
    s = Mat([[cols[j][i] for j in range(r)] for i in range(r)])
    if d2.mu @ s != d1.mu:
        return False
    if field_rank(s) != r:
        return False
    return all(s.T @ d2.q[k] @ s == d1.q[k] for k in range(6))


def gm_equations(d: GMData) -> list[Mat]:
    """The six symmetric matrices cutting out the variety in P(W)."""
    ensure_valid(d)
    return [qm.copy() for qm in d.q]


# ---------------------------------------------------------------------------
# randomized constructions


def random_ordinary_gm(rng: random.Random, n: int, fld: Field) -> GMData:
    """Seeded ordinary data set: random injective mu, induced q(e1..e5),
    random symmetric q(e6)."""
    if n not in (3, 4, 5):
        raise ValidationError("ordinary data sets exist for 3 <= n <= 5")
    r = n + 5
    while True:
        mu = Mat([[fld.rand(rng) for _ in range(r)] for _ in range(10)])
        if field_rank(mu) == r:
            break
    tmats = [field_table_mat(fld, MU_WEDGE_TABLES[i]) for i in range(5)]
    q = [mu.T @ t @ mu for t in tmats]
    q6 = [[fld.zero()] * r for _ in range(r)]
    for i in range(r):
        q6[i][i] = fld.rand(rng)
        for j in range(i + 1, r):
            q6[i][j] = q6[j][i] = fld.rand(rng)
    q.append(Mat(q6))
    d = GMData(n, fld, mu, q)
    ensure_valid(d)
    return d


def random_special_gm(rng: random.Random, n: int, fld: Field) -> GMData:
    """Seeded special data set of dimension n (4 <= n <= 6)."""
    if n not in (4, 5, 6):
        raise ValidationError("special data sets of dimension n need 4 <= n <= 6")
    base = random_ordinary_gm(rng, n - 1, fld)
    while True:
        c = fld.rand(rng)
        if c:
            return assemble_special(base, c)


def random_symmetric(rng: random.Random, fld: Field, size: int) -> Mat:
    m = [[fld.zero()] * size for _ in range(size)]
    for i in range(size):
        m[i][i] = fld.rand(rng)
        for j in range(i + 1, size):
            m[i][j] = m[j][i] = fld.rand(rng)
    return Mat(m)


def random_lagrangian(rng: random.Random, fld: Field) -> LagrangianData:
    """Seeded Lagrangian as the graph of a random symmetric form between the
    two complementary coordinate Lagrangians."""
    a = graph_lagrangian_matrix(random_symmetric(rng, fld, 10))
    return LagrangianData(field=fld, a=a)


# indices of e123, e145, e124, e125, e134 among the ten monomials containing e1
_E123_L1 = 0
_E145_L1 = 7
_E124_L1 = 1
_E125_L1 = 2
_E134_L1 = 4


def _plane_vector(fld: Field) -> list:
    c = [fld.zero()] * 10
    c[_E123_L1] = fld.one()
    c[_E145_L1] = fld.one()
    return c


def _plane_vector2(fld: Field) -> list:
    c = [fld.zero()] * 10
    for pos in (_E123_L1, _E124_L1, _E125_L1, _E134_L1):
        c[pos] = fld.one()
    return c


def random_lagrangian_with_plane(rng: random.Random, fld: Field) -> LagrangianData:
    """Seeded Lagrangian containing e1 ^ (e23 + e45).

    The member is divisible by e1 but not decomposable, so the point e1 of
    P(V6) lies on the degeneracy divisor while the scan for decomposable
    members can still come up empty.
    """
    b0 = random_symmetric(rng, fld, 10)
    forced = _force_kernel(b0, [_plane_vector(fld)], fld)
    return LagrangianData(field=fld, a=graph_lagrangian_matrix(forced))


def random_lagrangian_with_plane2(rng: random.Random, fld: Field) -> LagrangianData:
    """Seeded Lagrangian containing the pencil spanned by e1 ^ (e23 + e45)
    and e1 ^ (e23 + e24 + e25 + e34).

    The 2-form part of the member at (lam : mu) squares to
    2 (lam^2 + lam mu + mu^2) e2345.  The discriminant -3 is a non-square
    both over Q and mod 5, so the pencil carries no decomposable member over
    either field and scans of such a Lagrangian can come up clean.
    """
    b0 = random_symmetric(rng, fld, 10)
    forced = _force_kernel(b0, [_plane_vector(fld), _plane_vector2(fld)], fld)
    return LagrangianData(field=fld, a=graph_lagrangian_matrix(forced))


def _force_kernel(b0: Mat, cs: list, fld: Field) -> Mat:
    """Symmetric correction of b0 killing every vector in cs.

    Conjugates by the orthogonal projection off the span, so the Gram matrix
    of cs must be invertible; isotropic spans are rejected.
    """
    size = b0.shape[0]
    c = Mat([[cs[j][i] for j in range(len(cs))] for i in range(size)])
    try:
        ginv = field_inverse(c.T @ c)
    except ValueError:
        raise ValidationError("cannot project off the span: its Gram matrix is singular")
    pi = Mat.identity(size, fld.zero(), fld.one()) - c @ ginv @ c.T
    b = pi @ b0 @ pi
    for v in cs:
        bv = [sum((b.entries[i][j] * v[j] for j in range(size)), fld.zero()) for i in range(size)]
        if any(bv):
            raise ValidationError("kernel correction failed")
    return b


def random_lagrangian_with_member(rng: random.Random, fld: Field, l1_coeffs: list) -> LagrangianData:
    """Seeded Lagrangian containing the given combination of the ten
    monomials that contain e1."""
    b0 = random_symmetric(rng, fld, 10)
    forced = _force_kernel(b0, [list(l1_coeffs)], fld)
    return LagrangianData(field=fld, a=graph_lagrangian_matrix(forced))


# ---------------------------------------------------------------------------
# searches over finite fields

# cascade of 4 x 4 minors (row set, column set) of the wedge matrix used to
# prescreen exhaustive scans.  Rank 3 forces every 4 x 4 minor to vanish, so
# the cascade never discards a decomposable member; it only skips exact rank
# work on members it proves have rank >= 4.
_SCAN_MINORS = (
    ((6, 8, 10, 12), (0, 1, 2, 4)),
    ((3, 11, 12, 13), (1, 3, 4, 5)),
    ((0, 5, 7, 11), (1, 2, 3, 5)),
    ((1, 4, 7, 8), (0, 2, 3, 5)),
    ((1, 3, 6, 7), (0, 1, 2, 4)),
    ((4, 9, 10, 11), (0, 1, 2, 3)),
)


def decomposable_scan(
    lag: LagrangianData,
    mode: str = "exhaustive",
    bound: int = 2_441_406,
    samples: int = 2000,
    seed: int = 0,
    witness_cap: int = 10,
) -> ScanReport:
    """Search the Lagrangian for decomposable members (rank-3 elements).

    Exhaustive mode enumerates all of P(A)(F_p) and certifies emptiness;
    sampled mode draws seeded random members over any field and certifies
    nothing.
    """
    validate_lagrangian(lag)
    if mode == "exhaustive":
        if not isinstance(lag.field, PrimeField):
            raise ValidationError("exhaustive scans need a finite prime field")
        import numpy as np

        from . import fastenum
        from .exterior import EK_WEDGE3_TABLES

        p = lag.field.p
        total = fastenum.count_projective(10, p)
        if total > bound:
            raise ResourceBoundError(
                f"scan of {total} members exceeds the bound {bound}"
            )
        a_res = fastenum.mat_residues(lag.a)
        wtab = np.stack([fastenum.int_array(t) % p for t in EK_WEDGE3_TABLES])
        minor_tabs = [
            np.stack([wtab[c, rr, :] for rr in rows for c in cols], axis=1)
            for rows, cols in _SCAN_MINORS
        ]
        hits = 0
        witnesses = []
        for block in fastenum.projective_chunks(10, p):
            omega = block @ a_res % p
            keep = np.arange(omega.shape[0])
            for t16 in minor_tabs:
                vals = omega[keep] @ t16 % p
                keep = keep[fastenum.det4_batch(vals.reshape(-1, 4, 4), p) == 0]
                if keep.size == 0:
                    break
            if keep.size == 0:
                continue
            mats = np.einsum("ns,kbs->nbk", omega[keep], wtab) % p
            ranks = fastenum.batch_rank(mats, p)
            sel = keep[ranks == 3]
            hits += int(sel.size)
            for i in sel[: max(0, witness_cap - len(witnesses))]:
                witnesses.append(tuple(int(x) for x in block[i]))
        return ScanReport(
            mode="exhaustive",
            field_order=p,
            total=total,
            hits=hits,
            witnesses=witnesses,
            certified=hits == 0,
        )
    if mode == "sampled":
        rng = random.Random(seed)
        fld = lag.field
        from .exterior import MultiVector, decomposable_rank_test

        hits = 0
        witnesses = []
        for _ in range(samples):
            coeffs = [fld.rand(rng) for _ in range(10)]
            if not any(coeffs):
                continue
            omega_coords = [
                sum((coeffs[i] * lag.a.entries[i][s] for i in range(10)), fld.zero())
                for s in range(20)
            ]
            _, dec = decomposable_rank_test(MultiVector(fld, 3, omega_coords))
            if dec:
                hits += 1
                if len(witnesses) < witness_cap:
                    witnesses.append(tuple(coeffs))
        return ScanReport(
            mode="sampled",
            field_order=lag.field.p if isinstance(lag.field, PrimeField) else None,
            total=samples,
            hits=hits,
            witnesses=witnesses,
            certified=False,
        )
    raise ValidationError(f"unknown scan mode {mode!r}")


def smoothness_probe(d: GMData, bound: int = 3_000_000) -> ProbeReport:
    """Point-by-point Jacobian check of the six quadrics over a prime field.

    A violation is a rational point of the common zero locus where the
    Jacobian has rank below 4, the rank of a smooth intersection point (the
    affine cone over the variety has dimension n+1 inside W, so the rank can
    never exceed 4 on the locus).  An empty locus is reported as vacuous.
    """
    ensure_valid(d)
    if not isinstance(d.field, PrimeField):
        raise ValidationError("the probe enumerates points of a finite prime field")
    import numpy as np

    from . import fastenum

    p = d.field.p
    r = d.w_dim
    total = fastenum.count_projective(r, p)
    if total > bound:
        raise ResourceBoundError(f"{total} ambient points exceed the bound {bound}")
    qs = np.stack([fastenum.mat_residues(qm) for qm in d.q])
    on_x = 0
    violations = []
    min_rank = None
    fld = d.field
    for block in fastenum.projective_chunks(r, p):
        wq = np.einsum("ni,kij->nkj", block, qs) % p
        vals = (wq * block[:, None, :]).sum(axis=2) % p
        sel = np.nonzero((vals == 0).all(axis=1))[0]
        on_x += int(sel.size)
        for i in sel:
            point = block[i]
            jac = Mat(
                [
                    [fld.from_int(int(wq[i, k, j])) for j in range(r)]
                    for k in range(6)
                ]
            )
            rk = field_rank(jac)
            if min_rank is None or rk < min_rank:
                min_rank = rk
            if rk < 4:
                violations.append((tuple(int(x) for x in point), rk))
    return ProbeReport(
        field_order=p,
        ambient_points=total,
        points_on_x=on_x,
        violations=violations,
        min_jacobian_rank=min_rank,
        vacuous=on_x == 0,
    )
