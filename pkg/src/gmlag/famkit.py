"""One-parameter families of GM and Lagrangian data over k[t].

A FamilyGM is a GM data set whose matrices have entries in k[t]; a
FamilyLag is a family of Lagrangian subspaces, rows of a 10 x 20 matrix
over k[t] whose symplectic Gram matrix vanishes identically.  Both point
conversions extend to families, but not symmetrically: the Lagrangian side
sees the square of the GM degeneration divisor, so going back from a
FamilyLag requires that divisor to be a perfect square.  When it is, the
pipeline below factors the wedge composition, descends the six quadrics
along the factorization, performs a Hecke modification at the half divisor
and reassembles a valid FamilyGM whose degeneration divisor is exactly the
square root.  When it is not, no GM family exists over the base and the
conversion reports the obstruction.

The base ring is k[t] for an exact coefficient field k.  Being a PID, it
turns the uniqueness statements behind the factorization and the Hecke
step into global matrix identities, all of which are checked, not assumed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .errors import ObstructionError, ValidationError
from .exactnum import (
    DivisorIdeal,
    Field,
    PrimeField,
    UniPoly,
    monic_square_root,
    poly_divexact,
    residue_reduce,
    squarefree_decomposition,
)
from .exterior import J_TABLE, MU_WEDGE_TABLES, QA_TABLES, int_table_to_mat, symplectic_gram
from .gmdata import (
    GMData,
    LagrangianData,
    classify,
    ensure_valid,
    gm_to_lagrangian,
    lambda3_matrix,
    monad_maps,
    random_special_gm,
    random_symmetric,
    split_special,
)
from .linalg import (
    Mat,
    canonical_factorization,
    column_reduced,
    field_rank,
    fitting_divisor,
    fitting_is_unit,
    kernel_vector_mod,
    linear_solve_mod,
    mat_eval,
    morphism_rank,
    poly_mat_from_const,
    poly_solve_mat,
    saturate_kernel_small,
    smith_normal_form,
    unimodular_completion_last,
)


@dataclass
class FamilyGM:
    """GM data over k[t]: mu is 10 x (n+5), q holds six symmetric blocks.

    The first five forms are determined by mu through the wedge identity;
    the sixth is free.  Validity means the identity holds in k[t], every
    form is symmetric and mu has rank n+5 over k(t).
    """

    n: int
    field: Field
    mu: Mat
    q: list[Mat]


@dataclass
class FamilyLag:
    """Family of Lagrangian subspaces: a 10 x 20 matrix over k[t]."""

    field: Field
    a: Mat


@dataclass
class HeckeResult:
    """Hecke modification of a family of quadratic forms at one divisor.

    ``eps`` is the diagonal basis change (the modulus at the distinguished
    index, 1 elsewhere); transporting ``forms`` back through it recovers
    the input exactly.  ``residual`` holds, per form, the distinguished
    corner reduced mod the modulus: the residual scalar family on the
    divisor.  ``complement`` lists the coordinates of the summand
    orthogonal to the distinguished line along the divisor.
    """

    eps: Mat
    forms: list[Mat]
    index: int
    complement: list[int]
    modulus: UniPoly
    residual: list[UniPoly]


@dataclass
class PipelineResult:
    """Everything produced while converting a FamilyLag into a FamilyGM.

    The chain include @ step2 @ step1 @ project equals the wedge
    composition of the input; both steps have Smith form diag(1, ..., 1, h)
    where (h) is ``divisor``, the square root of ``lag_divisor``.  q_desc
    are the six quadrics descended along project; hecke is their
    modification at (h), or None when the divisor is trivial; family is the
    final, validated output.
    """

    project: Mat
    step1: Mat
    step2: Mat
    include: Mat
    divisor: DivisorIdeal
    lag_divisor: DivisorIdeal
    q_desc: list[Mat]
    hecke: "HeckeResult | None"
    family: FamilyGM


def _lift(m: Mat, field: Field) -> Mat:
    return poly_mat_from_const(m, field)


def gm_fiber(fam: FamilyGM, c) -> GMData:
    """Evaluate the family at a base point."""
    return GMData(fam.n, fam.field, mat_eval(fam.mu, c), [mat_eval(q, c) for q in fam.q])


def lag_fiber(fam: FamilyLag, c) -> LagrangianData:
    return LagrangianData(fam.field, mat_eval(fam.a, c))


def validate_family_gm(fam: FamilyGM) -> None:
    """Check the defining identities of a GM family, identically in t."""
    if fam.n not in (3, 4, 5, 6):
        raise ValidationError("dimension must be between 3 and 6")
    r = fam.n + 5
    if fam.mu.shape != (10, r):
        raise ValidationError(f"mu must be 10 x {r}")
    if len(fam.q) != 6:
        raise ValidationError("exactly six forms are required")
    sample = fam.mu.entries[0][0]
    for k, qk in enumerate(fam.q):
        if qk.shape != (r, r):
            raise ValidationError(f"q[{k}] must be {r} x {r}")
        if qk != qk.T:
            raise ValidationError(f"q[{k}] is not symmetric")
    for k in range(5):
        tk = int_table_to_mat(MU_WEDGE_TABLES[k], sample)
        if fam.q[k] != fam.mu.T @ tk @ fam.mu:
            raise ValidationError(f"q[{k}] does not match the wedge pairing")
    if morphism_rank(fam.mu) != r:
        raise ValidationError("mu drops rank over k(t)")


def validate_family_lag(fam: FamilyLag) -> None:
    """Check that the rows stay Lagrangian at every parameter value."""
    if fam.a.shape != (10, 20):
        raise ValidationError("a must be 10 x 20")
    if not symplectic_gram(fam.a).is_zero():
        raise ValidationError("rows are not isotropic for the symplectic form")
    if morphism_rank(fam.a) != 10:
        raise ValidationError("rows drop rank over k(t)")
    # full rank at every point, not just generically: the fibers must all
    # be honest 10-dimensional subspaces
    if not fitting_is_unit(fam.a, 9):
        raise ValidationError("rows drop rank at some parameter value")


def family_phi(fam: FamilyLag) -> Mat:
    """Coordinates of the wedge composition of the family in Lambda^2 V5.

    Row i is the image of row i of ``a`` under wedging into the quotient
    by the hyperplane part, a 10 x 10 matrix over k[t].
    """
    return lambda3_matrix(fam.a)


def special_divisor_lag(fam: FamilyLag, n: int) -> DivisorIdeal:
    """Degeneration divisor of the wedge composition, as a divisor ideal.

    Requires generic rank n+5 and corank at most one everywhere; the
    divisor is then the gcd of the (n+5) x (n+5) minors.
    """
    phi = family_phi(fam)
    rank = morphism_rank(phi)
    if rank != n + 5:
        raise ValidationError(f"wedge composition has rank {rank} over k(t), expected {n + 5}")
    if not fitting_is_unit(phi, n + 3):
        raise ValidationError("corank exceeds one along a divisor")
    return fitting_divisor(phi, n + 4)


def special_divisor_gm(fam: FamilyGM) -> DivisorIdeal:
    """Degeneration divisor of mu: gcd of its maximal minors."""
    r = fam.n + 5
    if morphism_rank(fam.mu) != r:
        raise ValidationError("mu drops rank over k(t)")
    return fitting_divisor(fam.mu, fam.n + 4)


def family_gm_to_lag(fam: FamilyGM) -> FamilyLag:
    """Forward conversion: the kernel bundle of the family's monad.

    Runs the point construction with k[t] entries.  The middle cohomology
    must be a free rank-10 subbundle; if saturation cannot exhibit it as
    one, the input does not define a flat family and the conversion fails.
    """
    validate_family_gm(fam)
    r = fam.n + 5
    f1, f2, f3 = monad_maps(fam.mu, fam.q)
    if not ((f2 @ f1).is_zero() and (f3 @ f1).is_zero()):
        raise ValidationError("monad does not compose to zero")
    if morphism_rank(f2) != r:
        raise ValidationError("saturation failure (non-free quotient)")
    # the 5r middle coordinates of ker(f2) are determined linearly by the
    # outer ones; dropping them shrinks the saturation problem
    cols = list(range(10)) + list(range(10 + 5 * r, 10 + 6 * r))
    kp = saturate_kernel_small(f2.submatrix(range(r), cols))
    if kp.cols != 10:
        raise ValidationError("saturation failure (non-free quotient)")
    g = f3.submatrix(range(20), cols) @ kp
    if not fitting_is_unit(g, 9):
        raise ValidationError("saturation failure (non-free quotient)")
    a = g.T
    if not symplectic_gram(a).is_zero():
        raise ValidationError("kernel bundle is not Lagrangian")
    return FamilyLag(fam.field, a)


def residual_family(
    qs: Sequence[Mat], f: UniPoly, s0: Sequence[UniPoly], rng: random.Random | None = None
) -> list[UniPoly]:
    """Residues q_v(s0, s0) / f mod f for a section s0 killed to order f.

    Every pairing q_v(s0, .) must be divisible by f.  The residue class of
    the quotient does not depend on how s0 is extended: replacing s0 by
    s0 + f * (anything) changes q_v(s0, s0) / f by a multiple of f.  That
    independence is rechecked on a random perturbation rather than trusted.
    """
    if not qs:
        return []
    if f.degree() < 1:
        raise ValidationError("residues live along a proper divisor")
    field = f.field
    r = qs[0].rows
    if len(s0) != r:
        raise ValidationError("section length does not match the forms")
    for q in qs:
        for j in range(r):
            acc = UniPoly(field, [])
            for i in range(r):
                acc = acc + s0[i] * q.entries[i][j]
            if acc % f:
                raise ValidationError("section does not pair to zero modulo the divisor")

    def residues(sec):
        out = []
        for q in qs:
            val = UniPoly(field, [])
            for i in range(r):
                row = q.entries[i]
                part = UniPoly(field, [])
                for j in range(r):
                    part = part + sec[j] * row[j]
                val = val + sec[i] * part
            out.append(residue_reduce(poly_divexact(val, f), f))
        return out

    base = residues(list(s0))
    if rng is None:
        rng = random.Random(0xFA31)
    bump = [UniPoly.const(field, field.rand(rng)) for _ in range(r)]
    moved = residues([si + f * bi for si, bi in zip(s0, bump)])
    if moved != base:
        raise ValidationError("residue depends on the choice of extension")
    return base


def hecke_transform(qs: Sequence[Mat], h: UniPoly, index: int) -> HeckeResult:
    """Divide out a square zero of a family of quadrics along one line.

    The coordinate line ``index`` must lie in the kernel of every form
    modulo h^2: its row and column are divisible by h^2.  The transform
    divides the corner entry by h^2 and the rest of that row and column by
    h, leaving everything else alone.  Conjugating back by
    eps = diag(1, ..., h, ..., 1) recovers the input exactly, and along
    (h) the line is orthogonal to the complementary summand.
    """
    if not qs:
        raise ValidationError("no forms to transform")
    if h.degree() < 1:
        raise ValidationError("modulus must define a proper divisor")
    field = h.field
    r = qs[0].rows
    if not 0 <= index < r:
        raise ValidationError("index out of range")
    h2 = h * h
    zero_p = UniPoly(field, [])
    one_p = UniPoly.const(field, field.one())
    forms = []
    for q in qs:
        if q.shape != (r, r) or q != q.T:
            raise ValidationError("forms must be symmetric and of equal size")
        for j in range(r):
            if q.entries[index][j] % h2:
                raise ValidationError("K not in kernel over D")
        ent = [list(row) for row in q.entries]
        for j in range(r):
            if j == index:
                continue
            ent[index][j] = poly_divexact(ent[index][j], h)
            ent[j][index] = poly_divexact(ent[j][index], h)
        ent[index][index] = poly_divexact(ent[index][index], h2)
        forms.append(Mat(ent))
    eps = Mat.identity(r, zero_p, one_p)
    eps.entries[index][index] = h
    for q, qt in zip(qs, forms):
        if eps.T @ qt @ eps != q:
            raise ValidationError("transport through eps does not recover the input")
        for j in range(r):
            if j != index and residue_reduce(qt.entries[index][j], h):
                raise ValidationError("summands fail to be orthogonal along the divisor")
    residual = [residue_reduce(qt.entries[index][index], h) for qt in forms]
    # the residual family computed directly from the input must agree
    s0 = [zero_p] * r
    s0[index] = one_p
    direct = residual_family(qs, h2, s0)
    if [residue_reduce(x, h) for x in direct] != residual:
        raise ValidationError("residual families disagree")
    complement = [i for i in range(r) if i != index]
    return HeckeResult(eps, forms, index, complement, h, residual)


def _base_roots(h: UniPoly, field: Field) -> list:
    """Roots of h in the coefficient field.

    Prime fields are scanned exhaustively (they are small in every use
    here).  Over the rationals only small integers are probed; the family
    generators in this module anchor their degenerations there, and a
    missed distant root only skips an optional fiber check.
    """
    if h.degree() < 1:
        return []
    if isinstance(field, PrimeField):
        cand = [field.from_int(i) for i in range(field.p)]
    else:
        cand = [field.from_int(i) for i in range(-16, 17)]
    return [c for c in cand if not h.eval(c)]


def _check_fibers(fam: FamilyGM, h: UniPoly) -> None:
    """Fiberwise sanity of a pipeline output.

    At every base-field root of h the fiber must be valid special data
    whose vertex quadric is nonzero; at sample points off the divisor the
    fiber must be ordinary.
    """
    field = fam.field
    roots = _base_roots(h, field)
    for c in roots:
        fiber = gm_fiber(fam, c)
        ensure_valid(fiber)
        if classify(fiber) != "special":
            raise ValidationError("fiber on the divisor is not special")
        sp = split_special(fiber)
        if not sp.vertex_value:
            raise ValidationError("residual quadric vanishes at a special fiber")
    if isinstance(field, PrimeField):
        pool = [field.from_int(i) for i in range(field.p)]
    else:
        pool = [field.from_int(i) for i in range(1, 13)]
    done = 0
    for c in pool:
        if h.eval(c) or done == 2:
            continue
        fiber = gm_fiber(fam, c)
        ensure_valid(fiber)
        if classify(fiber) != "ordinary":
            raise ValidationError("fiber off the divisor is not ordinary")
        done += 1


def family_lag_to_gm(fam: FamilyLag, n: int) -> PipelineResult:
    """Reconstruct a GM family from a Lagrangian family.

    The degeneration divisor of the wedge composition must be the square
    of a divisor (h); otherwise no GM family exists over the base and an
    ObstructionError reports it.  The construction factors the composition
    through its saturated image and coimage, descends the six ambient
    quadrics to the rank bundle, corrects the kernel direction over (h) to
    second order, performs the Hecke transform there and folds the basis
    changes back into a reduced, validated FamilyGM with divisor (h).
    """
    field = fam.field
    r = n + 5
    validate_family_lag(fam)
    zero_p = UniPoly(field, [])
    one_p = UniPoly.const(field, field.one())
    phi = family_phi(fam)
    rank = morphism_rank(phi)
    if rank != r:
        raise ValidationError(f"wedge composition has rank {rank} over k(t), expected {r}")
    # the factorization computes the divisor as det of the middle map; the
    # minor-gcd route stays available through special_divisor_lag and the
    # two are compared in the test suite
    fac = canonical_factorization(phi, r)
    jlag = fac.divisor
    if any(e % 2 for _, e in squarefree_decomposition(jlag.generator)):
        raise ObstructionError("no GM family exists over this base")
    h = monic_square_root(jlag.generator)
    assert h is not None

    sample = phi.entries[0][0]
    qa = [fam.a @ int_table_to_mat(QA_TABLES[k], sample) @ fam.a.T for k in range(6)]
    kern = fac.project_kernel
    if kern is not None and kern.cols:
        # the forms must kill ker(project): this makes the descent through
        # any right inverse well defined and independent of the choice,
        # since two right inverses differ by a map into the kernel
        for q in qa:
            if not (q @ kern).is_zero():
                raise ValidationError("quadrics do not vanish on the projection kernel")
    rinv = fac.project_rinv
    qprime = [rinv.T @ q @ rinv for q in qa]

    if h.degree() == 0:
        # no degeneration: the Hecke step is the identity in the last slot
        v = [zero_p] * r
        v[r - 1] = one_p
    else:
        v = kernel_vector_mod(fac.middle, h)
        h2 = h * h
        # v is pinned only mod h; push it to a direction on which every
        # descended form vanishes mod h^2 (it exists and the correction is
        # solvable because q'(v, v) = 0 mod h^2 already)
        stack_rows = []
        rhs = []
        for k in range(6):
            for j in range(r):
                rowj = qprime[k].entries[j]
                val = zero_p
                for i in range(r):
                    val = val + v[i] * rowj[i]
                tmp = val % h2
                if tmp % h:
                    raise ValidationError("kernel direction fails first-order vanishing")
                stack_rows.append(list(rowj))
                rhs.append(-poly_divexact(tmp, h))
        w = linear_solve_mod(Mat(stack_rows), rhs, h)
        if w is None:
            raise ValidationError("kernel direction admits no second-order correction")
        ju = next(i for i in range(r) if v[i] and v[i].degree() == 0)
        # shift w by a multiple of v so the unit coordinate stays put;
        # mod h^2 the corrected direction is unchanged by this
        lam = w[ju].scale(field.one() / v[ju].coeffs[0])
        w = [(wi - lam * vi) % h for wi, vi in zip(w, v)]
        v = [vi + h * wi for vi, wi in zip(v, w)]

    e_mat, e_inv = unimodular_completion_last(v)
    qhat = [e_mat.T @ q @ e_mat for q in qprime]
    if h.degree() == 0:
        # trivial divisor: nothing to divide out, no residual data
        hecke = None
        qt = qhat
    else:
        hecke = hecke_transform(qhat, h, r - 1)
        qt = hecke.forms

    dh = Mat.identity(r, zero_p, one_p)
    dh.entries[r - 1][r - 1] = h
    step1 = dh @ e_inv
    me = fac.middle @ e_mat
    ent = [list(row) for row in me.entries]
    for i in range(r):
        # middle @ v = 0 mod h, so the last column divides exactly
        ent[i][r - 1] = poly_divexact(ent[i][r - 1], h)
    step2 = Mat(ent)
    if fac.include @ step2 @ step1 @ fac.project != phi:
        raise ValidationError("factorization chain identity failed")
    for s in (step1, step2):
        d_s, _, _ = smith_normal_form(s)
        diag = [d_s.entries[i][i] for i in range(r)]
        if not (all(p == one_p for p in diag[:-1]) and diag[-1] == h):
            raise ValidationError("middle step is not a length-one modification")

    mu_fam = fac.include @ step2
    mu_red, _ = column_reduced(mu_fam)
    s2 = poly_solve_mat(mu_fam, mu_red)
    s2i = poly_solve_mat(mu_red, mu_fam)
    if s2 is None or s2i is None or s2 @ s2i != Mat.identity(r, zero_p, one_p):
        raise ValidationError("output basis reduction failed")
    q_out = [s2.T @ q @ s2 for q in qt]
    out = FamilyGM(n, field, mu_red, q_out)
    validate_family_gm(out)
    if fitting_divisor(mu_red, n + 4).generator != h:
        raise ValidationError("output family has the wrong degeneration divisor")
    _check_fibers(out, h)
    return PipelineResult(
        project=fac.project,
        step1=step1,
        step2=step2,
        include=fac.include,
        divisor=DivisorIdeal(h),
        lag_divisor=jlag,
        q_desc=qprime,
        hecke=hecke,
        family=out,
    )


def family_gm_equiv(f1: FamilyGM, f2: FamilyGM) -> bool:
    """Same GM family up to a k[t] change of basis of W.

    Looks for s invertible over k[t] with mu2 = mu1 @ s carrying every
    form of f1 onto the matching form of f2.
    """
    if f1.n != f2.n or f1.mu.shape != f2.mu.shape:
        return False
    field = f1.field
    r = f1.n + 5
    s = poly_solve_mat(f1.mu, f2.mu)
    si = poly_solve_mat(f2.mu, f1.mu)
    if s is None or si is None:
        return False
    zero_p = UniPoly(field, [])
    one_p = UniPoly.const(field, field.one())
    if s @ si != Mat.identity(r, zero_p, one_p):
        return False
    return all(s.T @ q1 @ s == q2 for q1, q2 in zip(f1.q, f2.q))


def roundtrip_check(fam: FamilyLag, n: int) -> bool:
    """Convert to a GM family and back; compare saturated row modules.

    Both matrices have full rank at every point (validated during the
    conversions), so their saturated row modules agree exactly when the
    stacked matrix still has rank 10 over k(t).
    """
    res = family_lag_to_gm(fam, n)
    back = family_gm_to_lag(res.family)
    if morphism_rank(fam.a) != 10 or morphism_rank(back.a) != 10:
        return False
    stacked = Mat(fam.a.entries + back.a.entries)
    return morphism_rank(stacked) == 10


def random_family_gm(rng: random.Random, n: int, fld: Field) -> FamilyGM:
    """Pencil of GM data through one special point at t = 0.

    The direction is resampled until the degeneration divisor is exactly
    (t); a generic direction through a generic special anchor achieves
    that with high probability.  The sixth form moves in its own pencil.
    """
    r = n + 5
    tpoly = UniPoly.var(fld)
    while True:
        if n >= 4:
            anchor = random_special_gm(rng, n, fld)
            mu0, q5_0 = anchor.mu, anchor.q[5]
        else:
            # there is no split special data below n = 4, but a corank-one
            # anchor still pins the degeneration divisor of the pencil
            left = Mat([[fld.rand(rng) for _ in range(r - 1)] for _ in range(10)])
            mix = Mat([[fld.rand(rng) for _ in range(r)] for _ in range(r - 1)])
            mu0 = left @ mix
            q5_0 = random_symmetric(rng, fld, r)
        if field_rank(mu0) != r - 1:
            continue
        if n == 5:
            # mu is square, so the divisor is its lone maximal minor; only
            # a rank-one motion keeps det affine in t, hence exactly (t)
            u = Mat([[fld.rand(rng)] for _ in range(10)])
            v = Mat([[fld.rand(rng) for _ in range(r)]])
            m1 = u @ v
        else:
            m1 = Mat([[fld.rand(rng) for _ in range(r)] for _ in range(10)])
        mu = _lift(mu0, fld) + _lift(m1, fld).scale(tpoly)
        if fitting_divisor(mu, n + 4).generator == tpoly:
            break
    qs = [mu.T @ int_table_to_mat(MU_WEDGE_TABLES[k], tpoly) @ mu for k in range(5)]
    qs.append(_lift(q5_0, fld) + _lift(random_symmetric(rng, fld, r), fld).scale(tpoly))
    return FamilyGM(n, fld, mu, qs)


def random_family_lag(rng: random.Random, n: int, fld: Field) -> FamilyLag:
    """Lagrangian family with degeneration divisor (t^2): the image of a
    random GM pencil under the forward conversion."""
    return family_gm_to_lag(random_family_gm(rng, n, fld))


def random_obstructed_lag(rng: random.Random, n: int, fld: Field) -> FamilyLag:
    """Lagrangian family whose degeneration divisor is (t), not a square.

    Starts from a constant special Lagrangian, whose wedge composition has
    corank one, and moves it by the symplectic transvection family
    I + t u u^T J.  The update has rank one, so every maximal minor of the
    composition is linear in t with zero constant term and the divisor is
    exactly (t): a wall-crossing at unit speed.  No GM family exists over
    such a base; the pipeline must reject it.
    """
    r = n + 5
    tpoly = UniPoly.var(fld)
    jmat = int_table_to_mat(J_TABLE, tpoly)
    while True:
        d0 = random_special_gm(rng, n, fld)
        a0 = _lift(gm_to_lagrangian(d0).lag.a, fld)
        u = Mat([[UniPoly.const(fld, fld.from_int(rng.randrange(-2, 3)))] for _ in range(20)])
        a = a0 + ((a0 @ jmat.T @ u) @ u.T).scale(tpoly)
        fam = FamilyLag(fld, a)
        phi = family_phi(fam)
        if morphism_rank(phi) != r:
            continue
        if fitting_divisor(phi, n + 4).generator != tpoly:
            continue
        if not fitting_is_unit(phi, n + 3):
            continue
        return fam


def random_hecke_instance(
    rng: random.Random, fld: Field, size: int, h: UniPoly
) -> tuple[list[Mat], int, list[Mat]]:
    """Six symmetric families with a planted square zero along (h).

    Builds a target family first (distinguished row divisible by h off the
    corner, corner coprime to h), then conjugates by eps.  Returns the
    conjugated input, the distinguished index and the planted target,
    which the transform must recover entry for entry.
    """
    index = rng.randrange(size)
    tpoly = UniPoly.var(fld)
    one_p = UniPoly.const(fld, fld.one())
    planted = []
    for _ in range(6):
        base = _lift(random_symmetric(rng, fld, size), fld) + _lift(
            random_symmetric(rng, fld, size), fld
        ).scale(tpoly)
        ent = [list(row) for row in base.entries]
        for j in range(size):
            if j != index:
                ent[index][j] = ent[index][j] * h
                ent[j][index] = ent[index][j]
        if not residue_reduce(ent[index][index], h):
            ent[index][index] = ent[index][index] + one_p
        planted.append(Mat(ent))
    eps = Mat.identity(size, UniPoly(fld, []), one_p)
    eps.entries[index][index] = h
    qs = [eps.T @ q @ eps for q in planted]
    return qs, index, planted


def random_planted_factorization(
    rng: random.Random, fld: Field, r: int, g: UniPoly
) -> Mat:
    """10 x 10 family of rank r whose r x r minor gcd is the monic part of g.

    Sandwiches diag(1, ..., 1, g) between random constant full-rank maps.
    The outer factors are constant, hence fiberwise injective and
    surjective, so the middle carries the entire degeneration.
    """
    zero_p = UniPoly(fld, [])
    one_p = UniPoly.const(fld, fld.one())
    while True:
        c = Mat([[fld.from_int(rng.randrange(-3, 4)) for _ in range(r)] for _ in range(10)])
        if field_rank(c) == r:
            break
    while True:
        b = Mat([[fld.from_int(rng.randrange(-3, 4)) for _ in range(10)] for _ in range(r)])
        if field_rank(b) == r:
            break
    d = Mat.identity(r, zero_p, one_p)
    d.entries[r - 1][r - 1] = g
    return _lift(c, fld) @ d @ _lift(b, fld)
