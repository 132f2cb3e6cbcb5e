"""Exterior algebra of a 6-dimensional space with a fixed hyperplane.

Basis vectors are e1..e6; the distinguished hyperplane V5 is spanned by
e1..e5.  Degree-p elements are coordinate vectors over the lexicographically
sorted p-subsets of {1..6}.  All trivializations are fixed once:
e12345 spans det(V5), the class of e6 spans V6/V5, e123456 spans det(V6).

The projection lambda_p is the contraction against the covector dual to e6
(the Leibniz antiderivation): on a sorted monomial with 6 in last position,
e_{S'} wedge e6 maps to (-1)^(p-1) e_{S'}.  With this sign the Leibniz rule
lambda(x ^ y) = lambda(x) ^ y + (-1)^deg(x) x ^ lambda(y) holds on the nose,
and the Gram-matrix formula below is symmetric exactly on Lagrangian spans.

Everything combinatorial is tabulated once as plain integers so that the same
tables drive scalar, polynomial, and vectorized modular computations.
"""

from __future__ import annotations

from itertools import combinations
from typing import Sequence

from .exactnum import Field, Scalar
from .linalg import Mat, field_rank


def _subsets(n: int, p: int) -> list[int]:
    """Bitmasks of p-subsets of {0..n-1} in lex order of the sorted tuples."""
    out = []
    for tup in combinations(range(n), p):
        m = 0
        for b in tup:
            m |= 1 << b
        out.append(m)
    return out


SUBSETS = {p: _subsets(6, p) for p in range(7)}
SUBSET_INDEX = {p: {m: i for i, m in enumerate(SUBSETS[p])} for p in range(7)}

# 2- and 3-subsets of {1..5} (bit 5 unset) in lex order, with their own indexing
V5_SUBSETS2 = _subsets(5, 2)
V5_SUBSETS3 = _subsets(5, 3)
V5_INDEX2 = {m: i for i, m in enumerate(V5_SUBSETS2)}
V5_INDEX3 = {m: i for i, m in enumerate(V5_SUBSETS3)}
# positions of the Lambda^3 V5 monomials inside the 20-dim Lambda^3 V6 basis
V5_3_IN_6 = [SUBSET_INDEX[3][m] for m in V5_SUBSETS3]


def merge_sign(s: int, t: int) -> int:
    """Sign of e_S ^ e_T relative to e_{S union T}; 0 if the masks overlap."""
    if s & t:
        return 0
    inv = 0
    for b in range(6):
        if t >> b & 1:
            inv += bin(s >> (b + 1)).count("1")
    return -1 if inv & 1 else 1


def popcount(m: int) -> int:
    return bin(m).count("1")


class MultiVector:
    """Homogeneous exterior form of degree p over a chosen scalar field."""

    __slots__ = ("field", "p", "coeffs")

    def __init__(self, field: Field, p: int, coeffs: Sequence[Scalar]):
        if p < 0 or p > 6:
            raise ValueError("degree out of range")
        if len(coeffs) != len(SUBSETS[p]):
            raise ValueError(f"degree {p} needs {len(SUBSETS[p])} coefficients")
        self.field = field
        self.p = p
        self.coeffs = list(coeffs)

    @classmethod
    def zero(cls, field: Field, p: int) -> "MultiVector":
        return cls(field, p, [field.zero()] * len(SUBSETS[p]))

    @classmethod
    def basis(cls, field: Field, indices: Sequence[int]) -> "MultiVector":
        """Basis monomial e_{i1...ip} from 1-based indices, e.g. (1, 2, 6)."""
        idx = sorted(indices)
        if idx != list(indices) or len(set(idx)) != len(idx):
            raise ValueError("indices must be strictly increasing")
        m = 0
        for i in idx:
            if not 1 <= i <= 6:
                raise ValueError("indices range over 1..6")
            m |= 1 << (i - 1)
        v = cls.zero(field, len(idx))
        v.coeffs[SUBSET_INDEX[len(idx)][m]] = field.one()
        return v

    def coeff(self, indices: Sequence[int]) -> Scalar:
        m = 0
        for i in indices:
            m |= 1 << (i - 1)
        return self.coeffs[SUBSET_INDEX[self.p][m]]

    def __add__(self, other: "MultiVector") -> "MultiVector":
        self._compat(other)
        return MultiVector(self.field, self.p, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "MultiVector") -> "MultiVector":
        self._compat(other)
        return MultiVector(self.field, self.p, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "MultiVector":
        return MultiVector(self.field, self.p, [-a for a in self.coeffs])

    def scale(self, c: Scalar) -> "MultiVector":
        return MultiVector(self.field, self.p, [c * a for a in self.coeffs])

    def _compat(self, other: "MultiVector") -> None:
        if self.p != other.p or self.field != other.field:
            raise ValueError("degree or field mismatch")

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MultiVector)
            and self.p == other.p
            and self.field == other.field
            and self.coeffs == other.coeffs
        )

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __repr__(self) -> str:
        parts = []
        for i, c in enumerate(self.coeffs):
            if c:
                names = "".join(str(b + 1) for b in range(6) if SUBSETS[self.p][i] >> b & 1)
                parts.append(f"{c}*e{names}")
        return " + ".join(parts) if parts else "0"


def wedge(x: MultiVector, y: MultiVector) -> MultiVector:
    if x.field != y.field:
        raise ValueError("field mismatch")
    p = x.p + y.p
    if p > 6:
        raise ValueError("wedge degree exceeds 6")
    out = MultiVector.zero(x.field, p)
    sub_x, sub_y = SUBSETS[x.p], SUBSETS[y.p]
    idx = SUBSET_INDEX[p]
    for i, a in enumerate(x.coeffs):
        if not a:
            continue
        s = sub_x[i]
        for j, b in enumerate(y.coeffs):
            if not b:
                continue
            t = sub_y[j]
            sg = merge_sign(s, t)
            if sg:
                k = idx[s | t]
                term = a * b
                out.coeffs[k] = out.coeffs[k] + (term if sg > 0 else -term)
    return out


def lambda_p(x: MultiVector) -> MultiVector:
    """Contraction against the covector dual to e6 (Leibniz antiderivation).

    Kills Lambda^p V5; on e_{S'} ^ e6 it gives (-1)^(p-1) e_{S'}.
    """
    if x.p == 0:
        raise ValueError("no contraction in degree 0")
    out = MultiVector.zero(x.field, x.p - 1)
    sign = 1 if (x.p - 1) % 2 == 0 else -1
    idx = SUBSET_INDEX[x.p - 1]
    for i, a in enumerate(x.coeffs):
        if not a:
            continue
        m = SUBSETS[x.p][i]
        if m >> 5 & 1:
            k = idx[m & ~(1 << 5)]
            out.coeffs[k] = out.coeffs[k] + (a if sign > 0 else -a)
    return out


def symplectic_pairing(x: MultiVector, y: MultiVector) -> Scalar:
    """Coefficient of e123456 in x ^ y for two degree-3 forms."""
    if x.p != 3 or y.p != 3:
        raise ValueError("pairing is defined on degree-3 forms")
    acc = x.field.zero()
    subs = SUBSETS[3]
    for i, a in enumerate(x.coeffs):
        if not a:
            continue
        s = subs[i]
        t = 0b111111 & ~s
        j = SUBSET_INDEX[3][t]
        b = y.coeffs[j]
        if b:
            sg = merge_sign(s, t)
            acc = acc + (a * b if sg > 0 else -(a * b))
    return acc


# ---------------------------------------------------------------------------
# integer tables shared by the scalar, polynomial, and vectorized paths


def _build_j_table() -> list[list[int]]:
    """20 x 20 Gram table of the wedge pairing on Lambda^3 V6."""
    subs = SUBSETS[3]
    return [[merge_sign(s, t) for t in subs] for s in subs]


def _build_lambda3_rows() -> list[list[int]]:
    """10 x 20 table: lambda_3 from Lambda^3 V6 to Lambda^2 V5 coordinates."""
    out = [[0] * 20 for _ in range(10)]
    for i, m in enumerate(SUBSETS[3]):
        if m >> 5 & 1:
            out[V5_INDEX2[m & ~(1 << 5)]][i] = 1  # (-1)^(3-1) = +1
    return out


def _build_qa_tables() -> list[list[list[int]]]:
    """Per basis vector e_v: 20 x 20 table of
    -(coefficient of e12345 in lambda_4(e_v ^ e_S) ^ lambda_3(e_T))."""
    top = (1 << 5) - 1  # mask of e12345
    tables = []
    for v in range(6):
        tab = [[0] * 20 for _ in range(20)]
        for si, s in enumerate(SUBSETS[3]):
            sg_vs = merge_sign(1 << v, s)
            if not sg_vs:
                continue
            m4 = (1 << v) | s
            if not (m4 >> 5 & 1):
                continue
            m3 = m4 & ~(1 << 5)  # lambda_4 sign on degree 4 is (-1)^3 = -1
            sg_l4 = -sg_vs
            for ti, t in enumerate(SUBSETS[3]):
                if not (t >> 5 & 1):
                    continue
                m2 = t & ~(1 << 5)  # lambda_3 sign is +1
                sg_w = merge_sign(m3, m2)
                if sg_w and (m3 | m2) == top:
                    tab[si][ti] = -sg_l4 * sg_w
        tables.append(tab)
    return tables


def _build_mu_wedge_tables() -> list[list[list[int]]]:
    """For i in 0..4: 10 x 10 table of coeff of e12345 in e_{i+1} ^ e_B ^ e_C
    over 2-subsets B, C of {1..5}."""
    top = (1 << 5) - 1
    tables = []
    for v in range(5):
        tab = [[0] * 10 for _ in range(10)]
        for bi, b in enumerate(V5_SUBSETS2):
            sg1 = merge_sign(1 << v, b)
            if not sg1:
                continue
            vb = (1 << v) | b
            for ci, c in enumerate(V5_SUBSETS2):
                sg2 = merge_sign(vb, c)
                if sg2 and (vb | c) == top:
                    tab[bi][ci] = sg1 * sg2
        tables.append(tab)
    return tables


def _build_w32_table() -> list[list[int]]:
    """10 x 10 table: coeff of e12345 in e_{S3} ^ e_{B2} for V5 subsets."""
    top = (1 << 5) - 1
    out = [[0] * 10 for _ in range(10)]
    for si, s in enumerate(V5_SUBSETS3):
        for bi, b in enumerate(V5_SUBSETS2):
            sg = merge_sign(s, b)
            if sg and (s | b) == top:
                out[si][bi] = sg
    return out


def _build_vwedge2_tables() -> list[list[list[int]]]:
    """For v in 0..5: 20 x 10 table of e_v ^ e_{B2} in Lambda^3 V6 coords."""
    tables = []
    for v in range(6):
        tab = [[0] * 10 for _ in range(20)]
        for bi, b in enumerate(V5_SUBSETS2):
            sg = merge_sign(1 << v, b)
            if sg:
                tab[SUBSET_INDEX[3][(1 << v) | b]][bi] = sg
        tables.append(tab)
    return tables


def _build_v6wedge2_tables() -> list[list[list[int]]]:
    """For v in 0..5: 20 x 15 table of e_v ^ e_B over all bivectors of V6
    (VWEDGE2_TABLES restricts B to V5)."""
    tables = []
    for v in range(6):
        tab = [[0] * 15 for _ in range(20)]
        for bi, b in enumerate(SUBSETS[2]):
            sg = merge_sign(1 << v, b)
            if sg:
                tab[SUBSET_INDEX[3][(1 << v) | b]][bi] = sg
        tables.append(tab)
    return tables


def _build_ek_wedge3_tables() -> list[list[list[int]]]:
    """For k in 0..5: 15 x 20 table of the map (omega -> e_k ^ omega)."""
    tables = []
    for k in range(6):
        tab = [[0] * 20 for _ in range(15)]
        for si, s in enumerate(SUBSETS[3]):
            sg = merge_sign(1 << k, s)
            if sg:
                tab[SUBSET_INDEX[4][(1 << k) | s]][si] = sg
        tables.append(tab)
    return tables


def _build_epw_tables() -> list[list[list[int]]]:
    """For v in 0..5: 20 x 15 table of <e_S ^ e_v ^ e_B> over bivectors B."""
    full = (1 << 6) - 1
    tables = []
    for v in range(6):
        tab = [[0] * 15 for _ in range(20)]
        for si, s in enumerate(SUBSETS[3]):
            sg1 = merge_sign(s, 1 << v)
            if not sg1:
                continue
            sv = s | (1 << v)
            for bi, b in enumerate(SUBSETS[2]):
                sg2 = merge_sign(sv, b)
                if sg2 and (sv | b) == full:
                    tab[si][bi] = sg1 * sg2
        tables.append(tab)
    return tables


def _build_incl3_table() -> list[list[int]]:
    """20 x 10 inclusion of Lambda^3 V5 into Lambda^3 V6 coordinates."""
    out = [[0] * 10 for _ in range(20)]
    for j, row in enumerate(V5_3_IN_6):
        out[row][j] = 1
    return out


def _build_contract_tables() -> list[list[list[int]]]:
    """For k in 0..5: 20 x 15 table of contraction of trivectors against
    the covector dual to e_{k+1}."""
    tables = []
    for k in range(6):
        tab = [[0] * 15 for _ in range(20)]
        for si, s in enumerate(SUBSETS[3]):
            if not (s >> k & 1):
                continue
            rest = s & ~(1 << k)
            pos = popcount(s & ((1 << k) - 1))
            sg = -1 if pos & 1 else 1
            tab[si][SUBSET_INDEX[2][rest]] = sg
        tables.append(tab)
    return tables


J_TABLE = _build_j_table()
INCL3_TABLE = _build_incl3_table()
LAMBDA3_ROWS = _build_lambda3_rows()
QA_TABLES = _build_qa_tables()
MU_WEDGE_TABLES = _build_mu_wedge_tables()
W32_TABLE = _build_w32_table()
VWEDGE2_TABLES = _build_vwedge2_tables()
V6WEDGE2_TABLES = _build_v6wedge2_tables()
EK_WEDGE3_TABLES = _build_ek_wedge3_tables()
EPW_TABLES = _build_epw_tables()
CONTRACT_TABLES = _build_contract_tables()

# L1 = monomials containing e1, L2 = the complementary ten; both Lagrangian
L1_IDX = [i for i, m in enumerate(SUBSETS[3]) if m & 1]
L2_IDX = [i for i, m in enumerate(SUBSETS[3]) if not m & 1]
# pairing of the L1 basis against the L2 basis (a signed permutation)
J12_TABLE = [[J_TABLE[i][j] for j in L2_IDX] for i in L1_IDX]


def int_table_to_mat(table: Sequence[Sequence[int]], like) -> Mat:
    """Lift an integer table to a matrix over the ring of the sample entry.

    ``like`` is any entry (zero is fine) of the matrices the result will be
    combined with: a Fraction, an Fp element, or a UniPoly.
    """
    from fractions import Fraction

    from .exactnum import Fp, UniPoly

    if isinstance(like, UniPoly):
        field = like.field
        cache: dict = {}

        def conv(n: int):
            if n not in cache:
                cache[n] = UniPoly.const(field, field.from_int(n))
            return cache[n]

    elif isinstance(like, Fp):
        p = like.p

        def conv(n: int):
            return Fp(n, p)

    else:

        def conv(n: int):
            return Fraction(n)

    return Mat([[conv(n) for n in row] for row in table])


def field_table_mat(field: Field, table: Sequence[Sequence[int]]) -> Mat:
    return Mat([[field.from_int(n) for n in row] for row in table])


def graph_lagrangian_matrix(b: Mat) -> Mat:
    """Rows of [I | B @ J12] spread over the 20 coordinates.

    For any symmetric 10 x 10 B this is a Lagrangian basis: the two
    coordinate blocks are the complementary isotropic spans of the monomials
    containing e1 and those not containing it, and J12 is the pairing-induced
    identification between them.
    """
    if b.shape != (10, 10):
        raise ValueError("B must be 10 x 10")
    from .exactnum import Fp, QQ, PrimeField

    sample = b.entries[0][0]
    field = PrimeField(sample.p) if isinstance(sample, Fp) else QQ
    j12 = field_table_mat(field, J12_TABLE)
    m = b @ j12
    zero = field.zero()
    one = field.one()
    rows = []
    for i in range(10):
        row = [zero] * 20
        row[SUBSET_INDEX[3][SUBSETS[3][L1_IDX[i]]]] = one
        for j in range(10):
            row[L2_IDX[j]] = m.entries[i][j]
        rows.append(row)
    return Mat(rows)


def symplectic_gram(a: Mat) -> Mat:
    """A @ J @ A^T for a 10 x 20 coordinate matrix (any coefficient ring)."""
    sample = next((x for row in a.entries for x in row if x), a.entries[0][0])
    j = int_table_to_mat(J_TABLE, sample)
    return a @ j @ a.T


def is_lagrangian(a: Mat) -> bool:
    """True when the 10 rows span a Lagrangian subspace of Lambda^3 V6."""
    if a.shape != (10, 20):
        raise ValueError("expected a 10 x 20 coordinate matrix")
    if not symplectic_gram(a).is_zero():
        return False
    return field_rank(a) == 10


def decomposable_rank_test(omega: MultiVector) -> tuple[int, bool]:
    """Rank of v -> v ^ omega on V6; a nonzero form is decomposable iff 3."""
    if omega.p != 3:
        raise ValueError("decomposability test applies to degree-3 forms")
    field = omega.field
    cols = []
    for k in range(6):
        col = [field.zero()] * 15
        tab = EK_WEDGE3_TABLES[k]
        for si, c in enumerate(omega.coeffs):
            if not c:
                continue
            for ri in range(15):
                sg = tab[ri][si]
                if sg:
                    col[ri] = col[ri] + (c if sg > 0 else -c)
        cols.append(col)
    m = Mat([[cols[k][r] for k in range(6)] for r in range(15)])
    rank = field_rank(m)
    return rank, rank == 3
