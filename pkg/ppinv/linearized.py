from typing import List, Sequence, Tuple, Union

import logging
from dataclasses import dataclass
from itertools import product

from .certificate import VerificationException
from .gf_core import FieldCtx, FieldElement, frobenius_q
from .poly_eval import NotAPermutationException, SparsePoly

logger = logging.getLogger(__name__)

Matrix = List[List[FieldElement]]


class SingularMatrixException(ArithmeticError):
    pass


class RankException(ArithmeticError):
    """Raised when a kernel vector is requested from a matrix whose rank is not n-1."""

    def __init__(self, rank, expected):
        super().__init__("matrix has rank {}, expected {}".format(rank, expected))
        self.rank = rank
        self.expected = expected


class LinearizedPoly:
    """L(x) = a_0 x + a_1 x^q + ... + a_{n-1} x^{q^{n-1}} over F_{q^n}."""

    def __init__(self, ctx: FieldCtx, coeffs: Sequence[Union[FieldElement, int]]):
        if len(coeffs) > ctx.n:
            raise ValueError(
                "{} coefficients given, {} needs at most {}".format(
                    len(coeffs), ctx, ctx.n
                )
            )
        coeffs = [ctx.from_int(c) if isinstance(c, int) else c for c in coeffs]
        self.ctx = ctx
        self.coeffs = tuple(coeffs) + (ctx.zero,) * (ctx.n - len(coeffs))

    def __call__(self, x: FieldElement) -> FieldElement:
        total = self.ctx.zero
        for i, a in enumerate(self.coeffs):
            if a:
                total = total + a * frobenius_q(self.ctx, x, i)
        return total

    def __eq__(self, other):
        if not isinstance(other, LinearizedPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def scaled(self, c: FieldElement) -> "LinearizedPoly":
        return LinearizedPoly(self.ctx, [c * a for a in self.coeffs])

    def to_sparse(self) -> SparsePoly:
        return SparsePoly(
            self.ctx, [(self.ctx.q**i, a) for i, a in enumerate(self.coeffs)]
        )

    def dickson(self) -> "DicksonMatrix":
        return dickson(self)

    def is_permutation(self) -> bool:
        det, _ = det_rank(dickson(self))
        return not det.is_zero

    def describe(self) -> str:
        terms = [
            "{}*x^(q^{})".format(list(a.coeffs), i)
            for i, a in enumerate(self.coeffs)
            if a
        ]
        return " + ".join(terms) or "0"

    def to_json(self) -> List[List[int]]:
        return [list(a.coeffs) for a in self.coeffs]

    def __repr__(self):
        return "LinearizedPoly({}: {})".format(self.ctx, self.describe())


@dataclass(frozen=True)
class DicksonMatrix:
    """Row i, column j holds a_{(j-i) mod n}^(q^i)."""

    linearized: LinearizedPoly
    entries: Tuple[Tuple[FieldElement, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> Matrix:
        return [list(row) for row in self.entries]

    def transpose(self) -> Matrix:
        return transpose(self.entries)

    def to_json(self):
        return matrix_to_json(self.entries)


def dickson(L: LinearizedPoly) -> DicksonMatrix:
    n = L.ctx.n
    entries = tuple(
        tuple(frobenius_q(L.ctx, L.coeffs[(j - i) % n], i) for j in range(n))
        for i in range(n)
    )
    return DicksonMatrix(L, entries)


def _rows(M) -> Matrix:
    if isinstance(M, DicksonMatrix):
        return M.rows()
    return [list(row) for row in M]


def transpose(M) -> Matrix:
    rows = _rows(M)
    return [list(col) for col in zip(*rows)]


def matrix_to_json(M) -> List[List[List[int]]]:
    return [[list(v.coeffs) for v in row] for row in _rows(M)]


def matvec(M, v: Sequence[FieldElement]) -> List[FieldElement]:
    out = []
    for row in _rows(M):
        total = v[0].ctx.zero
        for a, b in zip(row, v):
            total = total + a * b
        out.append(total)
    return out


def vecmat(v: Sequence[FieldElement], M) -> List[FieldElement]:
    return matvec(transpose(M), v)


def _reduce(rows: Matrix, columns: int):
    """
    Reduced row echelon form in place, pivoting on the first nonzero entry.
    Returns the pivot columns and the determinant of the leading square block
    (only meaningful when every one of its columns carries a pivot).
    """
    ctx = rows[0][0].ctx
    det = ctx.one
    pivots = []
    r = 0
    for c in range(columns):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        if pivot != r:
            rows[r], rows[pivot] = rows[pivot], rows[r]
            det = -det
        lead = rows[r][c]
        det = det * lead
        inv = lead.inverse()
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            factor = rows[i][c]
            if i != r and factor:
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots, det


def rref(M) -> Tuple[Matrix, List[int]]:
    rows = _rows(M)
    pivots, _ = _reduce(rows, len(rows[0]))
    return rows, pivots


def det_rank(M) -> Tuple[FieldElement, int]:
    rows = _rows(M)
    ctx = rows[0][0].ctx
    pivots, det = _reduce(rows, len(rows[0]))
    rank = len(pivots)
    if rank < len(rows) or len(rows) != len(rows[0]):
        det = ctx.zero
    return det, rank


def rank(M) -> int:
    return det_rank(M)[1]


def _minor(rows: Matrix, i: int, j: int) -> Matrix:
    return [row[:j] + row[j + 1 :] for k, row in enumerate(rows) if k != i]


def cofactor_col0(M, i: int) -> FieldElement:
    rows = _rows(M)
    ctx = rows[0][0].ctx
    if len(rows) == 1:
        return ctx.one
    minor, _ = det_rank(_minor(rows, i, 0))
    return minor if i % 2 == 0 else -minor


def laplace_det_col0(M) -> FieldElement:
    rows = _rows(M)
    total = rows[0][0].ctx.zero
    for i, row in enumerate(rows):
        if row[0]:
            total = total + row[0] * cofactor_col0(rows, i)
    return total


def nullspace_vec(M) -> List[FieldElement]:
    """
    Kernel vector of a rank n-1 matrix: from the reduced row echelon form with the
    free variable set to 1, then scaled so that its first nonzero entry is 1.
    """
    rows, pivots = rref(M)
    columns = len(rows[0])
    if len(pivots) != columns - 1:
        raise RankException(len(pivots), columns - 1)
    ctx = rows[0][0].ctx
    (free,) = [c for c in range(columns) if c not in pivots]
    vec = [ctx.zero] * columns
    vec[free] = ctx.one
    for r, c in enumerate(pivots):
        vec[c] = -rows[r][free]
    lead = next(v for v in vec if v)
    inv = lead.inverse()
    return [v * inv for v in vec]


def solve_unique(M, rhs: Sequence[FieldElement]) -> List[FieldElement]:
    rows = _rows(M)
    n = len(rows)
    augmented = [row + [b] for row, b in zip(rows, rhs)]
    pivots, _ = _reduce(augmented, n)
    if len(pivots) != n or len(rows[0]) != n:
        raise SingularMatrixException("system has no unique solution")
    return [augmented[i][n] for i in range(n)]


def solve_in_span(columns: Sequence[Sequence[FieldElement]], target) -> List:
    """
    Coefficients k with sum_j k_j columns[j] = target, for linearly independent
    columns. Raises SingularMatrixException when target is outside their span.
    """
    width = len(columns)
    augmented = [list(row) + [t] for row, t in zip(zip(*columns), target)]
    pivots, _ = _reduce(augmented, width + 1)
    if pivots != list(range(width)):
        raise SingularMatrixException("target is not in the span of the columns")
    return [augmented[j][width] for j in range(width)]


def rows_independent(M) -> bool:
    """Every choice of n-1 rows of a rank n-1 matrix is linearly independent."""
    rows = _rows(M)
    n = len(rows)
    return all(
        rank([row for k, row in enumerate(rows) if k != i]) == n - 1 for i in range(n)
    )


def linearized_inverse(L: LinearizedPoly) -> LinearizedPoly:
    """
    Inverse of a linearized permutation polynomial from the cofactors of the first
    column of its Dickson matrix, L^{-1} = det(D)^{-1} sum_i cof(i, 0) x^(q^i).
    """
    D = dickson(L)
    det, r = det_rank(D)
    if det.is_zero:
        raise NotAPermutationException(
            "Dickson matrix of {} is singular (rank {})".format(L.describe(), r),
            detail=D,
        )
    cofactors = [cofactor_col0(D, i) for i in range(D.n)]
    expansion = L.ctx.zero
    for i, c in enumerate(cofactors):
        expansion = expansion + D[i, 0] * c
    if expansion != det:
        raise VerificationException(
            {
                "reason": "cofactor expansion disagrees with elimination",
                "det": list(det.coeffs),
                "expansion": list(expansion.coeffs),
            }
        )
    det_inv = det.inverse()
    logger.debug("inverse of %s has det %r", L.describe(), det)
    return LinearizedPoly(L.ctx, [det_inv * c for c in cofactors])


def kernel(L: LinearizedPoly) -> List[FieldElement]:
    return [x for x in L.ctx.elements() if L(x).is_zero]


def kernel_dimension(L: LinearizedPoly) -> int:
    size = len(kernel(L))
    dim = 0
    while size > 1:
        size, rest = divmod(size, L.ctx.q)
        if rest:
            raise ArithmeticError("kernel size is not a power of q")
        dim += 1
    return dim


def image(L: LinearizedPoly) -> set:
    return {L(x) for x in L.ctx.elements()}


def all_linearized(ctx: FieldCtx):
    """Every linearized polynomial over ctx, coefficient tuples in enumeration order."""
    for indices in product(range(ctx.size), repeat=ctx.n):
        yield LinearizedPoly(ctx, [ctx.from_index(i) for i in reversed(indices)])


def random_linearized(ctx: FieldCtx, rng) -> LinearizedPoly:
    return LinearizedPoly(ctx, [ctx.random_element(rng) for _ in range(ctx.n)])
