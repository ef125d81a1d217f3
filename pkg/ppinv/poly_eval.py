from typing import Callable, Dict, Iterable, List, Optional, Tuple, Union

import logging
import numpy as np
from dataclasses import dataclass

from .gf_core import FieldCtx, FieldElement

logger = logging.getLogger(__name__)

FieldMap = Callable[[FieldElement], FieldElement]

DENSE_LIMIT = 4096


class NotAPermutationException(ValueError):
    """
    Raised when an inverse is requested for a map that does not permute the field.
    ``detail`` holds the value table or matrix that shows it.
    """

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


def reduce_exponent(ctx: FieldCtx, exponent: int) -> int:
    """
    Representative of x^exponent as a map on the field. 0 stays the constant
    monomial; everything else lands in [1, q^n - 1], so the value at 0 is 0 and
    negative exponents act as inverses on nonzero inputs.
    """
    if exponent == 0:
        return 0
    return 1 + (exponent - 1) % ctx.order_minus_one


class SparsePoly:
    """
    Finite sum of monomials c*x^e over F_{q^n}. Exponents are kept reduced as
    functions on the field; coefficients are never zero.
    """

    def __init__(self, ctx: FieldCtx, terms: Union[Dict, Iterable[Tuple]] = ()):
        self.ctx = ctx
        items = terms.items() if isinstance(terms, dict) else terms
        reduced: Dict[int, int] = {}
        for exponent, coeff in items:
            if isinstance(coeff, int):
                coeff = ctx.from_int(coeff)
            key = reduce_exponent(ctx, exponent)
            reduced[key] = ctx.add(reduced.get(key, 0), coeff.index)
        self._terms = {e: c for e, c in sorted(reduced.items()) if c}

    @classmethod
    def monomial(cls, ctx: FieldCtx, exponent: int, coeff=1) -> "SparsePoly":
        return cls(ctx, [(exponent, coeff)])

    @classmethod
    def x(cls, ctx: FieldCtx) -> "SparsePoly":
        return cls.monomial(ctx, 1)

    @classmethod
    def constant(cls, ctx: FieldCtx, value) -> "SparsePoly":
        return cls.monomial(ctx, 0, value)

    @property
    def terms(self) -> Dict[int, FieldElement]:
        return {e: FieldElement(self.ctx, c) for e, c in self._terms.items()}

    def __len__(self):
        return len(self._terms)

    def __call__(self, x: FieldElement) -> FieldElement:
        return eval_poly(self, x)

    def _combine(self, other, sign):
        if isinstance(other, (int, FieldElement)):
            other = SparsePoly.constant(self.ctx, other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        terms = list(self.terms.items())
        for e, c in other.terms.items():
            terms.append((e, c if sign > 0 else -c))
        return SparsePoly(self.ctx, terms)

    def __add__(self, other):
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return SparsePoly(self.ctx, [(e, -c) for e, c in self.terms.items()])

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return SparsePoly(self.ctx, [(e, c * other) for e, c in self.terms.items()])
        if not isinstance(other, SparsePoly):
            return NotImplemented
        terms = []
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                terms.append((e1 + e2, FieldElement(self.ctx, self.ctx.mul(c1, c2))))
        return SparsePoly(self.ctx, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SparsePoly":
        if k < 0:
            raise ValueError("negative powers of polynomials are not polynomials")
        result = SparsePoly.constant(self.ctx, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.ctx == other.ctx and self._terms == other._terms

    def describe(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in sorted(self._terms.items(), reverse=True):
            coeff = list(FieldElement(self.ctx, c).coeffs)
            parts.append("{}*x^{}".format(coeff, e))
        return " + ".join(parts)

    def to_json(self) -> List:
        return [
            [e, list(FieldElement(self.ctx, c).coeffs)] for e, c in self._terms.items()
        ]

    def __repr__(self):
        return "SparsePoly({}: {})".format(self.ctx, self.describe())


def eval_poly(p: SparsePoly, x: FieldElement) -> FieldElement:
    ctx = p.ctx
    total = 0
    for exponent, coeff in p._terms.items():
        if exponent == 0:
            total = ctx.add(total, coeff)
        elif x.index:
            total = ctx.add(total, ctx.mul(coeff, ctx.power(x.index, exponent)))
    return FieldElement(ctx, total)


class PowerMap:
    """x -> x^e as a map on the field; the value at 0 is 0 for every e != 0."""

    def __init__(self, ctx: FieldCtx, exponent: int):
        self.ctx = ctx
        self.exponent = exponent

    def __call__(self, x: FieldElement) -> FieldElement:
        if x.is_zero:
            return x
        return FieldElement(self.ctx, self.ctx.power(x.index, self.exponent))

    def describe(self) -> str:
        return "x^{}".format(self.exponent)


class Composition:
    """outer(inner(x))"""

    def __init__(self, outer: FieldMap, inner: FieldMap):
        self.outer = outer
        self.inner = inner

    def __call__(self, x: FieldElement) -> FieldElement:
        return self.outer(self.inner(x))

    def describe(self) -> str:
        return "({}) o ({})".format(describe(self.outer), describe(self.inner))


class ProductMap:
    def __init__(self, *factors: FieldMap):
        self.factors = factors

    def __call__(self, x: FieldElement) -> FieldElement:
        result = x.ctx.one
        for factor in self.factors:
            result = result * factor(x)
        return result

    def describe(self) -> str:
        return " * ".join("({})".format(describe(f)) for f in self.factors)


class SumMap:
    def __init__(self, *terms: FieldMap):
        self.terms = terms

    def __call__(self, x: FieldElement) -> FieldElement:
        result = x.ctx.zero
        for term in self.terms:
            result = result + term(x)
        return result

    def describe(self) -> str:
        return " + ".join("({})".format(describe(t)) for t in self.terms)


def identity(x: FieldElement) -> FieldElement:
    return x


def describe(f: FieldMap) -> str:
    if f is identity:
        return "x"
    if hasattr(f, "describe"):
        return f.describe()
    return getattr(f, "__name__", repr(f))


@dataclass(frozen=True, eq=False)
class ValueTable:
    """
    Images f(x) in element enumeration order, stored as element indices. The
    table is the authoritative description of a map; polynomial forms are
    derived from it only for display.
    """

    ctx: FieldCtx
    images: np.ndarray
    bijective: bool

    @classmethod
    def from_images(cls, ctx: FieldCtx, images) -> "ValueTable":
        images = np.asarray(images, dtype=np.int64)
        return cls(ctx, images, bool(np.unique(images).size == ctx.size))

    def __len__(self):
        return len(self.images)

    def __getitem__(self, x: FieldElement) -> FieldElement:
        return FieldElement(self.ctx, int(self.images[x.index]))

    def __call__(self, x: FieldElement) -> FieldElement:
        return self[x]

    def image_size(self) -> int:
        return int(np.unique(self.images).size)

    def compose(self, inner: "ValueTable") -> "ValueTable":
        """Table of self o inner."""
        return ValueTable.from_images(self.ctx, self.images[inner.images])

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.images, np.arange(self.ctx.size)))

    def same_as(self, other: "ValueTable") -> bool:
        return bool(np.array_equal(self.images, other.images))

    def to_json(self) -> Dict[str, List[int]]:
        return {
            str(i): list(FieldElement(self.ctx, int(v)).coeffs)
            for i, v in enumerate(self.images)
        }

    def sbox_lines(self) -> List[str]:
        bits = (self.ctx.size - 1).bit_length()
        if bits > 16:
            raise ValueError(
                "S-box export needs at most 16 bits per element, {} has {}".format(
                    self.ctx, bits
                )
            )
        width = max(1, (bits + 3) // 4)
        return ["{:0{}x}".format(int(v), width) for v in self.images]


def value_table(f: FieldMap, ctx: FieldCtx) -> ValueTable:
    return ValueTable.from_images(ctx, [f(x).index for x in ctx.elements()])


def permutation_check(p: Union[SparsePoly, FieldMap], ctx: Optional[FieldCtx] = None):
    ctx = ctx or p.ctx
    table = value_table(p, ctx)
    logger.debug(
        "%s over %s: image size %d, bijective %s",
        describe(p),
        ctx,
        table.image_size(),
        table.bijective,
    )
    return table


def brute_inverse(p: Union[SparsePoly, FieldMap, ValueTable], ctx=None):
    table = p if isinstance(p, ValueTable) else permutation_check(p, ctx)
    if not table.bijective:
        raise NotAPermutationException(
            "map is not a permutation of {} (image size {})".format(
                table.ctx, table.image_size()
            ),
            detail=table,
        )
    inverse = np.empty_like(table.images)
    inverse[table.images] = np.arange(table.ctx.size, dtype=np.int64)
    return ValueTable(table.ctx, inverse, True)


def lagrange_interpolate(table: ValueTable) -> SparsePoly:
    """
    The unique polynomial of degree < q^n with the given values:
    c_0 = F(0), c_j = -sum_{a != 0} F(a) a^(-j) for 0 < j < q^n - 1 and
    c_{q^n - 1} = -sum_a F(a).
    """
    ctx = table.ctx
    if ctx.size > DENSE_LIMIT:
        raise ValueError(
            "dense form is only printed for fields up to {} elements".format(
                DENSE_LIMIT
            )
        )
    top = ctx.order_minus_one
    values = [int(v) for v in table.images]
    coeffs = {0: values[0]}
    for j in range(1, top + 1):
        total = 0
        for a in range(1, ctx.size):
            weight = 1 if j == top else ctx.power(a, -j)
            total = ctx.add(total, ctx.mul(values[a], weight))
        if j == top:
            total = ctx.add(total, values[0])
        coeffs[j] = ctx.neg(total)
    return SparsePoly(ctx, [(j, FieldElement(ctx, c)) for j, c in coeffs.items() if c])


def first_mismatch(lhs: FieldMap, rhs: FieldMap, ctx: FieldCtx):
    for x in ctx.elements():
        left, right = lhs(x), rhs(x)
        if left != right:
            return x, left, right
    return None


def verify_identity(lhs: FieldMap, rhs: FieldMap, ctx: FieldCtx) -> bool:
    mismatch = first_mismatch(lhs, rhs, ctx)
    if mismatch is not None:
        logger.debug(
            "%s != %s at x=%r (%r vs %r)",
            describe(lhs),
            describe(rhs),
            *mismatch,
        )
        return False
    return True
