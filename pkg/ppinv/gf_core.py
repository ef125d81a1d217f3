from typing import Iterator, List, Optional, Sequence, Tuple

import logging
import math
import numpy as np
import re
from dataclasses import dataclass, field
from functools import lru_cache
from sympy import factorint, isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irred_p_rabin, gf_mul, gf_pow_mod, gf_rem

from .settings import settings

logger = logging.getLogger(__name__)


class FieldException(ValueError):
    """
    Raised for ill-posed field constructions (non-prime characteristic, size cap
    exceeded), malformed element input and the undefined power 0^0.
    """


def _digits(index: int, p: int, length: int) -> List[int]:
    out = []
    for _ in range(length):
        index, c = divmod(index, p)
        out.append(c)
    return out


def _to_sympy(coeffs: Sequence[int]) -> list:
    # galoistools works on big-endian lists without leading zeros
    poly = [ZZ(c) for c in reversed(coeffs)]
    while poly and not poly[0]:
        poly.pop(0)
    return poly


def _from_sympy(poly: Sequence, length: int) -> List[int]:
    coeffs = [int(c) for c in reversed(poly)]
    return coeffs + [0] * (length - len(coeffs))


def _matrix_power_mod(matrix: np.ndarray, exponent: int, p: int) -> np.ndarray:
    result = np.identity(matrix.shape[0], dtype=np.int64)
    base = matrix % p
    while exponent:
        if exponent & 1:
            result = result.dot(base) % p
        base = base.dot(base) % p
        exponent >>= 1
    return result


def smallest_irreducible(p: int, degree: int) -> Tuple[int, ...]:
    """
    Lexicographically smallest monic irreducible polynomial of the given degree over
    F_p. Candidates are visited by counting their lower coefficients little-endian,
    which is the same order in which field elements are enumerated.
    """
    for lower in range(p**degree):
        coeffs = _digits(lower, p, degree) + [1]
        if gf_irred_p_rabin(_to_sympy(coeffs), p, ZZ):
            return tuple(coeffs)
    raise FieldException(
        "no irreducible polynomial of degree {} over F_{}".format(degree, p)
    )


def _search_generator(p: int, modulus: Sequence[int], order: int) -> int:
    degree = len(modulus) - 1
    m = _to_sympy(modulus)
    cofactors = [order // r for r in sorted(factorint(order))]
    for index in range(1, order + 1):
        candidate = _to_sympy(_digits(index, p, degree))
        if all(gf_pow_mod(candidate, c, m, p, ZZ) != [ZZ.one] for c in cofactors):
            return index
    raise FieldException("multiplicative group has no generator")  # pragma: no cover


def _antilog_table(p: int, modulus: Sequence[int], generator: int, order: int):
    """
    Indices of g^0 .. g^(order-1). Multiplication by g is an F_p-linear map, so the
    powers are produced a block at a time by one matrix product per block.
    """
    degree = len(modulus) - 1
    m = _to_sympy(modulus)
    g = _to_sympy(_digits(generator, p, degree))
    step = np.zeros((degree, degree), dtype=np.int64)
    for j in range(degree):
        column = gf_rem(gf_mul(g, [ZZ.one] + [ZZ.zero] * j, p, ZZ), m, p, ZZ)
        step[:, j] = _from_sympy(column, degree)

    block = max(1, math.isqrt(order))
    head = np.zeros((block, degree), dtype=np.int64)
    vector = np.zeros(degree, dtype=np.int64)
    vector[0] = 1
    for k in range(block):
        head[k] = vector
        vector = step.dot(vector) % p

    jump = _matrix_power_mod(step, block, p).T
    rows = [head]
    covered = block
    while covered < order:
        rows.append(rows[-1].dot(jump) % p)
        covered += block
    powers = np.concatenate(rows)[:order]
    weights = p ** np.arange(degree, dtype=np.int64)
    return powers.dot(weights)


@dataclass(frozen=True)
class FieldCtx:
    """
    F_{q^n} with q = p^e, represented as F_p[x]/(modulus) of degree e*n.

    Elements are identified by their index, the little-endian base-p number formed
    by their coefficient vector. Products and sums go through antilog, log and Zech
    tables built once per field.
    """

    p: int
    e: int
    n: int
    modulus: Tuple[int, ...]
    order_minus_one: int
    generator: int
    exp_table: List[int] = field(repr=False, compare=False)
    log_table: List[int] = field(repr=False, compare=False)
    zech_table: List[int] = field(repr=False, compare=False)

    def __reduce__(self):
        return make_field, (self.p, self.e, self.n)

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def degree(self) -> int:
        return self.e * self.n

    @property
    def size(self) -> int:
        return self.order_minus_one + 1

    @property
    def spec(self) -> str:
        return "{}:{}:{}".format(self.p, self.e, self.n)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def g(self) -> "FieldElement":
        return FieldElement(self, self.generator)

    def __str__(self):
        return "GF({}^{})".format(self.q, self.n) if self.e > 1 else "GF({}^{})".format(
            self.p, self.n
        )

    # index level arithmetic

    def add(self, i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        li = self.log_table[i]
        z = self.zech_table[(self.log_table[j] - li) % self.order_minus_one]
        if z < 0:
            return 0
        return self.exp_table[(li + z) % self.order_minus_one]

    def mul(self, i: int, j: int) -> int:
        if i == 0 or j == 0:
            return 0
        return self.exp_table[
            (self.log_table[i] + self.log_table[j]) % self.order_minus_one
        ]

    def neg(self, i: int) -> int:
        return self.mul(i, self.p - 1)

    def power(self, i: int, exponent: int) -> int:
        if i == 0:
            if exponent > 0:
                return 0
            if exponent == 0:
                raise FieldException("0^0 is ill-posed")
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return self.exp_table[(self.log_table[i] * exponent) % self.order_minus_one]

    # element construction

    def from_index(self, index: int) -> "FieldElement":
        if not 0 <= index < self.size:
            raise FieldException("element index {} outside {}".format(index, self))
        return FieldElement(self, index)

    def from_int(self, value: int) -> "FieldElement":
        return FieldElement(self, value % self.p)

    def element(self, coeffs: Sequence[int]) -> "FieldElement":
        coeffs = list(coeffs)
        if len(coeffs) > self.degree:
            raise FieldException(
                "{} coefficients given, {} has degree {}".format(
                    len(coeffs), self, self.degree
                )
            )
        index = 0
        for c in reversed(coeffs):
            index = index * self.p + int(c) % self.p
        return FieldElement(self, index)

    def parse_element(self, text: str) -> "FieldElement":
        text = text.strip().strip("[]()")
        if not re.fullmatch(r"\s*-?\d+(\s*,\s*-?\d+)*\s*", text):
            raise FieldException("malformed coefficient list: {!r}".format(text))
        return self.element([int(c) for c in text.split(",")])

    def elements(self) -> Iterator["FieldElement"]:
        for index in range(self.size):
            yield FieldElement(self, index)

    def nonzero_elements(self) -> Iterator["FieldElement"]:
        for index in range(1, self.size):
            yield FieldElement(self, index)

    def random_element(self, rng, nonzero=False) -> "FieldElement":
        return FieldElement(self, rng.randrange(1 if nonzero else 0, self.size))

    # subfield

    def in_subfield(self, x: "FieldElement") -> bool:
        return frobenius_q(self, x, 1) == x

    def subfield_elements(self) -> List["FieldElement"]:
        return [x for x in self.elements() if self.in_subfield(x)]


class FieldElement:
    __slots__ = ("ctx", "index")

    def __init__(self, ctx: FieldCtx, index: int):
        self.ctx = ctx
        self.index = index

    @property
    def coeffs(self) -> Tuple[int, ...]:
        return tuple(_digits(self.index, self.ctx.p, self.ctx.degree))

    def to_list(self) -> List[int]:
        return list(self.coeffs)

    @property
    def is_zero(self) -> bool:
        return self.index == 0

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise FieldException(
                    "cannot combine elements of {} and {}".format(self.ctx, other.ctx)
                )
            return other.index
        if isinstance(other, int):
            return other % self.ctx.p
        return None

    def __add__(self, other):
        j = self._coerce(other)
        if j is None:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.add(self.index, j))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.index))

    def __sub__(self, other):
        j = self._coerce(other)
        if j is None:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.add(self.index, self.ctx.neg(j)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        j = self._coerce(other)
        if j is None:
            return NotImplemented
        return FieldElement(self.ctx, self.ctx.mul(self.index, j))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.power(self.index, -1))

    def __truediv__(self, other):
        j = self._coerce(other)
        if j is None:
            return NotImplemented
        return self * FieldElement(self.ctx, self.ctx.power(j, -1))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, exponent: int):
        return pow_big(self.ctx, self, exponent)

    def frobenius(self, j: int = 1) -> "FieldElement":
        return frobenius_q(self.ctx, self, j)

    def __bool__(self):
        return self.index != 0

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.index == other.index and (
            other.ctx is self.ctx or other.ctx == self.ctx
        )

    def __hash__(self):
        return hash((self.ctx.p, self.ctx.degree, self.index))

    def __repr__(self):
        return "{}{}".format(self.ctx, list(self.coeffs))


def parse_field_spec(text: str) -> Tuple[int, int, int]:
    parts = re.split(r"[:^]", text.strip())
    if len(parts) != 3 or not all(part.isdigit() for part in parts):
        raise FieldException("field spec must look like p:e:n, got {!r}".format(text))
    return int(parts[0]), int(parts[1]), int(parts[2])


def split_prime_power(q: int) -> Tuple[int, int]:
    if q < 2:
        raise FieldException("{} is not a prime power".format(q))
    factors = factorint(q)
    if len(factors) != 1:
        raise FieldException("{} is not a prime power".format(q))
    ((p, e),) = factors.items()
    return int(p), int(e)


def make_field(p: int, e: int, n: int, max_size: Optional[int] = None) -> FieldCtx:
    if not isprime(p):
        raise FieldException("characteristic {} is not prime".format(p))
    if e < 1 or n < 1:
        raise FieldException("extension degrees must be positive")
    cap = max_size if max_size is not None else settings.max_field
    if p ** (e * n) > cap:
        raise FieldException(
            "F_{}^{} has more than {} elements (PPINV_MAX_FIELD)".format(p, e * n, cap)
        )
    return _build_field(p, e, n)


@lru_cache(maxsize=None)
def _build_field(p: int, e: int, n: int) -> FieldCtx:
    degree = e * n
    order = p**degree - 1
    modulus = smallest_irreducible(p, degree)
    generator = _search_generator(p, modulus, order)
    logger.debug(
        "F_%d^%d: modulus %r, generator index %d", p, degree, modulus, generator
    )

    antilog = _antilog_table(p, modulus, generator, order)
    if np.unique(antilog).size != order:
        raise FieldException("generator search returned a non-generator")
    log = np.full(order + 1, -1, dtype=np.int64)
    log[antilog] = np.arange(order, dtype=np.int64)

    indices = np.arange(order + 1, dtype=np.int64)
    low = indices % p
    plus_one = indices - low + (low + 1) % p
    zech = log[plus_one[antilog]]

    return FieldCtx(
        p=p,
        e=e,
        n=n,
        modulus=modulus,
        order_minus_one=order,
        generator=generator,
        exp_table=antilog.tolist(),
        log_table=log.tolist(),
        zech_table=zech.tolist(),
    )


def rebuild_field(ctx: FieldCtx) -> FieldCtx:
    """A fresh construction of ctx's field that bypasses the cache."""
    return _build_field.__wrapped__(ctx.p, ctx.e, ctx.n)


def same_construction(a: FieldCtx, b: FieldCtx) -> bool:
    return (
        a == b
        and a.exp_table == b.exp_table
        and a.log_table == b.log_table
        and a.zech_table == b.zech_table
    )


def frobenius_q(ctx: FieldCtx, x: FieldElement, j: int) -> FieldElement:
    """x^(q^j), with j taken mod n."""
    return FieldElement(ctx, ctx.power(x.index, ctx.q ** (j % ctx.n)))


def pow_big(ctx: FieldCtx, x: FieldElement, e: int) -> FieldElement:
    return FieldElement(ctx, ctx.power(x.index, e))


def primitive_element(ctx: FieldCtx) -> FieldElement:
    """
    First element in enumeration order whose multiplicative order is q^n - 1. The
    search runs on polynomial arithmetic over F_p and does not use the field's tables.
    """
    return FieldElement(
        ctx, _search_generator(ctx.p, ctx.modulus, ctx.order_minus_one)
    )


def norm_to_subfield(ctx: FieldCtx, x: FieldElement) -> FieldElement:
    if x.is_zero:
        return ctx.zero
    return pow_big(ctx, x, ctx.order_minus_one // (ctx.q - 1))


def field_invariants(ctx: FieldCtx) -> dict:
    """Exhaustive check of the structural invariants of a constructed field."""
    order = ctx.order_minus_one
    g = _to_sympy(ctx.g.coeffs)
    m = _to_sympy(ctx.modulus)
    generator_ok = gf_pow_mod(g, order, m, ctx.p, ZZ) == [ZZ.one] and all(
        gf_pow_mod(g, order // r, m, ctx.p, ZZ) != [ZZ.one] for r in factorint(order)
    )
    return {
        "modulus_irreducible": bool(gf_irred_p_rabin(m, ctx.p, ZZ)),
        "generator_primitive": generator_ok,
        "frobenius_fixed_points": len(ctx.subfield_elements()) == ctx.q,
    }
