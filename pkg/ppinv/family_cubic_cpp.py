from typing import List

import logging
from dataclasses import dataclass

from .certificate import PermutationCertificate, Verdict, VerificationException
from .family import (
    ParameterException,
    PermutationFamily,
    Stopwatch,
    field_from_args,
)
from .gf_core import FieldCtx, FieldElement, pow_big
from .linearized import LinearizedPoly, linearized_inverse
from .poly_eval import (
    Composition,
    FieldMap,
    PowerMap,
    ProductMap,
    SparsePoly,
    brute_inverse,
    first_mismatch,
    permutation_check,
    value_table,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CppParams:
    """
    f = -x + x^e1 + x^e2 over F_{q^3} for odd q, with e1 = (q^2 + 1)/2,
    e2 = (q^3 + q)/2 and w = q^3 - q^2 + q the inverse of e1 mod q^3 - 1.
    """

    ctx: FieldCtx

    def __post_init__(self):
        if self.ctx.n != 3:
            raise ParameterException("the cubic family lives over F_{q^3}")
        if self.ctx.p == 2:
            raise ParameterException("the cubic family needs q odd")
        if self.w * self.e1 % (self.q**3 - 1) != 1:
            raise VerificationException(
                {"reason": "w is not the inverse of e1", "q": self.q}
            )

    @property
    def q(self) -> int:
        return self.ctx.q

    @property
    def e1(self) -> int:
        return (self.q**2 + 1) // 2

    @property
    def e2(self) -> int:
        return (self.q**3 + self.q) // 2

    @property
    def w(self) -> int:
        return self.q**3 - self.q**2 + self.q

    def to_json(self):
        return {"q": self.q, "e1": self.e1, "e2": self.e2, "w": self.w}


def build_f(params: CppParams) -> SparsePoly:
    return SparsePoly(params.ctx, [(1, -1), (params.e1, 1), (params.e2, 1)])


def build_f_plus_x(params: CppParams) -> SparsePoly:
    return build_f(params) + SparsePoly.x(params.ctx)


def _half(ctx: FieldCtx) -> FieldElement:
    return pow_big(ctx, ctx.from_int(2), -1)


def affine_linear_part(a: FieldElement, ctx: FieldCtx) -> LinearizedPoly:
    """a^q x^q + a^(q^2) x"""
    return LinearizedPoly(ctx, [a.frobenius(2), a.frobenius(1)])


def affine_roots(a: FieldElement, ctx: FieldCtx) -> List[FieldElement]:
    L = affine_linear_part(a, ctx)
    two = ctx.from_int(2)
    return [x for x in ctx.elements() if L(x) == two]


def affine_root_formula(a: FieldElement, ctx: FieldCtx) -> FieldElement:
    """
    The unique root of a^q x^q + a^(q^2) x - 2 for a != 0:
    a^-(q^2+q+1) (a^(q+1) - a^(2q) + a^(q^2+q)).
    """
    if a.is_zero:
        raise ParameterException("a must be nonzero")
    q = ctx.q
    root = pow_big(ctx, a, -(q * q + q + 1)) * (
        pow_big(ctx, a, q + 1) - pow_big(ctx, a, 2 * q) + pow_big(ctx, a, q * q + q)
    )
    L = affine_linear_part(a, ctx)
    if L(root) != ctx.from_int(2):
        raise VerificationException(
            {
                "reason": "affine root formula fails",
                "a": a.to_list(),
                "root": root.to_list(),
            }
        )
    if not L.is_permutation():
        raise VerificationException(
            {"reason": "affine equation has a singular linear part", "a": a.to_list()}
        )
    return root


def affine_inverse(a: FieldElement, ctx: FieldCtx) -> FieldMap:
    """Inverse of y = a^q x^q + a^(q^2) x - 2, namely L^-1(y + 2)."""
    shift = SparsePoly(ctx, [(1, 1), (0, 2)])
    return Composition(linearized_inverse(affine_linear_part(a, ctx)), shift)


def affine_inverse_holds(a: FieldElement, ctx: FieldCtx) -> bool:
    forward = affine_linear_part(a, ctx).to_sparse() - 2
    return value_table(affine_inverse(a, ctx), ctx).same_as(brute_inverse(forward, ctx))


def half_trace_inverse(ctx: FieldCtx) -> LinearizedPoly:
    """(x - x^q + x^(q^2))/2, the inverse of x + x^q over F_{q^3}."""
    half = _half(ctx)
    return LinearizedPoly(ctx, [half, -half, half])


def g_inverse_matches(ctx: FieldCtx) -> bool:
    return linearized_inverse(LinearizedPoly(ctx, [1, 1])) == half_trace_inverse(ctx)


def _validated(params: CppParams, name: str, forward: SparsePoly, inverse: FieldMap):
    ctx = params.ctx
    expected = brute_inverse(forward, ctx)
    if not value_table(inverse, ctx).same_as(expected):
        x, got, want = first_mismatch(inverse, expected, ctx)
        logger.warning("%s inverse over %s fails at %r", name, ctx, x)
        raise VerificationException(
            {
                "reason": "closed-form inverse of {} disagrees with the oracle".format(
                    name
                ),
                "parameters": params.to_json(),
                "x": x.to_list(),
                "closed_form": got.to_list(),
                "oracle": want.to_list(),
            }
        )
    return inverse


def inverse_f_plus_x(params: CppParams) -> FieldMap:
    ctx = params.ctx
    inverse = Composition(PowerMap(ctx, params.w), half_trace_inverse(ctx).to_sparse())
    return _validated(params, "f+x", build_f_plus_x(params), inverse)


def inverse_f(params: CppParams) -> FieldMap:
    """
    (x^(q^2+q+1) (x^(q+1) - x^(2q) + x^(q^2+q))^(q^3-2))^w, with value 0 at 0.
    """
    ctx, q = params.ctx, params.q
    inner = SparsePoly(ctx, [(q + 1, 1), (2 * q, -1), (q * q + q, 1)])
    product = ProductMap(
        PowerMap(ctx, q * q + q + 1),
        Composition(PowerMap(ctx, q**3 - 2), inner),
    )
    inverse = Composition(PowerMap(ctx, params.w), product)
    return _validated(params, "f", build_f(params), inverse)


def h_polynomial(params: CppParams) -> SparsePoly:
    """x + x^q - x^(1+q-q^2); the exponent is reduced, so only x != 0 is meaningful."""
    q = params.q
    return SparsePoly(params.ctx, [(1, 1), (q, 1), (1 + q - q * q, -1)])


def h_factorization_holds(params: CppParams) -> bool:
    ctx = params.ctx
    f, h = build_f(params), h_polynomial(params)
    inner = PowerMap(ctx, params.e1)
    return all(f(x) == h(inner(x)) for x in ctx.nonzero_elements())


def exponent_identity(q_max: int = 101) -> bool:
    return all(
        (q**3 - q**2 + q) * (q**2 + 1) // 2 - (q**2 - q + 2) // 2 * (q**3 - 1) == 1
        for q in range(3, q_max + 1, 2)
    )


def certify(params: CppParams) -> PermutationCertificate:
    watch = Stopwatch()
    ctx = params.ctx
    f_table = permutation_check(build_f(params))
    fx_table = permutation_check(build_f_plus_x(params))
    cert = PermutationCertificate.for_field(
        ctx,
        family=CubicCppFamily.identifier,
        parameters=params.to_json(),
        criterion={"q_odd": True},
        derived={
            "f": build_f(params),
            "f_bijective": f_table.bijective,
            "f_plus_x_bijective": fx_table.bijective,
        },
        verdict=Verdict.PERMUTATION,
        oracle=Verdict.of(f_table.bijective and fx_table.bijective),
    )
    cert.identities["exponent_identity"] = exponent_identity()
    cert.identities["h_factorization"] = h_factorization_holds(params)
    cert.identities["g_inverse"] = g_inverse_matches(ctx)
    for name, a in (("one", ctx.one), ("generator", ctx.g)):
        root = affine_root_formula(a, ctx)
        cert.derived["affine_root_" + name] = root
        cert.identities["affine_inverse_" + name] = affine_inverse_holds(a, ctx)
    if cert.oracle is Verdict.PERMUTATION:
        try:
            inverse_f_plus_x(params)
            inverse_f(params)
        except VerificationException as e:
            cert.inverse_valid = False
            cert.inverse = {"error": e.certificate}
        else:
            cert.inverse_valid = True
            cert.inverse = {
                "f_plus_x": "(x - x^q + x^(q^2))/2 raised to {}".format(params.w),
                "f": "(x^(q^2+q+1) (x^(q+1) - x^(2q) + x^(q^2+q))^(q^3-2))^{}".format(
                    params.w
                ),
            }
    return watch.stop(cert)


class CubicCppFamily(PermutationFamily):
    identifier = "cpp"
    verbose_name = "-x + x^((q^2+1)/2) + x^((q^3+q)/2) over F_{q^3}"
    plus_x = False

    @classmethod
    def add_arguments(cls, parser):
        super().add_arguments(parser)
        parser.add_argument(
            "--plus-x",
            action="store_true",
            help="use f + x instead of f for invert and export",
        )

    @classmethod
    def from_args(cls, args) -> "CubicCppFamily":
        family = cls(CppParams(field_from_args(args, 3)))
        family.plus_x = args.plus_x
        return family

    def certify(self) -> PermutationCertificate:
        return certify(self.params)

    def forward(self):
        if self.plus_x:
            return build_f_plus_x(self.params)
        return build_f(self.params)

    def inverse_map(self):
        if self.plus_x:
            return inverse_f_plus_x(self.params)
        return inverse_f(self.params)
