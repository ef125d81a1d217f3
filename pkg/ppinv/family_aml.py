from typing import Dict, List, Optional, Tuple

import logging
import random
from dataclasses import dataclass
from functools import cached_property
from math import gcd

from .certificate import PermutationCertificate, Verdict, VerificationException
from .family import (
    ParameterException,
    PermutationFamily,
    Stopwatch,
    field_from_args,
    run_tasks,
)
from .gf_core import FieldCtx, FieldElement, make_field, norm_to_subfield, pow_big
from .linearized import (
    DicksonMatrix,
    LinearizedPoly,
    Matrix,
    SingularMatrixException,
    all_linearized,
    det_rank,
    dickson,
    kernel_dimension,
    nullspace_vec,
    random_linearized,
    rows_independent,
    solve_in_span,
    solve_unique,
)
from .poly_eval import (
    Composition,
    FieldMap,
    PowerMap,
    SparsePoly,
    SumMap,
    brute_inverse,
    first_mismatch,
    identity,
    permutation_check,
    value_table,
    verify_identity,
)

logger = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 4096


def enumerate_norm_one_b(ctx: FieldCtx) -> List[FieldElement]:
    """b = g^((q-1)t) for t < (q^n - 1)/(q - 1): every element of norm 1."""
    count = ctx.order_minus_one // (ctx.q - 1)
    return [pow_big(ctx, ctx.g, (ctx.q - 1) * t) for t in range(count)]


def a_coefficients(ctx: FieldCtx, b: FieldElement) -> List[FieldElement]:
    """
    Coefficients c_0..c_{n-1} of A = sum c_i x^(q^i): c_{n-1} = 1 and
    c_{n-j-2} = b^(1 + q^(n-1) + ... + q^(n-j)).
    """
    n, q = ctx.n, ctx.q
    coeffs = [ctx.zero] * n
    coeffs[n - 1] = ctx.one
    for j in range(n - 1):
        exponent = 1 + sum(q ** (n - i) for i in range(1, j + 1))
        coeffs[n - j - 2] = pow_big(ctx, b, exponent)
    return coeffs


def build_A(ctx: FieldCtx, b: FieldElement) -> LinearizedPoly:
    if norm_to_subfield(ctx, b) != ctx.one:
        raise ParameterException("b = {!r} does not have norm 1".format(b))
    A = LinearizedPoly(ctx, a_coefficients(ctx, b))
    bq = b.frobenius(1)
    if not verify_identity(lambda x: A(x).frobenius(1), lambda x: bq * A(x), ctx):
        raise VerificationException(
            {"reason": "A(x)^q != b^q A(x)", "b": b.to_list(), "A": A.to_json()}
        )
    return A


def image_power_dimension(A: LinearizedPoly, m: int) -> bool:
    """True iff the image of A^m is a one-dimensional F_q-space."""
    ctx = A.ctx
    image = {pow_big(ctx, A(x), m) if A(x) else ctx.zero for x in ctx.elements()}
    nonzero = sorted((y for y in image if y), key=lambda y: y.index)
    if not nonzero:
        return False
    span = {c * nonzero[0] for c in ctx.subfield_elements()}
    return image == span


def build_B(A: LinearizedPoly, L: LinearizedPoly) -> Matrix:
    """Column 0 holds A's coefficients, column j the (j-1)-th row of D_L."""
    D = dickson(L)
    n = A.ctx.n
    return [[A.coeffs[r]] + [D[j - 1, r] for j in range(1, n)] for r in range(n)]


def b_columns_match_dickson(B: Matrix, D: DicksonMatrix) -> bool:
    n = D.n
    return all(B[r][j] == D[j - 1, r] for r in range(n) for j in range(1, n))


def solve_exponents(m: int, q: int, n: int) -> Tuple[int, int]:
    """(u, v) with m u = 1 + v (q - 1) mod q^n - 1, u the least positive choice."""
    if gcd(m, q - 1) != 1:
        raise ParameterException("gcd({}, {}) != 1".format(m, q - 1))
    u = 1 if q == 2 else pow(m, -1, q - 1)
    v = ((m * u - 1) // (q - 1)) % ((q**n - 1) // (q - 1))
    return u, v


def s_value(
    ctx: FieldCtx, alpha: List[FieldElement], b: FieldElement, m: int
) -> FieldElement:
    """alpha_1 + alpha_2 b^(qm) + ... + alpha_n b^(m(q + ... + q^(n-1)))"""
    total = ctx.zero
    for i, a in enumerate(alpha):
        exponent = m * sum(ctx.q**j for j in range(1, i + 1))
        total = total + a * pow_big(ctx, b, exponent)
    return total


@dataclass(frozen=True)
class AmlParams:
    """f = A(x)^m + L(x) over F_{q^n}, b of norm 1 and L not a permutation."""

    ctx: FieldCtx
    b: FieldElement
    m: int
    L: LinearizedPoly

    def __post_init__(self):
        if self.ctx.n < 2:
            raise ParameterException("the A^m + L family needs n >= 2")
        if self.m < 1:
            raise ParameterException("m must be positive, got {}".format(self.m))
        if norm_to_subfield(self.ctx, self.b) != self.ctx.one:
            raise ParameterException("b = {!r} does not have norm 1".format(self.b))
        if self.L.ctx != self.ctx:
            raise ParameterException("L lives over another field")
        if not self.det_D.is_zero:
            raise ParameterException(
                "L = {} is a permutation polynomial".format(self.L.describe())
            )

    @cached_property
    def A(self) -> LinearizedPoly:
        return build_A(self.ctx, self.b)

    @cached_property
    def D(self) -> DicksonMatrix:
        return dickson(self.L)

    @cached_property
    def _det_rank(self):
        return det_rank(self.D)

    @property
    def det_D(self) -> FieldElement:
        return self._det_rank[0]

    @property
    def rank(self) -> int:
        return self._det_rank[1]

    @property
    def gcd_ok(self) -> bool:
        return gcd(self.m, self.ctx.q - 1) == 1

    @property
    def rank_ok(self) -> bool:
        return self.rank == self.ctx.n - 1

    @cached_property
    def alpha(self) -> Optional[List[FieldElement]]:
        if not self.rank_ok:
            return None
        return nullspace_vec(self.D.transpose())

    @cached_property
    def s(self) -> Optional[FieldElement]:
        if self.alpha is None:
            return None
        return s_value(self.ctx, self.alpha, self.b, self.m)

    @cached_property
    def B(self) -> Matrix:
        return build_B(self.A, self.L)

    @cached_property
    def det_B(self) -> FieldElement:
        return det_rank(self.B)[0]

    @cached_property
    def beta(self) -> Optional[List[FieldElement]]:
        if self.det_B.is_zero:
            return None
        e1 = [self.ctx.one] + [self.ctx.zero] * (self.ctx.n - 1)
        return solve_unique(self.B, e1)

    @cached_property
    def exponents(self) -> Optional[Tuple[int, int]]:
        if not self.gcd_ok:
            return None
        return solve_exponents(self.m, self.ctx.q, self.ctx.n)

    @property
    def psi1(self) -> LinearizedPoly:
        return LinearizedPoly(self.ctx, self.alpha)

    def to_json(self):
        return {"b": list(self.b.coeffs), "m": self.m, "L": self.L.to_json()}


def build_f(params: AmlParams) -> FieldMap:
    return SumMap(Composition(PowerMap(params.ctx, params.m), params.A), params.L)


def criterion(params: AmlParams) -> PermutationCertificate:
    ctx = params.ctx
    s_nonzero = params.s is not None and not params.s.is_zero
    det_b_nonzero = not params.det_B.is_zero
    conditions = {
        "gcd_m_q_minus_1": params.gcd_ok,
        "rank_D_n_minus_1": params.rank_ok,
        "s_nonzero": s_nonzero,
        "det_B_nonzero": det_b_nonzero,
    }
    table = permutation_check(build_f(params), ctx)
    return PermutationCertificate.for_field(
        ctx,
        family=AmlFamily.identifier,
        parameters=params.to_json(),
        criterion=conditions,
        derived={
            "A": params.A,
            "D": params.D,
            "rank_D": params.rank,
            "alpha": params.alpha,
            "s": params.s,
            "B": params.B,
            "det_B": params.det_B,
        },
        verdict=Verdict.of(all(conditions.values())),
        oracle=Verdict.of(table.bijective),
    )


def _inverse_parts(params: AmlParams):
    ctx = params.ctx
    u, v = params.exponents
    q, m, b, s = ctx.q, params.m, params.b, params.s
    psi1 = params.psi1
    scale_a = pow_big(ctx, b, -q * v) * pow_big(ctx, s, -u)
    scale_l = pow_big(ctx, b, -q * v * m) * pow_big(ctx, s, -u * m)
    recover_a = Composition(
        SparsePoly.monomial(ctx, 1, scale_a), Composition(PowerMap(ctx, u), psi1)
    )
    recover_l = SumMap(
        identity,
        Composition(
            SparsePoly.monomial(ctx, 1, -scale_l),
            Composition(PowerMap(ctx, u * m), psi1),
        ),
    )
    tail = LinearizedPoly(ctx, params.beta[1:])
    return recover_a, recover_l, tail


def inverse(params: AmlParams) -> FieldMap:
    """
    beta_1 b^(-qv) s^(-u) psi_1^u + (beta_2 x + ... + beta_n x^(q^(n-2))) o
    (x - b^(-qvm) s^(-um) psi_1^(um)), validated against the oracle.
    """
    ctx = params.ctx
    if not (params.gcd_ok and params.rank_ok and params.s and params.beta):
        raise ParameterException("criterion does not hold, f has no inverse")
    recover_a, recover_l, tail = _inverse_parts(params)
    beta_1 = SparsePoly.monomial(ctx, 1, params.beta[0])
    inv = SumMap(Composition(beta_1, recover_a), Composition(tail, recover_l))
    expected = brute_inverse(build_f(params), ctx)
    if not value_table(inv, ctx).same_as(expected):
        x, got, want = first_mismatch(inv, expected, ctx)
        logger.warning("aml inverse over %s fails at %r", ctx, x)
        raise VerificationException(
            dict(
                criterion(params).to_dict(),
                reason="closed-form inverse disagrees with the oracle",
                beta=[c.to_list() for c in params.beta],
                u=params.exponents[0],
                v=params.exponents[1],
                x=x.to_list(),
                closed_form=got.to_list(),
                oracle_value=want.to_list(),
            )
        )
    return inv


def recovery_identities(params: AmlParams) -> Dict[str, bool]:
    """
    b^(-qv) (s^-1 psi_1(f(x)))^u = A(x) and beta_1 A(x) + (beta_2 x + ...) o L(x) = x.
    """
    ctx = params.ctx
    recover_a, _, tail = _inverse_parts(params)
    f = build_f(params)
    beta_1 = params.beta[0]
    return {
        "recover_A": verify_identity(Composition(recover_a, f), params.A, ctx),
        "recover_x": verify_identity(
            lambda x: beta_1 * params.A(x) + tail(params.L(x)), identity, ctx
        ),
    }


def necessity_witness(params: AmlParams) -> Optional[LinearizedPoly]:
    """
    With det B = 0 and rank D = n - 1, the k_j expressing column 0 of B through
    the other columns give K = k_2 x + ... + k_n x^(q^(n-2)) with A = K o L.
    """
    if not params.det_B.is_zero or not params.rank_ok:
        return None
    n = params.ctx.n
    columns = [[row[j] for row in params.B] for j in range(1, n)]
    target = [row[0] for row in params.B]
    try:
        k = solve_in_span(columns, target)
    except SingularMatrixException:
        raise VerificationException(
            dict(
                criterion(params).to_dict(),
                reason="column 0 of B is outside the span of the Dickson rows",
            )
        )
    return LinearizedPoly(params.ctx, k)


def certify(params: AmlParams) -> PermutationCertificate:
    watch = Stopwatch()
    ctx = params.ctx
    A, L = params.A, params.L
    f = build_f(params)
    cert = criterion(params)
    if params.exponents:
        cert.derived.update(u=params.exponents[0], v=params.exponents[1])
    cert.derived["kernel_dimension"] = kernel_dimension(L)
    cert.derived["image_A_m_one_dimensional"] = image_power_dimension(A, params.m)
    cert.identities.update(
        {
            "f_minus_A_m_is_L": verify_identity(
                lambda x: f(x) - pow_big(ctx, A(x), params.m), L, ctx
            ),
            "rank_plus_kernel": params.rank + cert.derived["kernel_dimension"]
            == ctx.n,
            "image_dimension_gcd": cert.derived["image_A_m_one_dimensional"]
            == params.gcd_ok,
            "B_columns": b_columns_match_dickson(params.B, params.D),
        }
    )
    if params.rank_ok:
        s = params.s
        cert.identities["psi1_of_f"] = verify_identity(
            Composition(params.psi1, f),
            lambda x: s * pow_big(ctx, A(x), params.m),
            ctx,
        )
        cert.identities["dickson_rows_independent"] = rows_independent(params.D)
    if params.gcd_ok and params.rank_ok and params.det_B.is_zero:
        witness = necessity_witness(params)
        cert.derived["witness"] = witness
        cert.identities["witness_factors_A"] = verify_identity(
            Composition(witness, L), A, ctx
        )
    if params.beta is not None:
        cert.derived["beta"] = params.beta
    if cert.verdict is Verdict.PERMUTATION:
        cert.identities.update(recovery_identities(params))
        try:
            inverse(params)
        except VerificationException as e:
            cert.inverse_valid = False
            cert.inverse = {"error": e.certificate}
        else:
            cert.inverse_valid = True
            cert.inverse = {
                "beta": params.beta,
                "psi1": params.psi1,
                "u": params.exponents[0],
                "v": params.exponents[1],
            }
    return watch.stop(cert)


def non_permutation_linearized(ctx: FieldCtx) -> List[LinearizedPoly]:
    return [L for L in all_linearized(ctx) if not L.is_permutation()]


def sample_non_permutation_linearized(
    ctx: FieldCtx, count: int, seed: int = 0
) -> List[LinearizedPoly]:
    rng = random.Random(seed)
    found = []
    while len(found) < count:
        L = random_linearized(ctx, rng)
        if not L.is_permutation():
            found.append(L)
    return found


def _coeff_indices(L: LinearizedPoly) -> Tuple[int, ...]:
    return tuple(c.index for c in L.coeffs)


def sweep_tasks(
    ctx: FieldCtx, m_max: int = 6, samples: int = 1000, seed: int = 0, exhaustive=None
):
    if exhaustive is None:
        exhaustive = ctx.size**ctx.n <= EXHAUSTIVE_LIMIT
    bs = enumerate_norm_one_b(ctx)
    head = (ctx.p, ctx.e, ctx.n)
    if exhaustive:
        Ls = non_permutation_linearized(ctx)
        for b in bs:
            for m in range(1, m_max + 1):
                for L in Ls:
                    yield head + (b.index, m, _coeff_indices(L))
        return
    rng = random.Random(seed)
    for L in sample_non_permutation_linearized(ctx, samples, seed):
        b = rng.choice(bs)
        m = rng.randint(1, m_max)
        yield head + (b.index, m, _coeff_indices(L))


def _sweep_task(task) -> Dict:
    p, e, n, b, m, coeffs = task
    ctx = make_field(p, e, n)
    L = LinearizedPoly(ctx, [ctx.from_index(c) for c in coeffs])
    return certify(AmlParams(ctx, ctx.from_index(b), m, L)).to_dict()


def sweep(
    ctx: FieldCtx,
    m_max: int = 6,
    samples: int = 1000,
    seed: int = 0,
    exhaustive=None,
    jobs=None,
) -> Dict:
    tasks = list(sweep_tasks(ctx, m_max, samples, seed, exhaustive))
    logger.info("aml sweep over %s: %d instances", ctx, len(tasks))
    certificates = run_tasks(_sweep_task, tasks, jobs)
    summary = {
        "instances": 0,
        "permutations": 0,
        "mismatches": 0,
        "inverse_failures": 0,
        "identity_failures": 0,
    }
    joint: Dict[str, int] = {}
    rows = []
    for cert in certificates:
        criterion_ = cert["criterion"]
        summary["instances"] += 1
        summary["permutations"] += cert["oracle"] == Verdict.PERMUTATION.value
        summary["mismatches"] += cert["verdict"] != cert["oracle"]
        summary["inverse_failures"] += cert["inverse_valid"] is False
        summary["identity_failures"] += not all(cert["identities"].values())
        if criterion_["rank_D_n_minus_1"]:
            key = "s_nonzero={},det_B_nonzero={}".format(
                criterion_["s_nonzero"], criterion_["det_B_nonzero"]
            )
            joint[key] = joint.get(key, 0) + 1
        rows.append(
            dict(
                cert["parameters"],
                criterion=criterion_,
                verdict=cert["verdict"],
                oracle=cert["oracle"],
                inverse_valid=cert["inverse_valid"],
            )
        )
    failures = sum(
        summary[key] for key in ("mismatches", "inverse_failures", "identity_failures")
    )
    logger.info("aml sweep over %s done, %d failures", ctx, failures)
    return {
        "family": AmlFamily.identifier,
        "field": ctx.spec,
        "modulus": list(ctx.modulus),
        "m_max": m_max,
        "summary": summary,
        "joint_s_det_B": dict(sorted(joint.items())),
        "failures": failures,
        "instances": rows,
    }


class AmlFamily(PermutationFamily):
    identifier = "aml"
    verbose_name = "A(x)^m + L(x) over F_{q^n}"
    sweepable = True

    @classmethod
    def add_arguments(cls, parser):
        super().add_arguments(parser)
        parser.add_argument("--n", type=int, default=2, help="ignored with --field")
        parser.add_argument("--b", default="1", help="coefficient list of b")
        parser.add_argument("--m", type=int, default=1)
        parser.add_argument(
            "--L",
            nargs="+",
            required=True,
            metavar="COEFFS",
            help="coefficient lists of a_0 .. a_{n-1}",
        )

    @classmethod
    def add_sweep_arguments(cls, parser):
        cls.add_field_arguments(parser)
        parser.add_argument("--n", type=int, default=2, help="ignored with --field")
        parser.add_argument("--m-max", type=int, default=6)
        parser.add_argument("--samples", type=int)
        parser.add_argument("--seed", type=int)
        parser.add_argument("--exhaustive", action="store_true", default=None)

    @classmethod
    def from_args(cls, args) -> "AmlFamily":
        ctx = field_from_args(args)
        L = LinearizedPoly(ctx, [ctx.parse_element(c) for c in args.L])
        return cls(AmlParams(ctx, ctx.parse_element(args.b), args.m, L))

    def certify(self) -> PermutationCertificate:
        return certify(self.params)

    def forward(self):
        return build_f(self.params)

    def inverse_map(self):
        return inverse(self.params)

    @classmethod
    def sweep(cls, args, jobs=None) -> Dict:
        from .settings import settings

        return sweep(
            field_from_args(args),
            args.m_max,
            args.samples if args.samples is not None else settings.samples,
            args.seed if args.seed is not None else settings.seed,
            args.exhaustive,
            jobs,
        )
