import pytest
import random

from ppinv.certificate import Verdict
from ppinv.family import ParameterException
from ppinv.family_aml import (
    AmlParams,
    build_A,
    build_B,
    build_f,
    certify,
    criterion,
    enumerate_norm_one_b,
    image_power_dimension,
    inverse,
    necessity_witness,
    non_permutation_linearized,
    recovery_identities,
    s_value,
    sample_non_permutation_linearized,
    solve_exponents,
    sweep,
)
from ppinv.gf_core import norm_to_subfield
from ppinv.linearized import LinearizedPoly, det_rank, dickson
from ppinv.poly_eval import Composition, value_table, verify_identity


def trace_like(ctx):
    return LinearizedPoly(ctx, [1, 1])


def test_norm_one_b(f9, f27, f25):
    bs = enumerate_norm_one_b(f9)
    assert len(bs) == 4
    assert f9.one in bs
    assert f9.from_int(-1) in bs
    assert f9.g**2 in bs
    assert f9.g**6 in bs
    for ctx, count in ((f9, 4), (f27, 13), (f25, 6)):
        bs = enumerate_norm_one_b(ctx)
        assert len(set(bs)) == count
        assert all(norm_to_subfield(ctx, b) == ctx.one for b in bs)


def test_build_A(f9, f27):
    b = f9.from_int(-1)
    A = build_A(f9, b)
    assert A.coeffs == (b, f9.one)
    assert len({A(x) for x in f9.elements()}) == 3
    b = enumerate_norm_one_b(f27)[5]
    A = build_A(f27, b)
    assert A.coeffs == (b ** (1 + 9), b, f27.one)
    with pytest.raises(ParameterException):
        build_A(f9, f9.g)


def test_A_frobenius_twist_exhaustive(f9, f27, f25):
    for ctx in (f9, f27, f25):
        for b in enumerate_norm_one_b(ctx):
            A = build_A(ctx, b)
            bq = b.frobenius(1)
            assert all(A(x).frobenius(1) == bq * A(x) for x in ctx.elements())


def test_image_power_dimension(f9):
    A = build_A(f9, f9.from_int(-1))
    assert image_power_dimension(A, 1)
    assert not image_power_dimension(A, 2)
    assert image_power_dimension(A, 5)


def test_build_B(f9):
    L = trace_like(f9)
    B = build_B(build_A(f9, f9.from_int(-1)), L)
    assert B == [[f9.from_int(-1), f9.one], [f9.one, f9.one]]
    assert det_rank(B)[0] == f9.one
    B = build_B(build_A(f9, f9.one), L)
    assert B == [[f9.one, f9.one], [f9.one, f9.one]]
    assert det_rank(B)[0].is_zero


def test_build_B_layout_n3(f27):
    b = enumerate_norm_one_b(f27)[3]
    A = build_A(f27, b)
    for L in sample_non_permutation_linearized(f27, 5, seed=2):
        B = build_B(A, L)
        D = dickson(L)
        assert len(B) == 3
        assert all(len(row) == 3 for row in B)
        assert [row[0] for row in B] == list(A.coeffs)
        assert [row[1] for row in B] == list(D.rows()[0])
        assert [row[2] for row in B] == list(D.rows()[1])


def test_solve_exponents():
    assert solve_exponents(1, 3, 2) == (1, 0)
    assert solve_exponents(5, 3, 2) == (1, 2)
    assert solve_exponents(3, 5, 2) == (3, 2)
    for m, q, n in ((5, 3, 2), (3, 5, 2), (5, 3, 3), (7, 4, 2)):
        u, v = solve_exponents(m, q, n)
        assert (m * u - 1 - v * (q - 1)) % (q**n - 1) == 0
    with pytest.raises(ParameterException):
        solve_exponents(2, 3, 2)


def test_params_validation(f9):
    with pytest.raises(ParameterException):
        AmlParams(f9, f9.one, 1, LinearizedPoly(f9, [1, 0]))
    with pytest.raises(ParameterException):
        AmlParams(f9, f9.g, 1, trace_like(f9))
    with pytest.raises(ParameterException):
        AmlParams(f9, f9.one, 0, trace_like(f9))


def test_alpha_and_s(f9):
    params = AmlParams(f9, f9.from_int(-1), 1, trace_like(f9))
    assert params.rank == 1
    assert params.alpha == [f9.one, f9.from_int(-1)]
    assert params.s == f9.from_int(2)
    params = AmlParams(f9, f9.one, 1, trace_like(f9))
    assert params.s.is_zero


@pytest.mark.parametrize(
    "b,m,verdict",
    [
        (-1, 1, Verdict.PERMUTATION),
        (1, 1, Verdict.NOT_PERMUTATION),
        (-1, 2, Verdict.NOT_PERMUTATION),
    ],
)
def test_criterion_examples(f9, b, m, verdict):
    cert = criterion(AmlParams(f9, f9.from_int(b), m, trace_like(f9)))
    assert cert.verdict == verdict
    assert cert.oracle == verdict


def test_criterion_sub_verdicts(f9):
    cert = criterion(AmlParams(f9, f9.one, 1, trace_like(f9)))
    assert cert.criterion == {
        "gcd_m_q_minus_1": True,
        "rank_D_n_minus_1": True,
        "s_nonzero": False,
        "det_B_nonzero": False,
    }
    cert = criterion(AmlParams(f9, f9.one, 1, LinearizedPoly(f9, [0, 0])))
    assert cert.criterion["rank_D_n_minus_1"] is False
    assert cert.derived["alpha"] is None
    assert cert.verdict == cert.oracle == Verdict.NOT_PERMUTATION


def test_inverse_of_two_x_cubed(f9):
    params = AmlParams(f9, f9.from_int(-1), 1, trace_like(f9))
    f = build_f(params)
    assert all(f(x) == 2 * x**3 for x in f9.elements())
    inv = inverse(params)
    assert all(inv(x) == 2 * x**3 for x in f9.elements())
    assert inv(f9.zero) == f9.zero
    assert recovery_identities(params) == {"recover_A": True, "recover_x": True}


def test_inverse_refused(f9):
    with pytest.raises(ParameterException):
        inverse(AmlParams(f9, f9.one, 1, trace_like(f9)))


def test_necessity_witness(f9):
    params = AmlParams(f9, f9.one, 1, trace_like(f9))
    K = necessity_witness(params)
    assert K == LinearizedPoly(f9, [1])
    assert verify_identity(Composition(K, params.L), params.A, f9)
    params = AmlParams(f9, f9.from_int(-1), 1, trace_like(f9))
    assert necessity_witness(params) is None


def test_certify(f9):
    cert = certify(AmlParams(f9, f9.from_int(-1), 1, trace_like(f9)))
    assert cert.consistent
    assert cert.inverse_valid is True
    assert cert.derived["u"] == 1
    assert cert.derived["v"] == 0
    assert all(cert.identities.values())
    d = cert.to_dict()
    assert d["derived"]["s"] == [2, 0]
    assert d["derived"]["B"] == [[[2, 0], [1, 0]], [[1, 0], [1, 0]]]

    cert = certify(AmlParams(f9, f9.one, 1, trace_like(f9)))
    assert cert.identities["witness_factors_A"] is True
    cert.check()


def test_non_permutation_linearized(f9):
    singular = non_permutation_linearized(f9)
    assert len(singular) == 33
    for L in singular:
        a0, a1 = L.coeffs
        assert a0 ** 4 == a1 ** 4


def test_sampling_is_deterministic(f27):
    first = sample_non_permutation_linearized(f27, 10, seed=7)
    second = sample_non_permutation_linearized(f27, 10, seed=7)
    assert first == second
    assert not any(L.is_permutation() for L in first)


def test_alpha_scaling_invariance(f9):
    rng = random.Random(1)
    for L in non_permutation_linearized(f9):
        params = AmlParams(f9, f9.from_int(-1), 1, L)
        if params.alpha is None:
            continue
        for _ in range(3):
            c = f9.random_element(rng, nonzero=True)
            scaled = s_value(f9, [c * a for a in params.alpha], params.b, 1)
            assert scaled.is_zero == params.s.is_zero


def test_sweep_f9_m1(f9):
    result = sweep(f9, m_max=1)
    assert result["summary"]["instances"] == 4 * 33
    assert result["failures"] == 0
    assert result["summary"]["permutations"] > 0


@pytest.mark.slow
def test_sweep_f9_exhaustive(f9):
    result = sweep(f9, m_max=6)
    assert result["summary"]["instances"] == 4 * 6 * 33
    assert result["failures"] == 0
    assert sum(result["joint_s_det_B"].values()) > 0


def test_sweep_f27_sampled(f27):
    result = sweep(f27, m_max=6, samples=40, seed=0)
    assert result["summary"]["instances"] == 40
    assert result["failures"] == 0
    again = sweep(f27, m_max=6, samples=40, seed=0)
    assert again["instances"] == result["instances"]


@pytest.mark.slow
def test_sweep_f27_acceptance(f27):
    result = sweep(f27, m_max=6, samples=500, seed=0)
    assert result["failures"] == 0
    assert result["summary"]["permutations"] > 0


def test_inverse_over_f27_found_by_sweep(f27):
    for L in sample_non_permutation_linearized(f27, 200, seed=3):
        for b in enumerate_norm_one_b(f27)[:4]:
            params = AmlParams(f27, b, 1, L)
            if criterion(params).verdict is Verdict.PERMUTATION:
                inv = inverse(params)
                assert value_table(Composition(inv, build_f(params)), f27).is_identity()
                return
    pytest.fail("no permutation instance among the samples")
