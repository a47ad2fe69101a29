import warnings

import numpy as np
import pytest

from twistops.angles import GOLDEN, SQRT2_MINUS_1, Angle, parse_angle
from twistops.classify import (
    DirectSum,
    Single,
    classify_pair,
    classify_U_twisted,
    eigen_invariants,
    isomorphic,
    result_to_json,
)
from twistops.errors import ProximityWarning, RelationError, UnsupportedParameterError, ValidationError
from twistops.gallery import D_pair, F_pair, build, toeplitz_pair, torus_pair
from twistops.structured import ShiftBlock, StructuredOp

TH = SQRT2_MINUS_1


def test_toeplitz_is_type_I():
    assert classify_pair(toeplitz_pair(TH), TH) == Single("I", TH)


def test_D3_with_listed_lambdas():
    r = classify_pair(D_pair(3, TH, (1, 1j, -1)), TH)
    assert r == Single("II", TH, {"n": 3})


def test_F21_is_type_III():
    assert classify_pair(F_pair(2, 1, TH), TH) == Single("III", TH, {"m": 2, "n": 1})


def test_torus_is_type_IV():
    assert classify_pair(torus_pair(GOLDEN), GOLDEN) == Single("IV", GOLDEN)


@pytest.mark.parametrize("theta", ["1/3", "0", "0.25"])
def test_rational_theta_unsupported(theta):
    with pytest.raises(UnsupportedParameterError):
        classify_pair(D_pair(2, parse_angle(theta)), parse_angle(theta))


def test_float_theta_must_be_declared():
    with pytest.raises(ValidationError):
        classify_pair(D_pair(1, TH), 0.414)
    r = classify_pair(D_pair(1, Angle.irrational(0.3)), Angle.irrational(0.3))
    assert r.type == "II"


def test_wrong_twist_refused():
    with pytest.raises(RelationError):
        classify_pair(D_pair(2, TH), GOLDEN)


def test_infinite_wandering_data_unsupported():
    T1 = StructuredOp((ShiftBlock(("N", "N"), (1, 0)),))
    T2 = StructuredOp((ShiftBlock(("N", "N"), (0, 0), (-TH, Angle())),))
    with pytest.raises(UnsupportedParameterError):
        classify_pair((T1, T2), TH)


@pytest.mark.parametrize(
    "M, count",
    [(np.diag([1, 1j, -1]), 3), (np.diag([np.exp(0.2j)] * 2), 1), (np.eye(4), 1), (np.zeros((0, 0)), 0)],
)
def test_eigen_invariants(M, count):
    assert eigen_invariants(M)[0] == count


def test_eigen_invariants_proximity_warning():
    M = np.diag(np.exp(2j * np.pi * np.array([0.3, 0.3 + 1e-12])))
    with pytest.warns(ProximityWarning):
        assert eigen_invariants(M)[0] == 1


def test_eigen_invariants_exact_duplicates_no_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert eigen_invariants(np.eye(3))[0] == 1


def test_eigen_invariants_rejects_nonunitary():
    with pytest.raises(ValidationError):
        eigen_invariants(np.diag([1.0, 2.0]))


# ---------------------------------------------------------------------------
# invariance


def _scale(op, z):
    return op.scale(z)


@pytest.mark.parametrize("spec", ["D:3", "F:1:2", "toeplitz", "torus"])
def test_conjugation_invariance(spec):
    fx = build(spec)
    T1, T2 = fx.pair
    base = classify_pair(fx.pair, fx.theta)
    perm = StructuredOp(T1.blocks[::-1]), StructuredOp(T2.blocks[::-1])
    assert classify_pair(perm, fx.theta) == base
    rot = _scale(T1, np.exp(0.7j)), _scale(T2, np.exp(-1.3j))
    assert classify_pair(rot, fx.theta) == base


@pytest.mark.parametrize("spec", ["D:2", "F:2:1", "toeplitz", "torus"])
def test_plus_minus_symmetry(spec):
    fx = build(spec)
    r = classify_pair(fx.pair, fx.theta)
    swapped = classify_pair(fx.pair[::-1], -fx.theta)
    assert isomorphic(r, swapped)[0]


# ---------------------------------------------------------------------------
# U-twisted


def test_one_point_spectrum_equals_classify_pair():
    fx = build("D:2")
    assert classify_U_twisted(fx.pair, TH, [TH]) == classify_pair(fx.pair, TH)


def test_two_point_spectrum():
    fx = build("U:D:1:sqrt2m1;toeplitz:golden")
    r, info = classify_U_twisted(fx.pair, fx.twist, [TH, GOLDEN], return_details=True)
    assert r == DirectSum(((TH, Single("II", TH, {"n": 1})), (GOLDEN, Single("I", GOLDEN))))
    assert info["reconstruction_residual"] <= 1e-10
    assert r == fx.expected


def test_repeated_summands_deduplicated():
    fx = build("U:D:2;D:2;torus:golden")
    r = classify_U_twisted(fx.pair, fx.twist, [TH, GOLDEN])
    assert len(r.components) == 2


def test_missing_theta_for_spectral_point():
    fx = build("U:D:1:sqrt2m1;toeplitz:golden")
    with pytest.raises(ValidationError):
        classify_U_twisted(fx.pair, fx.twist, [TH])


def test_U_must_commute():
    fx = build("U:D:1:sqrt2m1;toeplitz:golden")
    T1, T2 = fx.pair
    bad = StructuredOp(tuple(ShiftBlock(b.kinds, b.v, b.w, b.lam) if b.ndim == 1 else b for b in T1.blocks))
    bad_U = StructuredOp(tuple(ShiftBlock(b.kinds, (1,) + (0,) * (b.ndim - 1)) for b in fx.twist.blocks))
    with pytest.raises((RelationError, ValidationError)):
        classify_U_twisted((bad, T2), bad_U, [TH, GOLDEN])


# ---------------------------------------------------------------------------
# isomorphism


def II(n, th):
    return Single("II", th, {"n": n})


@pytest.mark.parametrize("n", [1, 2, 5])
def test_D_plus_minus(n):
    ok, trace = isomorphic(II(n, TH), II(n, 1 - TH))
    assert ok and any("exact" in t for t in trace)


@pytest.mark.parametrize("other", [GOLDEN, TH * 2, TH + Angle.rational(1, 2), Angle.sqrt(3)])
def test_D_different_angle(other):
    assert isomorphic(II(2, TH), II(2, other))[0] is False


def test_D_different_n():
    ok, trace = isomorphic(II(2, TH), II(3, TH))
    assert not ok and "K-groups differ" in trace[0]


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("m, k", [(1, 1), (2, 1), (1, 3)])
def test_II_never_III(n, m, k):
    assert isomorphic(II(n, TH), Single("III", TH, {"m": m, "n": k}))[0] is False


def test_I_vs_IV():
    assert isomorphic(Single("I", TH), Single("IV", TH))[0] is False


def test_III_cross_params_K_rule():
    ok, trace = isomorphic(Single("III", TH, {"m": 1, "n": 2}), Single("III", TH, {"m": 2, "n": 1}))
    assert ok and any(t.startswith("K-rule") for t in trace)


def test_direct_sum_matching_accepts_either_sign():
    a = DirectSum(((TH, II(2, TH)), (GOLDEN, Single("I", GOLDEN))))
    b = DirectSum(((1 - GOLDEN, Single("I", -GOLDEN)), (TH, II(2, -TH))))
    assert isomorphic(a, b)[0]
    c = DirectSum(((TH, II(3, TH)), (GOLDEN, Single("I", GOLDEN))))
    assert not isomorphic(a, c)[0]


def test_single_promoted_to_sum():
    a = DirectSum(((TH, II(2, TH)),))
    ok, trace = isomorphic(II(2, TH), a)
    assert ok and "promoted" in trace[0]
    b = DirectSum(((TH, II(2, TH)), (GOLDEN, Single("I", GOLDEN))))
    assert not isomorphic(II(2, TH), b)[0]


def test_isomorphic_requires_irrational():
    with pytest.raises(UnsupportedParameterError):
        isomorphic(Single("I", Angle.rational(1, 3)), Single("I", TH))


def test_result_json():
    js = result_to_json(Single("II", TH, {"n": 3}))
    assert js["kind"] == "single" and js["type"] == "II" and js["params"] == {"n": 3}
    assert js["theta"]["irrational"] is True
    assert js["k_groups"] == {"k0": {"rank": 4, "torsion": []}, "k1": {"rank": 1, "torsion": []}}
    rational = result_to_json(Single("I", Angle.rational(1, 3)))
    assert rational["theta"] == {"rational": [1, 3]}


def test_result_invariants_enforced():
    with pytest.raises(ValidationError):
        Single("II", TH, {"n": 0})
    with pytest.raises(ValidationError):
        Single("III", TH, {"m": 1})
    with pytest.raises(ValidationError):
        Single("V", TH)
