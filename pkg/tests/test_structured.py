import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twistops.angles import SQRT2_MINUS_1, Angle
from twistops.errors import RelationError, ValidationError
from twistops.gallery import D_pair, F_pair, build, default_lambdas, toeplitz_pair, torus_pair
from twistops.labelsets import BoxSet
from twistops.structured import (
    FiniteBlock,
    ShiftBlock,
    StructuredOp,
    adjoint_kernel,
    restrict,
    to_window,
    verify_twisted,
    wandering_spaces,
    window_interior,
    wold_decompose,
)

TH = SQRT2_MINUS_1
A1, A2, A12 = frozenset({1}), frozenset({2}), frozenset({1, 2})


def op(*blocks):
    return StructuredOp(tuple(blocks))


def shift(kinds, v, w=None, lam=1.0, phase=Angle()):
    return ShiftBlock(tuple(kinds), tuple(v), w, lam, phase)


# ---------------------------------------------------------------------------
# adjoint kernels


def test_kernel_of_unilateral_shift():
    K = adjoint_kernel(op(shift("N", (1,))))
    assert K.parts[0].equals(BoxSet.box((0, 0)))
    assert K.dim == 1


def test_kernel_of_phase_diagonal():
    assert adjoint_kernel(op(shift("N", (0,), (TH,)))).is_zero()


def test_kernel_of_shift_tensor_identity():
    K = adjoint_kernel(op(shift("NN", (1, 0))))
    assert K.parts[0].equals(BoxSet.box((0, 0), (0, math.inf)))
    assert K.dim == math.inf


def test_kernel_rejects_non_isometry():
    with pytest.raises(ValidationError):
        adjoint_kernel(op(shift("N", (1,), lam=2.0)))
    with pytest.raises(ValidationError):
        adjoint_kernel(op(FiniteBlock(np.array([[1, 1], [0, 1]]))))


def test_kernel_of_finite_block_is_zero():
    Q, _ = np.linalg.qr(np.random.default_rng(0).normal(size=(4, 4)) + 0j)
    assert adjoint_kernel(op(FiniteBlock(Q))).is_zero()


# ---------------------------------------------------------------------------
# wandering spaces


def dims(ops):
    W = wandering_spaces(ops)
    return W[A12].dim, W[A1].dim, W[A2].dim


def test_wandering_toeplitz():
    W = wandering_spaces(toeplitz_pair(TH))
    assert W[A12].dim == 1 and W[A12].parts[0].equals(BoxSet.box((0, 0), (0, 0)))
    assert W[A1].dim == math.inf and W[A2].dim == math.inf
    assert W[frozenset()].dim == math.inf


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_wandering_D(n):
    assert dims(D_pair(n, TH)) == (0, n, 0)


@pytest.mark.parametrize("m, n", [(1, 1), (2, 1), (1, 3)])
def test_wandering_F(m, n):
    assert dims(F_pair(m, n, TH)) == (0, m, n)


def test_wandering_unitaries():
    assert dims(torus_pair(TH)) == (0, 0, 0)


def test_layout_mismatch():
    with pytest.raises(ValidationError):
        wandering_spaces([op(shift("N", (1,))), op(shift("NN", (1, 0)))])


def _numeric_wandering(ops, A, L, depth):
    mats = [to_window(o, L)[0].toarray() for o in ops]
    layout = ops[0].layout
    d = mats[0].shape[0]
    frame = np.eye(d)
    for i in A:
        M = mats[i - 1].conj().T
        frame = frame @ _null(M @ frame)
    inner = np.flatnonzero(window_interior(layout, L, depth))
    # vectors of the frame supported on interior labels
    outside = np.setdiff1d(np.arange(d), inner)
    return _null(frame[outside]).shape[1] if frame.shape[1] else 0


def _null(M, tol=1e-8):
    if M.shape[0] == 0:
        return np.eye(M.shape[1])
    _, s, vh = np.linalg.svd(M)
    return vh[int(np.sum(s > tol)):].conj().T


def _exact_in_window(sub, layout, L, depth):
    total = 0
    for part, item in zip(sub.parts, layout):
        lo = [0 if k == "N" else -L + depth for k in item]
        hi = [L - depth] * len(item)
        total += len(part.labels(lo, hi))
    return total


@pytest.mark.parametrize("spec", ["toeplitz", "D:3", "F:2:1", "F:1:3", "torus"])
def test_exact_numeric_agreement(spec):
    ops = list(build(spec).pair)
    L, depth = 6, 1
    W = wandering_spaces(ops)
    for A in (A1, A2, A12):
        assert _numeric_wandering(ops, sorted(A), L, depth) == _exact_in_window(W[A], ops[0].layout, L, depth)


# ---------------------------------------------------------------------------
# relation checks


def test_verify_D_exact_zero():
    rep = verify_twisted(D_pair(3, TH), TH)
    assert rep.max == 0.0 and rep.ok
    assert all(rep.exact.values())


@pytest.mark.parametrize("spec", ["toeplitz", "D:1", "D:5", "F:1:1", "F:2:1", "torus", "U:D:2;toeplitz:golden"])
def test_gallery_fixtures_verify(spec):
    fx = build(spec)
    assert verify_twisted(fx.pair, fx.twist).max == 0.0


def test_untwisted_shifts_fail_nontrivial_twist():
    S = op(shift("NN", (1, 0)))
    T = op(shift("NN", (0, 1)))
    rep = verify_twisted([S, T], TH)
    assert rep.residuals["twisted(1,2)"] > 0
    assert not rep.ok


def test_rational_phase_residual_is_exact():
    S = op(shift("NN", (1, 0)))
    T = op(shift("NN", (0, 1)))
    rep = verify_twisted([S, T], Angle.rational(1, 2))
    assert rep.residuals["twisted(1,2)"] == pytest.approx(2.0)
    assert rep.exact["twisted(1,2)"]


def test_noncommuting_twists_flagged():
    X = np.array([[0, 1], [1, 0]], dtype=complex)
    Zm = np.diag([1.0, -1.0]).astype(complex)
    I2 = np.eye(2, dtype=complex)
    ops = [op(FiniteBlock(I2))] * 3
    twists = {(1, 2): op(FiniteBlock(X)), (1, 3): op(FiniteBlock(Zm)), (2, 3): op(FiniteBlock(I2))}
    rep = verify_twisted(ops, twists)
    assert rep.residuals["u_commute(1,2;1,3)"] == pytest.approx(2.0)


def test_wold_refuses_bad_relations():
    with pytest.raises(RelationError):
        wold_decompose([op(shift("NN", (1, 0))), op(shift("NN", (0, 1)))], TH)


# ---------------------------------------------------------------------------
# Wold decomposition


def test_single_shift_is_pure():
    wd = wold_decompose([op(shift("N", (1,)))])
    assert wd.parts[A1].H.dim == math.inf and wd.parts[frozenset()].H.is_zero()
    assert wd.complete and wd.orthogonal and wd.exact


def test_single_unitary():
    wd = wold_decompose([op(shift("Z", (1,)))])
    assert wd.parts[frozenset()].H.dim == math.inf and wd.parts[A1].H.is_zero()


def test_toeplitz_decomposition():
    wd = wold_decompose(toeplitz_pair(TH), TH)
    assert wd.nonzero() == [A12]
    assert wd.parts[A12].B.dim == 1
    assert wd.complete and wd.orthogonal


@pytest.mark.parametrize("m, n", [(1, 1), (2, 1), (1, 3)])
def test_F_decomposition_two_summands(m, n):
    wd = wold_decompose(F_pair(m, n, TH), TH)
    assert set(wd.nonzero()) == {A1, A2}
    H1, H2 = wd.parts[A1].H, wd.parts[A2].H
    assert [p.is_empty() for p in H1.parts] == [False] * m + [True] * n
    assert [p.is_empty() for p in H2.parts] == [True] * m + [False] * n
    assert wd.parts[A1].B.dim == m and wd.parts[A2].B.dim == n
    assert wd.complete and wd.orthogonal and wd.exact


def test_finite_dimensional_degeneracy():
    rng = np.random.default_rng(3)
    V, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    a = np.exp(2j * np.pi * rng.random(4))
    T1 = V @ np.diag(a) @ V.conj().T
    T2 = V @ np.diag(a.conj()) @ V.conj().T
    wd = wold_decompose([op(FiniteBlock(T1)), op(FiniteBlock(T2))], 1.0)
    assert wd.parts[frozenset()].H.dim == 4
    assert all(wd.parts[A].H.is_zero() for A in (A1, A2, A12))
    assert wd.complete and wd.orthogonal


def test_reducing_for_twist_unitary():
    fx = build("U:D:2;toeplitz:golden")
    W = wandering_spaces(fx.pair)
    for A, sub in W.items():
        for b, part in zip(fx.twist.blocks, sub.parts):
            assert b.image(part).equals(part)


def test_wold_json_shape():
    js = wold_decompose(D_pair(2, TH), TH).to_json()
    assert js["parts"]["{1}"]["W"]["dim"] == 2
    assert js["parts"]["{}"]["H"]["dim"] == 0


# ---------------------------------------------------------------------------
# restriction


def test_restrict_D_T2():
    lams = default_lambdas(3)
    T1, T2 = D_pair(3, TH, lams)
    W1 = wandering_spaces([T1, T2])[A1]
    M = restrict(T2, W1).matrix
    np.testing.assert_allclose(M, np.diag([l.phase(1) for l in lams]), atol=1e-14)


def test_restrict_F_T1_on_W2():
    l2 = default_lambdas(2, shift=1)
    T1, T2 = F_pair(1, 2, TH, lambdas2=l2)
    W2 = wandering_spaces([T1, T2])[A2]
    np.testing.assert_allclose(restrict(T1, W2).matrix, np.diag([l.phase(1) for l in l2]), atol=1e-14)


def test_restrict_unitary_full_space():
    Q, _ = np.linalg.qr(np.random.default_rng(1).normal(size=(3, 3)) + 0j)
    U = op(FiniteBlock(Q))
    whole = wandering_spaces([U])[frozenset()]
    np.testing.assert_allclose(restrict(U, whole).matrix, Q, atol=1e-14)


def test_restrict_needs_invariance():
    T1, T2 = toeplitz_pair(TH)
    W12 = wandering_spaces([T1, T2])[A12]
    with pytest.raises(ValidationError):
        restrict(T1, W12)


# ---------------------------------------------------------------------------
# block algebra vs windowed matrices

angles = st.sampled_from([Angle(), Angle.rational(1, 3), TH, -TH, Angle.rational(2, 5)])
kinds_st = st.sampled_from(["N", "Z", "NZ", "NN"])


@st.composite
def block_pairs(draw):
    kinds = draw(kinds_st)
    d = len(kinds)

    def one():
        v = tuple(draw(st.integers(-1 if k == "Z" else 0, 2)) for k in kinds)
        w = tuple(draw(angles) for _ in range(d))
        lam = np.exp(2j * np.pi * draw(st.sampled_from([0.0, 0.25, 0.1])))
        b = ShiftBlock(tuple(kinds), v, w, lam, draw(angles))
        return b.adjoint() if draw(st.booleans()) else b

    return one(), one()


@settings(max_examples=150, deadline=None)
@given(block_pairs())
def test_compose_and_adjoint_match_windows(pair):
    a, b = pair
    L = 6
    A, _ = to_window(op(a), L)
    B, _ = to_window(op(b), L)
    AB, _ = to_window(op(a.compose(b)), L)
    mask = window_interior((a.kinds,), L, depth=4)
    diff = (AB - A @ B).toarray()[:, mask]
    assert np.abs(diff).max(initial=0) <= 1e-12
    AH, _ = to_window(op(a.adjoint()), L)
    assert np.abs((AH - A.conj().T).toarray()).max(initial=0) <= 1e-12


def test_structured_json_roundtrip():
    T1, T2 = F_pair(2, 1, TH)
    for T in (T1, T2):
        back = StructuredOp.from_json(T.to_json())
        assert np.abs((to_window(back, 4)[0] - to_window(T, 4)[0]).toarray()).max() <= 1e-12
