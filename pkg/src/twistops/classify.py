"""Classification of pairs of doubly twisted isometries with finite-dimensional wandering data.

Types: I (universal pair algebra), II_n, III_{m,n} and IV (rotation algebra),
decided from which Wold summands H_A are nonzero and from eigenvalue counts of
one isometry restricted to the wandering space of the other.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .angles import Angle, parse_angle
from .errors import ProximityWarning, RelationError, UnsupportedParameterError, ValidationError
from .ktheory import k_of_class, k_to_json
from .labelsets import INF
from .spectral import angle_of, cluster_circle, joint_spectrum
from .structured import (
    FiniteBlock,
    ShiftBlock,
    StructuredOp,
    _op_diff,
    as_structured,
    restrict,
    verify_twisted,
    wold_decompose,
)

__all__ = [
    "Single",
    "DirectSum",
    "classify_pair",
    "classify_U_twisted",
    "eigen_invariants",
    "isomorphic",
    "as_angle",
    "result_to_json",
]

EIG_TOL = 1e-6
_PROXIMITY = 100 * np.finfo(float).eps


def as_angle(theta) -> Angle:
    if isinstance(theta, Angle):
        return theta
    if isinstance(theta, str):
        return parse_angle(theta)
    raise ValidationError(
        f"angles must be Angle instances or strings, got {type(theta).__name__}; "
        "use Angle.irrational(x) to declare a float irrational"
    )


def _require_irrational(theta: Angle) -> None:
    if theta.is_rational:
        raise UnsupportedParameterError(
            f"theta = {theta} is rational; the classification only covers irrational parameters",
            theta=str(theta),
        )


@dataclass(frozen=True)
class Single:
    """One algebra: ``type`` in I..IV, its angle and integer invariants."""

    type: str
    theta: Angle
    params: tuple = ()
    trace: tuple = field(default=(), compare=False)

    kind = "single"

    def __post_init__(self):
        if self.type not in ("I", "II", "III", "IV"):
            raise ValidationError(f"unknown type {self.type!r}")
        params = tuple(sorted(dict(self.params).items()))
        object.__setattr__(self, "params", params)
        p = dict(params)
        if self.type == "II" and p.get("n", 0) < 1:
            raise ValidationError("type II needs n >= 1")
        if self.type == "III" and (p.get("m", 0) < 1 or p.get("n", 0) < 1):
            raise ValidationError("type III needs m, n >= 1")

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    def k_groups(self):
        return k_of_class(self)


@dataclass(frozen=True)
class DirectSum:
    """Direct sum of Single results indexed by spectral angles."""

    components: tuple
    trace: tuple = field(default=(), compare=False)

    kind = "direct_sum"

    def k_groups(self):
        return k_of_class(self)


def result_to_json(r) -> dict:
    K = k_to_json(k_of_class(r))
    if r.kind == "single":
        return {
            "kind": "single",
            "type": r.type,
            "theta": r.theta.to_json(),
            "params": r.param_dict,
            "k_groups": K,
            "trace": list(r.trace),
        }
    return {
        "kind": "direct_sum",
        "components": [
            {"theta": th.to_json(), **{k: v for k, v in result_to_json(c).items() if k != "kind"}}
            for th, c in r.components
        ],
        "k_groups": K,
        "trace": list(r.trace),
    }


def eigen_invariants(M, tol: float = EIG_TOL) -> tuple[int, list]:
    """Number of distinct eigenvalues of a unitary matrix, clustering at ``tol``.

    A :class:`ProximityWarning` is issued when two eigenvalues that are
    numerically distinguishable (farther apart than 100·eps) get merged.
    """
    A = M.matrix if isinstance(M, FiniteBlock) else np.atleast_2d(np.asarray(M, dtype=complex))
    if A.size == 0:
        return 0, []
    res = np.linalg.norm(A.conj().T @ A - np.eye(A.shape[0]), 2)
    if res > 1e-8:
        raise ValidationError(f"matrix is not unitary (residual {res:.3e})", residual=float(res))
    ev = np.linalg.eigvals(A)
    ev = ev / np.abs(ev)
    clusters = cluster_circle(ev, tol)
    for idx in clusters:
        for a, b in itertools.combinations(idx, 2):
            gap = abs(ev[a] - ev[b])
            if gap > _PROXIMITY:
                warnings.warn(
                    f"eigenvalues {ev[a]:.12g} and {ev[b]:.12g} (gap {gap:.2e}) merged at tol {tol:g}",
                    ProximityWarning,
                    stacklevel=2,
                )
                break
    reps = []
    for idx in clusters:
        m = np.mean(ev[idx])
        reps.append(complex(m / abs(m)))
    return len(clusters), reps


def classify_pair(pair, theta, tol: float = EIG_TOL) -> Single:
    """Classify ``(T_1, T_2)`` with ``T_1* T_2 = e^{-2πiθ} T_2 T_1*`` (twist U = e^{2πiθ})."""
    theta = as_angle(theta)
    _require_irrational(theta)
    T1, T2 = (as_structured(t) for t in pair)
    wd = wold_decompose([T1, T2], theta)
    trace = [f"relations verified (max residual {wd.report.max:.1e})"]
    H = {A: wd.parts[frozenset(A)].H.dim for A in [(), (1,), (2,), (1, 2)]}
    B = {A: wd.parts[frozenset(A)].B for A in [(1,), (2,), (1, 2)]}
    for A, sub in B.items():
        if sub.dim == INF:
            raise UnsupportedParameterError(
                f"wandering data B_{set(A)} is infinite-dimensional; the classification needs finite wandering spaces",
                subset=list(A),
            )
    trace.append("nonzero summands: " + ", ".join("H{" + ",".join(map(str, A)) + "}" for A in H if H[A]))
    if H[(1, 2)]:
        trace.append("H{1,2} != 0: type I")
        return Single("I", theta, (), tuple(trace))
    if H[(1,)] and not H[(2,)]:
        n, ev = eigen_invariants(restrict(T2, B[(1,)]), tol)
        trace.append(f"only H{{1}} != 0: type II, T_2 on W{{1}} has {n} distinct eigenvalues")
        return Single("II", theta, {"n": n}, tuple(trace))
    if H[(2,)] and not H[(1,)]:
        n, ev = eigen_invariants(restrict(T1, B[(2,)]), tol)
        trace.append(f"only H{{2}} != 0: type II, T_1 on W{{2}} has {n} distinct eigenvalues")
        return Single("II", theta, {"n": n}, tuple(trace))
    if H[(1,)] and H[(2,)]:
        m, _ = eigen_invariants(restrict(T2, B[(1,)]), tol)
        n, _ = eigen_invariants(restrict(T1, B[(2,)]), tol)
        trace.append(f"H{{1}}, H{{2}} != 0: type III with (m, n) = ({m}, {n})")
        return Single("III", theta, {"m": m, "n": n}, tuple(trace))
    if H[()]:
        trace.append("only H{} != 0: type IV")
        return Single("IV", theta, (), tuple(trace))
    raise ValidationError("the space is zero")


# ---------------------------------------------------------------------------
# U-twisted pairs


def _block_spectrum(U: StructuredOp, tol: float):
    """Per block: list of (eigenvalue, frame or None) with None meaning the whole block."""
    out = []
    for k, b in enumerate(U.blocks):
        if isinstance(b, ShiftBlock):
            if any(b.v) or any(w.frac() != 0 or not w.is_exact for w in b.w):
                raise ValidationError(
                    f"U is not a scalar on block {k}; its spectrum is not a finite set",
                    block=k,
                )
            out.append([(b.value, None)])
        else:
            js = joint_spectrum([b.matrix], tol=1e-8)
            out.append([(p[0], js.frames[p]) for p in js.points])
    return out


def _compress(op: StructuredOp, selection) -> StructuredOp:
    blocks = []
    for b, (k, frame) in zip([op.blocks[k] for k, _ in selection], selection):
        if frame is None:
            blocks.append(b)
        else:
            blocks.append(FiniteBlock(frame.conj().T @ b.matrix @ frame))
    return StructuredOp(tuple(blocks))


def classify_U_twisted(pair, U, thetas, tol: float = EIG_TOL, return_details: bool = False):
    """Split a U-twisted pair along the spectrum of U and classify each piece.

    ``thetas`` lists the angles θ_i with σ(U) = {e^{2πiθ_i}}.  A one-point
    spectrum returns the plain :class:`Single`; otherwise a :class:`DirectSum`
    whose repeated components are merged.
    """
    T1, T2 = (as_structured(t) for t in pair)
    U = as_structured(U) if not isinstance(U, (Angle, complex, float, int)) else as_structured(U, T1.layout)
    thetas = [as_angle(t) for t in thetas]
    for t in thetas:
        _require_irrational(t)
    report = verify_twisted([T1, T2], {(1, 2): U})
    if not report.ok:
        raise RelationError(
            f"pair is not U-doubly twisted (max residual {report.max:.3e})", residuals=report.failures()
        )
    spec = _block_spectrum(U, tol)
    points = [z for blk in spec for z, _ in blk]
    clusters = cluster_circle(points, 1e-8)
    flat = [(k, z, fr) for k, blk in enumerate(spec) for z, fr in blk]
    trace = [f"sigma(U) has {len(clusters)} point(s)"]
    comps, details = [], []
    used = set()
    for idx in clusters:
        z = complex(np.mean([flat[i][1] for i in idx]))
        z /= abs(z)
        match = [t for t in thetas if abs(t.phase(1) - z) <= 1e-8]
        if not match:
            raise ValidationError(f"no theta supplied for spectral point at angle {angle_of(z):.12g}")
        th = match[0]
        used.add(id(th))
        selection = [(flat[i][0], flat[i][2]) for i in idx]
        sub = [_compress(T1, selection), _compress(T2, selection)]
        r = classify_pair(sub, th, tol)
        trace.append(f"angle {th}: {r.type} {r.param_dict}")
        comps.append((th, r))
        details.append({"theta": th, "blocks": [k for k, _ in selection], "result": r})
    # Σ λ_i P_i reconstructs U
    recon = _reassemble(U, spec)
    resid = _op_diff(recon, U)[0]
    trace.append(f"projection reconstruction residual {resid:.1e}")
    unique = []
    for c in comps:
        if c not in unique:
            unique.append(c)
    unique.sort(key=lambda c: c[0].frac())
    result = unique[0][1] if len(unique) == 1 else DirectSum(tuple(unique), tuple(trace))
    if return_details:
        return result, {"components": details, "reconstruction_residual": resid}
    return result


def _reassemble(U: StructuredOp, spec) -> StructuredOp:
    blocks = []
    for b, blk in zip(U.blocks, spec):
        if isinstance(b, ShiftBlock):
            z = blk[0][0]
            blocks.append(ShiftBlock(b.kinds, (0,) * b.ndim, None, z))
        else:
            M = sum(z * fr @ fr.conj().T for z, fr in blk)
            blocks.append(FiniteBlock(M))
    return StructuredOp(tuple(blocks))


# ---------------------------------------------------------------------------
# isomorphism


def _single_iso(a: Single, b: Single, trace: list) -> bool:
    Ka, Kb = k_of_class(a), k_of_class(b)
    if Ka != Kb:
        trace.append(f"K-groups differ: ({Ka[0]}, {Ka[1]}) vs ({Kb[0]}, {Kb[1]})")
        return False
    plus, ex1 = a.theta.equal_mod1(b.theta, 1)
    minus, ex2 = a.theta.equal_mod1(b.theta, -1)
    how = "exact" if ex1 and ex2 else "numeric"
    if not (plus or minus):
        trace.append(f"theta {a.theta} is not +/- {b.theta} mod 1 ({how})")
        return False
    trace.append(f"theta {a.theta} == {'' if plus else '-'}({b.theta}) mod 1 ({how})")
    if a.type == b.type and a.params == b.params:
        trace.append(f"same type {a.type} {a.param_dict}")
        return True
    if a.type == b.type == "III":
        trace.append(
            f"K-rule: III{a.param_dict} vs III{b.param_dict} have equal K-groups (m+n = {sum(a.param_dict.values())})"
        )
        return True
    trace.append("K-rule: equal K-groups and matching angle")
    return True


def isomorphic(r1, r2) -> tuple[bool, list]:
    """Decide isomorphism of two classification results; returns ``(verdict, trace)``."""
    trace: list = []
    for r in (r1, r2):
        comps = [r] if r.kind == "single" else [c for _, c in r.components]
        for c in comps:
            _require_irrational(c.theta)
    if r1.kind == "single" and r2.kind == "single":
        return _single_iso(r1, r2, trace), trace
    c1 = _components(r1)
    c2 = _components(r2)
    if r1.kind != r2.kind:
        trace.append("promoted single result to a one-component direct sum")
    if len(c1) != len(c2):
        trace.append(f"component counts differ: {len(c1)} vs {len(c2)}")
        return False, trace
    ok = np.zeros((len(c1), len(c2)), dtype=bool)
    for i, a in enumerate(c1):
        for j, b in enumerate(c2):
            ok[i, j] = _single_iso(a, b, [])
    rows, cols = linear_sum_assignment(~ok)
    verdict = bool(ok[rows, cols].all())
    if verdict:
        for i, j in zip(rows, cols):
            sub: list = []
            _single_iso(c1[i], c2[j], sub)
            trace.append(f"component {i} <-> {j}: " + "; ".join(sub))
    else:
        trace.append("no bijection of components matches type, invariants and angle (+/- accepted)")
    return verdict, trace


def _components(r) -> list:
    if r.kind == "single":
        return [r]
    out = []
    for _, c in r.components:
        if c not in out:
            out.append(c)
    return out
