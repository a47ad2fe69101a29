"""Exact operator model for block-diagonal weighted shifts and their Wold decomposition.

A :class:`StructuredOp` is a direct sum of blocks.  A :class:`ShiftBlock`
acts on ``ℓ²(N₀^a × Z^b)`` as the monomial operator

    e_x ↦ λ · e^{2πi⟨w, x⟩} · e_{x+v}      for x ≥ dom (on N₀ coordinates),

and zero below ``dom``.  These are closed under products and adjoints, so
relation checks and Wold decompositions reduce to shift-vector arithmetic
and label-set algebra (:mod:`twistops.labelsets`).  A :class:`FiniteBlock`
is an explicit matrix and is handled by linear algebra.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from numbers import Number

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .angles import Angle
from .errors import RelationError, StabilizationWarning, ValidationError
from .labelsets import INF, BoxSet, universe

__all__ = [
    "ShiftBlock",
    "FiniteBlock",
    "StructuredOp",
    "Subspace",
    "WoldPart",
    "WoldDecomposition",
    "ResidualReport",
    "adjoint_kernel",
    "wandering_spaces",
    "wold_decompose",
    "numeric_wold",
    "verify_twisted",
    "restrict",
    "to_window",
    "window_interior",
    "as_structured",
    "scalar_op",
]

SVD_TOL = 1e-8
REL_TOL = 1e-10
_EPS = 8 * np.finfo(float).eps


def _angle(x) -> Angle:
    if isinstance(x, Angle):
        return x
    if isinstance(x, (int, Fraction)):
        return Angle.rational(Fraction(x))
    return Angle.irrational(float(x))


def _dot(w, x) -> Fraction:
    total = Fraction(0)
    for wi, xi in zip(w, x):
        if xi:
            total += wi._hp * int(xi)
    return total


def _dot_angle(w, x) -> Angle:
    out = Angle()
    for wi, xi in zip(w, x):
        if xi:
            out = out + wi * int(xi)
    return out


@dataclass(frozen=True)
class ShiftBlock:
    """Monomial operator ``e_x ↦ lam·e^{2πi(phase + ⟨w,x⟩)} e_{x+v}`` on ``x ≥ dom``.

    ``kinds`` types each coordinate as ``"N"`` (N₀) or ``"Z"``.  ``phase`` is an
    exact angle kept apart from the complex factor ``lam`` so twisted
    relations between angle-valued phases are checked without rounding.
    """

    kinds: tuple
    v: tuple
    w: tuple = None
    lam: complex = 1.0
    phase: Angle = Angle()
    dom: tuple = None

    def __post_init__(self):
        d = len(self.kinds)
        if any(k not in ("N", "Z") for k in self.kinds):
            raise ValidationError(f"lattice kinds must be 'N' or 'Z', got {self.kinds}")
        object.__setattr__(self, "kinds", tuple(self.kinds))
        object.__setattr__(self, "v", tuple(int(t) for t in self.v))
        w = (Angle(),) * d if self.w is None else tuple(_angle(t) for t in self.w)
        object.__setattr__(self, "w", w)
        dom = (0,) * d if self.dom is None else tuple(int(t) for t in self.dom)
        dom = tuple(t if k == "N" else 0 for t, k in zip(dom, self.kinds))
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "phase", _angle(self.phase))
        if len(self.v) != d or len(self.w) != d or len(self.dom) != d:
            raise ValidationError("ShiftBlock vectors must match the lattice rank", kinds=self.kinds)

    # basic data
    @property
    def ndim(self) -> int:
        return len(self.kinds)

    @property
    def value(self) -> complex:
        return self.lam * self.phase.phase(1)

    def n_part(self) -> tuple:
        return tuple(t for t, k in zip(self.v, self.kinds) if k == "N")

    def is_isometry(self) -> bool:
        return all(t == 0 for t in self.dom) and all(t >= 0 for t in self.n_part()) and abs(abs(self.lam) - 1) <= 1e-12

    def is_unitary(self) -> bool:
        return self.is_isometry() and all(t == 0 for t in self.n_part())

    def domain(self) -> BoxSet:
        return BoxSet(self.ndim, (tuple((d, INF) if k == "N" else (-INF, INF) for d, k in zip(self.dom, self.kinds)),))

    def range(self) -> BoxSet:
        return self.domain().translate(self.v).intersect(universe(self.kinds))

    # algebra
    def compose(self, other: "ShiftBlock") -> "ShiftBlock":
        """``self ∘ other``."""
        if self.kinds != other.kinds:
            raise ValidationError("cannot compose blocks on different lattices")
        dom = tuple(
            max(db, da - vb, 0) if k == "N" else 0
            for da, db, vb, k in zip(self.dom, other.dom, other.v, self.kinds)
        )
        return ShiftBlock(
            self.kinds,
            tuple(a + b for a, b in zip(self.v, other.v)),
            tuple(a + b for a, b in zip(self.w, other.w)),
            self.lam * other.lam,
            self.phase + other.phase + _dot_angle(self.w, other.v),
            dom,
        )

    def adjoint(self) -> "ShiftBlock":
        dom = tuple(max(d + t, 0) if k == "N" else 0 for d, t, k in zip(self.dom, self.v, self.kinds))
        return ShiftBlock(
            self.kinds,
            tuple(-t for t in self.v),
            tuple(-t for t in self.w),
            self.lam.conjugate(),
            -self.phase + _dot_angle(self.w, self.v),
            dom,
        )

    def scale(self, lam: complex = 1.0, phase: Angle = Angle()) -> "ShiftBlock":
        return ShiftBlock(self.kinds, self.v, self.w, self.lam * lam, self.phase + _angle(phase), self.dom)

    def apply(self, x):
        """``(coefficient, target label)`` for basis vector e_x, or None if it is killed."""
        if any(xi < d for xi, d, k in zip(x, self.dom, self.kinds) if k == "N"):
            return None
        tot = (self.phase._hp + _dot(self.w, x)) % 1
        coef = self.lam * np.exp(2j * np.pi * float(tot))
        return coef, tuple(xi + vi for xi, vi in zip(x, self.v))

    def image(self, labels: BoxSet) -> BoxSet:
        return labels.intersect(self.domain()).translate(self.v)

    def to_json(self) -> dict:
        return {
            "type": "shift",
            "lattice": list(self.kinds),
            "v": list(self.v),
            "w": [t.to_json() for t in self.w],
            "lam": [self.lam.real, self.lam.imag],
            "phase": self.phase.to_json(),
            "dom": list(self.dom),
        }

    @classmethod
    def from_json(cls, obj) -> "ShiftBlock":
        return cls(
            tuple(obj["lattice"]),
            tuple(obj["v"]),
            tuple(Angle.from_json(t) for t in obj.get("w", [])) or None,
            complex(*obj.get("lam", [1.0, 0.0])),
            Angle.from_json(obj["phase"]) if "phase" in obj else Angle(),
            tuple(obj["dom"]) if "dom" in obj else None,
        )


@dataclass(frozen=True, eq=False)
class FiniteBlock:
    """Explicit matrix on a finite-dimensional summand."""

    matrix: np.ndarray

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.matrix, dtype=complex))
        if M.shape[0] != M.shape[1]:
            raise ValidationError(f"FiniteBlock must be square, got {M.shape}")
        object.__setattr__(self, "matrix", M)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def compose(self, other: "FiniteBlock") -> "FiniteBlock":
        return FiniteBlock(self.matrix @ other.matrix)

    def adjoint(self) -> "FiniteBlock":
        return FiniteBlock(self.matrix.conj().T)

    def scale(self, lam: complex = 1.0, phase: Angle = Angle()) -> "FiniteBlock":
        return FiniteBlock(self.matrix * lam * _angle(phase).phase(1))

    def isometry_defect(self) -> float:
        return float(np.linalg.norm(self.matrix.conj().T @ self.matrix - np.eye(self.dim), 2))

    def is_isometry(self, tol: float = REL_TOL) -> bool:
        return self.isometry_defect() <= tol

    def to_json(self) -> dict:
        return {"type": "finite", "matrix": [[[z.real, z.imag] for z in row] for row in self.matrix]}

    @classmethod
    def from_json(cls, obj) -> "FiniteBlock":
        return cls(np.array([[complex(*z) for z in row] for row in obj["matrix"]]))


def _layout_of(block):
    return block.kinds if isinstance(block, ShiftBlock) else block.dim


@dataclass(frozen=True, eq=False)
class StructuredOp:
    """Block-diagonal operator; block k of every operator in a tuple acts on summand k."""

    blocks: tuple

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        for b in self.blocks:
            if not isinstance(b, (ShiftBlock, FiniteBlock)):
                raise ValidationError(f"unsupported block type {type(b).__name__}")

    @property
    def layout(self) -> tuple:
        return tuple(_layout_of(b) for b in self.blocks)

    def _check(self, other):
        if self.layout != other.layout:
            raise ValidationError("operators do not share a block decomposition", left=self.layout, right=other.layout)

    def compose(self, other: "StructuredOp") -> "StructuredOp":
        self._check(other)
        return StructuredOp(tuple(a.compose(b) for a, b in zip(self.blocks, other.blocks)))

    __matmul__ = compose

    def adjoint(self) -> "StructuredOp":
        return StructuredOp(tuple(b.adjoint() for b in self.blocks))

    @property
    def H(self) -> "StructuredOp":
        return self.adjoint()

    def scale(self, lam: complex = 1.0, phase: Angle = Angle()) -> "StructuredOp":
        return StructuredOp(tuple(b.scale(lam, phase) for b in self.blocks))

    def direct_sum(self, other: "StructuredOp") -> "StructuredOp":
        return StructuredOp(self.blocks + other.blocks)

    def is_isometry(self) -> bool:
        return all(b.is_isometry() for b in self.blocks)

    def is_finite_dimensional(self) -> bool:
        return all(isinstance(b, FiniteBlock) for b in self.blocks)

    def to_json(self) -> dict:
        return {"blocks": [b.to_json() for b in self.blocks]}

    @classmethod
    def from_json(cls, obj) -> "StructuredOp":
        out = []
        for b in obj["blocks"]:
            out.append(ShiftBlock.from_json(b) if b["type"] == "shift" else FiniteBlock.from_json(b))
        return cls(tuple(out))


def scalar_op(layout, lam: complex = 1.0, phase: Angle = Angle()) -> StructuredOp:
    """``lam·e^{2πi·phase}·I`` on the given block layout."""
    blocks = []
    for item in layout:
        if isinstance(item, int):
            blocks.append(FiniteBlock(np.eye(item) * lam * _angle(phase).phase(1)))
        else:
            blocks.append(ShiftBlock(item, (0,) * len(item), None, lam, phase))
    return StructuredOp(tuple(blocks))


def as_structured(op, layout=None) -> StructuredOp:
    """Wrap a matrix as a single FiniteBlock; scalars need ``layout``."""
    if isinstance(op, StructuredOp):
        return op
    if isinstance(op, (ShiftBlock, FiniteBlock)):
        return StructuredOp((op,))
    if isinstance(op, Angle):
        return scalar_op(layout, 1.0, op)
    if isinstance(op, Number):
        return scalar_op(layout, complex(op))
    return StructuredOp((FiniteBlock(np.asarray(op)),))


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True, eq=False)
class Subspace:
    """Per-block description: a BoxSet of labels or an orthonormal column frame."""

    parts: tuple
    exact: bool = True

    @property
    def dims(self) -> tuple:
        return tuple(p.size() if isinstance(p, BoxSet) else p.shape[1] for p in self.parts)

    @property
    def dim(self):
        return sum(self.dims, 0)

    def is_zero(self) -> bool:
        return self.dim == 0

    def to_json(self) -> dict:
        out = []
        for p in self.parts:
            if isinstance(p, BoxSet):
                out.append({"labels": p.to_json(), "dim": _jdim(p.size())})
            else:
                out.append({"frame_dim": int(p.shape[1])})
        return {"dim": _jdim(self.dim), "exact": self.exact, "blocks": out}


def _jdim(d):
    return "inf" if d == INF else int(d)


def _null_frame(M: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis of ker M from singular values below ``tol``."""
    n = M.shape[1]
    if M.shape[0] == 0:
        return np.eye(n, dtype=complex)
    _, s, vh = np.linalg.svd(M)
    rank = int(np.sum(s > tol))
    return vh[rank:].conj().T


def _orth(M: np.ndarray, tol: float) -> np.ndarray:
    if M.size == 0:
        return np.zeros((M.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(M, full_matrices=False)
    return u[:, : int(np.sum(s > tol))]


def _frame_intersect(A: np.ndarray, B: np.ndarray, tol: float) -> np.ndarray:
    if A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    # x = A a = B b  ⇔  [A, −B](a; b) = 0
    N = _null_frame(np.hstack([A, -B]), tol)
    return _orth(A @ N[: A.shape[1]], tol)


def _check_isometric(op: StructuredOp, name: str = "operator") -> None:
    for k, b in enumerate(op.blocks):
        if not b.is_isometry():
            defect = b.isometry_defect() if isinstance(b, FiniteBlock) else abs(abs(b.lam) - 1)
            raise ValidationError(f"{name} is not an isometry on block {k}", block=k, residual=defect)


def adjoint_kernel(op: StructuredOp, tol: float = SVD_TOL) -> Subspace:
    """``ker T*`` blockwise: the labels outside the range, or a numeric null frame."""
    _check_isometric(op)
    parts = []
    for b in op.blocks:
        if isinstance(b, ShiftBlock):
            parts.append(universe(b.kinds).subtract(b.range()))
        else:
            parts.append(_null_frame(b.matrix.conj().T, tol))
    return Subspace(tuple(parts))


def _whole(layout) -> Subspace:
    return Subspace(tuple(universe(k) if not isinstance(k, int) else np.eye(k, dtype=complex) for k in layout))


def _subsets(indices):
    for r in range(len(indices) + 1):
        yield from (frozenset(c) for c in itertools.combinations(indices, r))


def _check_layouts(ops) -> tuple:
    layouts = {op.layout for op in ops}
    if len(layouts) != 1:
        raise ValidationError("operators do not share a block decomposition", layouts=[list(map(str, l)) for l in layouts])
    return layouts.pop()


def wandering_spaces(ops, tol: float = SVD_TOL) -> dict:
    """``W_A = ∩_{i∈A} ker T_i*`` for every A ⊆ {1..N} (1-based), with W_∅ = H."""
    ops = [as_structured(o) for o in ops]
    layout = _check_layouts(ops)
    kernels = [adjoint_kernel(o, tol) for o in ops]
    out = {}
    for A in _subsets(range(1, len(ops) + 1)):
        if not A:
            out[A] = _whole(layout)
            continue
        parts = []
        for k, item in enumerate(layout):
            ks = [kernels[i - 1].parts[k] for i in sorted(A)]
            if isinstance(item, int):
                parts.append(reduce(lambda a, b: _frame_intersect(a, b, tol), ks))
            else:
                parts.append(reduce(BoxSet.intersect, ks))
        out[A] = Subspace(tuple(parts))
    return out


# ---------------------------------------------------------------------------
# relation checks


@dataclass
class ResidualReport:
    """Residual per relation, with flags for exact evaluation and upper bounds."""

    residuals: dict
    exact: dict
    bound: dict
    tol: float = REL_TOL

    @property
    def max(self) -> float:
        return max(self.residuals.values(), default=0.0)

    @property
    def ok(self) -> bool:
        return self.max <= self.tol

    def failures(self) -> dict:
        return {k: v for k, v in self.residuals.items() if v > self.tol}

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "max": self.max,
            "tol": self.tol,
            "residuals": self.residuals,
            "exact": self.exact,
            "upper_bound": [k for k, v in self.bound.items() if v],
        }


def _phase_sup(delta: tuple, kinds) -> tuple[float, bool]:
    """Max over labels of |1 − e^{2πi⟨δ,x⟩}|-type spread: returns (q, exact) with q=0 for dense."""
    nz = [d for d in delta if (d.frac() != 0 if d.is_exact else min(d.frac(), 1 - d.frac()) > _EPS)]
    if not nz:
        return 1, True
    if all(d.is_rational for d in nz):
        q = 1
        for d in nz:
            q = math.lcm(q, d.offset.denominator)
        return q, True
    return 0, False


def _block_diff(a, b) -> tuple[float, bool, bool]:
    """``(‖a − b‖, exact, is_upper_bound)`` for two blocks on one summand."""
    if isinstance(a, FiniteBlock):
        return float(np.linalg.norm(a.matrix - b.matrix, 2)), False, False
    la, lb = a.value, b.value
    if a.v != b.v:
        return abs(la) + abs(lb), False, True
    delta = tuple(wb - wa for wa, wb in zip(a.w, b.w))
    q, exact_w = _phase_sup(delta, a.kinds)
    exact = all(t.is_exact for t in a.w + b.w) and a.phase.is_exact and b.phase.is_exact
    # on the common domain
    if q == 1:
        dphase = b.phase - a.phase
        same_phase, ex = dphase.equal_mod1(Angle())
        if same_phase and ex and abs(a.lam - b.lam) <= _EPS * max(1.0, abs(a.lam)):
            common = 0.0
        else:
            common = abs(la - lb)
    elif q > 1:
        common = max(abs(la - lb * np.exp(2j * np.pi * k / q)) for k in range(q))
    else:
        common, exact = abs(la) + abs(lb), False
    # where only one of them is nonzero
    only = 0.0
    if any(x < y for x, y in zip(a.dom, b.dom)):
        only = max(only, abs(la))
    if any(y < x for x, y in zip(a.dom, b.dom)):
        only = max(only, abs(lb))
    return max(common, only), exact, q == 0


def _op_diff(a: StructuredOp, b: StructuredOp) -> tuple[float, bool, bool]:
    a._check(b)
    vals = [_block_diff(x, y) for x, y in zip(a.blocks, b.blocks)]
    return (
        max((v[0] for v in vals), default=0.0),
        all(v[1] for v in vals),
        any(v[2] for v in vals),
    )


def _normalize_twists(twists, n_ops: int, layout) -> dict:
    pairs = [(i, j) for i in range(1, n_ops + 1) for j in range(i + 1, n_ops + 1)]
    if twists is None:
        twists = {}
    elif not isinstance(twists, dict):
        twists = {p: twists for p in pairs}
    out = {}
    for p in pairs:
        t = twists.get(p, twists.get(f"{p[0]},{p[1]}", 1.0))
        out[p] = as_structured(t, layout)
    return out


def verify_twisted(ops, twists=None, m: int = 0, tol: float = REL_TOL) -> ResidualReport:
    """Residuals of the doubly twisted relations for ``ops`` with twists ``U_ij``.

    ``twists`` maps (i, j) to an :class:`Angle` (U = e^{2πiθ}), a complex
    scalar, or a StructuredOp; a single value applies to every pair.  Checked:
    ``T_i U − U T_i``, ``T_i* T_j − U_ij* T_j T_i*``, ``T_i* T_i − 1``,
    ``T_i T_i* − 1`` for i ≤ m, and unitarity/commutation of the U_ij.
    """
    ops = [as_structured(o) for o in ops]
    layout = _check_layouts(ops)
    U = _normalize_twists(twists, len(ops), layout)
    ident = scalar_op(layout)
    res, exact, bound = {}, {}, {}

    def put(name, triple):
        res[name], exact[name], bound[name] = float(triple[0]), triple[1], triple[2]

    for p, q in itertools.combinations(U, 2):
        put(f"u_commute({p[0]},{p[1]};{q[0]},{q[1]})", _op_diff(U[p] @ U[q], U[q] @ U[p]))
    for p, Up in U.items():
        put(f"u_unitary({p[0]},{p[1]})", _op_diff(Up.H @ Up, ident))
    for i, T in enumerate(ops, start=1):
        put(f"isometry({i})", _op_diff(T.H @ T, ident))
        if i <= m:
            put(f"unitary({i})", _op_diff(T @ T.H, ident))
        for p, Up in U.items():
            put(f"central({i};{p[0]},{p[1]})", _op_diff(T @ Up, Up @ T))
    for (i, j), Uij in U.items():
        Ti, Tj = ops[i - 1], ops[j - 1]
        put(f"twisted({i},{j})", _op_diff(Ti.H @ Tj, Uij.H @ Tj @ Ti.H))
    return ResidualReport(res, exact, bound, tol)


# ---------------------------------------------------------------------------
# Wold decomposition


@dataclass(frozen=True, eq=False)
class WoldPart:
    W: Subspace
    B: Subspace
    H: Subspace


@dataclass(frozen=True, eq=False)
class WoldDecomposition:
    """``A ↦ (W_A, B_A, H_A)`` with completeness/orthogonality flags."""

    parts: dict
    layout: tuple
    complete: bool
    orthogonal: bool
    exact: bool
    flags: tuple = ()
    report: ResidualReport = None

    def nonzero(self) -> list:
        return [A for A, p in self.parts.items() if not p.H.is_zero()]

    def to_json(self) -> dict:
        return {
            "complete": self.complete,
            "orthogonal": self.orthogonal,
            "exact": self.exact,
            "flags": list(self.flags),
            "parts": {
                _aname(A): {"W": p.W.to_json(), "B": p.B.to_json(), "H": p.H.to_json()} for A, p in self.parts.items()
            },
        }


def _aname(A) -> str:
    return "{" + ",".join(str(i) for i in sorted(A)) + "}"


def _saturate_exact(boxes: BoxSet, v: tuple, kinds) -> BoxSet | None:
    """∪_{k≥0} (boxes + k v) when it is again a finite union of boxes, else None."""
    npos = [c for c, (t, kd) in enumerate(zip(v, kinds)) if kd == "N" and t > 0]
    if not npos:
        # unitary step: the set must already be invariant
        return boxes if boxes.translate(v).equals(boxes) else None
    if len(npos) != 1:
        return None
    c = npos[0]
    out = []
    for box in boxes.boxes:
        lo, hi = box[c]
        ok = hi == INF or hi - lo + 1 >= v[c]
        ok &= all(v[k] == 0 or box[k] == (-INF, INF) for k in range(len(v)) if k != c)
        if not ok:
            return None
        nb = list(box)
        nb[c] = (lo, INF)
        out.append(tuple(nb))
    # disjointify
    res = BoxSet.empty(len(v))
    for b in out:
        res = res.union(BoxSet(len(v), (b,)))
    return res


def _saturate_window(boxes: BoxSet, steps, kinds, L: int) -> BoxSet:
    lo = [0 if k == "N" else -L for k in kinds]
    hi = [L] * len(kinds)
    seen = set(boxes.labels(lo, hi))
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for v in steps:
                y = tuple(a + b for a, b in zip(x, v))
                if all(l <= t <= h for t, l, h in zip(y, lo, hi)) and y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return BoxSet.points(seen, len(kinds))


def _structured_summand(blocks, Aset, kernels, window: int):
    """Exact W_A, B_A, H_A for one ShiftBlock summand."""
    kinds = blocks[0].kinds
    N = len(blocks)
    flags = []
    W = universe(kinds)
    for i in Aset:
        W = W.intersect(kernels[i - 1])
    comp = [j for j in range(1, N + 1) if j not in Aset]
    if any(not blocks[j - 1].is_unitary() for j in comp):
        B = BoxSet.empty(len(kinds))
    else:
        B = W
        for j in comp:
            if not W.translate(blocks[j - 1].v).equals(W):
                flags.append(f"W{_aname(Aset)} not invariant under T_{j}")
    H, exact = B, True
    for i in sorted(Aset):
        sat = _saturate_exact(H, blocks[i - 1].v, kinds)
        if sat is None:
            exact = False
            break
        H = sat
    if not exact:
        H = _saturate_window(B, [blocks[i - 1].v for i in Aset], kinds, window)
        flags.append(f"H{_aname(Aset)} computed on window L={window}")
    return W, B, H, exact, flags


def numeric_wold(mats, tol: float = SVD_TOL, max_depth: int | None = None, m: int = 0):
    """Numeric W_A, B_A, H_A frames for explicit matrices.

    ``B_A`` iterates ``W ← W ∩ T_j W`` over j ∉ A and ``H_A`` accumulates
    ``T_A^γ B_A`` until the frame dimension stops growing or ``max_depth``
    rounds pass; hitting the bound adds a flag.  Returns ``(parts, flags)``
    where ``parts`` maps A to ``(W, B, H)`` frames.
    """
    mats = [np.asarray(M, dtype=complex) for M in mats]
    d = mats[0].shape[0]
    max_depth = 2 * d if max_depth is None else max_depth
    N = len(mats)
    kernels = [_null_frame(M.conj().T, tol) for M in mats]
    parts, flags = {}, []
    for A in _subsets(range(m + 1, N + 1)):
        W = np.eye(d, dtype=complex)
        for i in A:
            W = _frame_intersect(W, kernels[i - 1], tol)
        B = W
        stable = False
        for _ in range(max_depth):
            prev = B.shape[1]
            for j in range(1, N + 1):
                if j not in A:
                    B = _frame_intersect(B, _orth(mats[j - 1] @ B, tol), tol)
            if B.shape[1] == prev:
                stable = True
                break
        if not stable:
            flags.append(f"B{_aname(A)} did not stabilize within {max_depth} steps")
        H = B
        frontier = B
        for _ in range(max_depth):
            if frontier.shape[1] == 0:
                break
            new = np.hstack([mats[i - 1] @ frontier for i in A]) if A else np.zeros((d, 0))
            grown = _orth(np.hstack([H, new]), tol)
            if grown.shape[1] == H.shape[1]:
                break
            frontier = new
            H = grown
        else:
            if A and frontier.shape[1]:
                flags.append(f"H{_aname(A)} truncated at depth {max_depth}")
        parts[A] = (W, B, H)
    return parts, flags


def wold_decompose(ops, twists=None, m: int = 0, tol: float = SVD_TOL, window: int = 12, check: bool = True) -> WoldDecomposition:
    """Wold-type decomposition ``H = ⊕_A H_A`` over A ⊆ {m+1..N}.

    ShiftBlock summands are handled exactly with label sets; FiniteBlock
    summands numerically (where every isometry is unitary, so H_∅ is the
    whole summand).  Raises :class:`RelationError` when the doubly twisted
    relations fail.
    """
    ops = [as_structured(o) for o in ops]
    layout = _check_layouts(ops)
    report = None
    if check:
        report = verify_twisted(ops, twists, m=m)
        if not report.ok:
            raise RelationError(
                f"operators fail the doubly twisted relations (max residual {report.max:.3e})",
                residuals=report.failures(),
            )
    for k, o in enumerate(ops, start=1):
        _check_isometric(o, f"T_{k}")
    N = len(ops)
    subsets = list(_subsets(range(m + 1, N + 1)))
    kernels = [adjoint_kernel(o, tol) for o in ops]
    per_block = []
    flags, exact = [], True
    for k, item in enumerate(layout):
        blocks = [o.blocks[k] for o in ops]
        if isinstance(item, int):
            parts, fl = numeric_wold([b.matrix for b in blocks], tol, m=m)
            parts = {A: parts.get(A, (np.zeros((item, 0)),) * 3) for A in subsets}
            flags += [f"block {k}: {f}" for f in fl]
        else:
            kern = [kr.parts[k] for kr in kernels]
            parts = {}
            for A in subsets:
                W, B, H, ex, fl = _structured_summand(blocks, A, kern, window)
                parts[A] = (W, B, H)
                exact &= ex
                flags += [f"block {k}: {f}" for f in fl]
        per_block.append(parts)
    out = {}
    for A in subsets:
        W = Subspace(tuple(pb[A][0] for pb in per_block))
        B = Subspace(tuple(pb[A][1] for pb in per_block))
        H = Subspace(tuple(pb[A][2] for pb in per_block), exact=exact)
        out[A] = WoldPart(W, B, H)
    complete, orthogonal = _check_partition(out, layout, tol)
    return WoldDecomposition(out, layout, complete, orthogonal, exact, tuple(flags), report)


def _check_partition(parts: dict, layout, tol: float) -> tuple[bool, bool]:
    complete = orthogonal = True
    keys = list(parts)
    for k, item in enumerate(layout):
        pieces = [parts[A].H.parts[k] for A in keys]
        if isinstance(item, int):
            total = sum(p.shape[1] for p in pieces)
            complete &= total == item
            for a, b in itertools.combinations(pieces, 2):
                if a.shape[1] and b.shape[1]:
                    orthogonal &= np.linalg.norm(a.conj().T @ b, 2) <= 1e3 * tol
        else:
            acc = BoxSet.empty(len(item))
            for p in pieces:
                acc = acc.union(p)
            complete &= acc.equals(universe(item))
            for a, b in itertools.combinations(pieces, 2):
                orthogonal &= a.intersect(b).is_empty()
    return bool(complete), bool(orthogonal)


# ---------------------------------------------------------------------------
# restriction and windows


def restrict(op: StructuredOp, sub: Subspace, tol: float = REL_TOL) -> FiniteBlock:
    """Matrix of ``op`` on an orthonormal basis of a finite-dimensional invariant ``sub``."""
    op = as_structured(op)
    if sub.dim == INF:
        raise ValidationError("cannot restrict to an infinite-dimensional subspace")
    mats = []
    for b, part in zip(op.blocks, sub.parts):
        if isinstance(b, ShiftBlock):
            labels = part.labels()
            index = {x: r for r, x in enumerate(labels)}
            M = np.zeros((len(labels), len(labels)), dtype=complex)
            for c, x in enumerate(labels):
                hit = b.apply(x)
                if hit is None:
                    continue
                coef, y = hit
                if y not in index:
                    raise ValidationError(
                        "subspace is not invariant under the operator", label=list(x), residual=abs(coef)
                    )
                M[index[y], c] = coef
        else:
            F = part
            M = F.conj().T @ b.matrix @ F
            res = np.linalg.norm(b.matrix @ F - F @ M, 2) if F.shape[1] else 0.0
            if res > max(tol, 1e2 * SVD_TOL):
                raise ValidationError("subspace is not invariant under the operator", residual=float(res))
        mats.append(M)
    return FiniteBlock(sla.block_diag(*mats) if mats else np.zeros((0, 0)))


def _window_labels(item, L: int) -> list:
    if isinstance(item, int):
        return [(t,) for t in range(item)]
    ranges = [range(0, L + 1) if k == "N" else range(-L, L + 1) for k in item]
    return list(itertools.product(*ranges))


def to_window(op: StructuredOp, L: int) -> tuple[sp.csr_matrix, list]:
    """Truncate to N₀ coords ≤ L and |Z coords| ≤ L; returns ``(matrix, labels)``.

    Labels are ``(block, *coords)``; images leaving the window are dropped.
    """
    op = as_structured(op)
    labels, mats = [], []
    for k, b in enumerate(op.blocks):
        lab = _window_labels(_layout_of(b), L)
        labels += [(k,) + x for x in lab]
        if isinstance(b, FiniteBlock):
            mats.append(sp.csr_matrix(b.matrix))
            continue
        index = {x: r for r, x in enumerate(lab)}
        rows, cols, vals = [], [], []
        for c, x in enumerate(lab):
            hit = b.apply(x)
            if hit is None or hit[1] not in index:
                continue
            rows.append(index[hit[1]])
            cols.append(c)
            vals.append(hit[0])
        mats.append(sp.csr_matrix((vals, (rows, cols)), shape=(len(lab), len(lab)), dtype=complex))
    return sp.block_diag(mats, format="csr"), labels


def window_interior(layout, L: int, depth: int = 1) -> np.ndarray:
    """Mask of window labels at distance ≥ depth from the cut (finite blocks always inside)."""
    mask = []
    for item in layout:
        for x in _window_labels(item, L):
            if isinstance(item, int):
                mask.append(True)
            else:
                mask.append(all(t <= L - depth and (k == "N" or t >= -L + depth) for t, k in zip(x, item)))
    return np.array(mask, dtype=bool)
