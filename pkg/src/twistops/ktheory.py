"""Finitely generated abelian groups, Smith normal form, and six-term sequence solvers.

All integer arithmetic uses Python ints, so results are exact at any size.
Matrices of maps Z^a → Z^b are b × a (columns are images of generators).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import UnsupportedParameterError, ValidationError

__all__ = [
    "FgAbelian",
    "smith_normal_form",
    "coker",
    "ker_rank",
    "pv_crossed",
    "extension_solve",
    "tensor_circle",
    "k_universal",
    "k_universal_recursive",
    "k_of_class",
    "k_to_json",
    "Z",
]


@dataclass(frozen=True)
class FgAbelian:
    """``Z^rank ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k`` with ``d_1 | d_2 | ... | d_k`` and each d_i ≥ 2."""

    rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValidationError(f"rank must be nonnegative, got {self.rank}")
        tors = tuple(int(d) for d in self.torsion)
        if any(d < 2 for d in tors) or any(b % a for a, b in zip(tors, tors[1:])):
            tors = _invariant_factors(tors)
        object.__setattr__(self, "torsion", tors)

    @property
    def is_free(self) -> bool:
        return not self.torsion

    def __add__(self, other: "FgAbelian") -> "FgAbelian":
        return FgAbelian(self.rank + other.rank, _invariant_factors(self.torsion + other.torsion))

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " ⊕ ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, obj) -> "FgAbelian":
        return cls(int(obj.get("rank", 0)), tuple(obj.get("torsion", ())))


def Z(rank: int = 1) -> FgAbelian:
    return FgAbelian(rank)


def _invariant_factors(divisors) -> tuple:
    divisors = [abs(int(d)) for d in divisors if abs(int(d)) != 1]
    if not divisors:
        return ()
    n = len(divisors)
    D, _, _ = smith_normal_form([[divisors[i] if i == j else 0 for j in range(n)] for i in range(n)])
    return tuple(d for d in (D[i][i] for i in range(n)) if d > 1)


def _to_rows(M, rows: int | None = None, cols: int | None = None) -> list:
    if M is None:
        return [[0] * (cols or 0) for _ in range(rows or 0)]
    arr = np.asarray(M, dtype=object)
    if arr.size == 0:
        r = rows if rows is not None else (arr.shape[0] if arr.ndim == 2 else 0)
        c = cols if cols is not None else (arr.shape[1] if arr.ndim == 2 else 0)
        return [[0] * c for _ in range(r)]
    if arr.ndim != 2:
        raise ValidationError(f"integer matrix must be 2-D, got shape {arr.shape}")
    out = [[int(x) for x in row] for row in arr.tolist()]
    if rows is not None and len(out) != rows or cols is not None and len(out[0]) != cols:
        raise ValidationError(f"matrix shape {arr.shape} does not match expected ({rows}, {cols})")
    return out


def _identity(n: int) -> list:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(M) -> tuple[list, list, list]:
    """``(D, U, V)`` with ``U·M·V = D`` diagonal, d_1 | d_2 | ..., d_i ≥ 0, U and V unimodular."""
    A = [list(row) for row in _to_rows(M)]
    r = len(A)
    c = len(A[0]) if r else (np.asarray(M).shape[1] if np.asarray(M).ndim == 2 else 0)
    U, V = _identity(r), _identity(c)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k·row_src
        A[dst] = [a + k * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):
        for row in A:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    for t in range(min(r, c)):
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, r) for j in range(t, c) if A[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, r):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    dirty |= A[i][t] != 0
            for j in range(t + 1, c):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    dirty |= A[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return A, U, V


def _diag(D) -> list:
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def coker(M, shape: tuple | None = None) -> FgAbelian:
    """``Z^rows / im(M)``; pass ``shape`` for matrices with a zero dimension."""
    rows, cols = shape if shape is not None else np.asarray(M).shape
    return _coker_m(_map(M, rows, cols), rows, cols)


def ker_rank(M, shape: tuple | None = None) -> int:
    """Rank of ``ker(M: Z^cols → Z^rows)``, which is always free."""
    rows, cols = shape if shape is not None else np.asarray(M).shape
    return _ker_m(_map(M, rows, cols), rows, cols).rank


def _map(M, rows: int, cols: int) -> list:
    """Validated rows×cols integer matrix; ``None`` or empty means zero."""
    if M is None:
        return [[0] * cols for _ in range(rows)]
    arr = np.asarray(M, dtype=object)
    if arr.size == 0 and (rows == 0 or cols == 0):
        return [[0] * cols for _ in range(rows)]
    if arr.ndim != 2 or arr.shape != (rows, cols):
        raise ValidationError(f"map has shape {arr.shape}, expected ({rows}, {cols})", expected=[rows, cols])
    return [[int(x) for x in row] for row in arr.tolist()]


def _coker_m(M: list, rows: int, cols: int) -> FgAbelian:
    if rows == 0:
        return FgAbelian()
    if cols == 0 or not any(any(row) for row in M):
        return FgAbelian(rows)
    D, _, _ = smith_normal_form(M)
    d = [x for x in _diag(D) if x]
    return FgAbelian(rows - len(d), tuple(x for x in d if x > 1))


def _ker_m(M: list, rows: int, cols: int) -> FgAbelian:
    if cols == 0:
        return FgAbelian()
    if rows == 0 or not any(any(row) for row in M):
        return FgAbelian(cols)
    D, _, _ = smith_normal_form(M)
    return FgAbelian(cols - sum(1 for x in _diag(D) if x))


def _require_free(*groups) -> None:
    for g in groups:
        if not g.is_free:
            raise UnsupportedParameterError("sequence solvers accept torsion-free groups only", group=str(g))


def pv_crossed(K0: FgAbelian, K1: FgAbelian, a0=None, a1=None) -> tuple[FgAbelian, FgAbelian]:
    """K-groups of ``A ⋊ Z`` from the Pimsner–Voiculescu sequence.

    ``a_i`` is the matrix of ``id − α⁻¹_*`` on ``K_i(A)`` (``None`` for zero).
    ``K_i(A ⋊ Z) = coker(a_i) ⊕ ker(a_{1−i})``; the sum splits since kernels are free.
    """
    _require_free(K0, K1)
    A0 = _map(a0, K0.rank, K0.rank) if a0 is not None else []
    A1 = _map(a1, K1.rank, K1.rank) if a1 is not None else []
    r0, r1 = K0.rank, K1.rank
    return (
        _coker_m(A0, r0, r0) + _ker_m(A1, r1, r1),
        _coker_m(A1, r1, r1) + _ker_m(A0, r0, r0),
    )


def tensor_circle(K0: FgAbelian, K1: FgAbelian) -> tuple[FgAbelian, FgAbelian]:
    """``K(B ⊗ C(T))`` as a PV step with trivial action."""
    return pv_crossed(K0, K1)


def extension_solve(K_ideal, K_quotient, delta=None, exp=None) -> tuple[FgAbelian, FgAbelian]:
    """K-groups of the middle term E in ``0 → I → E → Q → 0``.

    ``delta: K_1(Q) → K_0(I)`` (index map) and ``exp: K_0(Q) → K_1(I)``.
    ``K_0(E) = coker(δ) ⊕ ker(exp)``, ``K_1(E) = coker(exp) ⊕ ker(δ)``.
    """
    I0, I1 = K_ideal
    Q0, Q1 = K_quotient
    _require_free(I0, I1, Q0, Q1)
    D = _map(delta, I0.rank, Q1.rank)
    X = _map(exp, I1.rank, Q0.rank)
    return (
        _coker_m(D, I0.rank, Q1.rank) + _ker_m(X, I1.rank, Q0.rank),
        _coker_m(X, I1.rank, Q0.rank) + _ker_m(D, I0.rank, Q1.rank),
    )


def k_universal(m: int, n: int) -> tuple[FgAbelian, FgAbelian]:
    """Closed form for the universal algebra on m unitaries and n isometries."""
    if m < 0 or n < 0 or m + n < 1:
        raise ValidationError(f"need m + n >= 1, got (m, n) = ({m}, {n})")
    if (m, n) == (1, 0):
        return Z(1), Z(1)
    if (m, n) == (0, 1):
        return Z(1), Z(0)
    r = 2 ** (m + comb(m + n, 2) - 1)
    return Z(r), Z(r)


def k_universal_recursive(m: int, n: int, order: str | None = None) -> tuple[FgAbelian, FgAbelian]:
    """Structural recursion starting from K(C) = (Z, 0).

    Each new generator first tensors with one circle per existing generator
    (the new central unitaries), then either takes a crossed product by Z
    (a unitary) or a Toeplitz extension (an isometry), whose K-groups equal
    those of the coefficient algebra.  ``order`` is a string over {"u", "s"}
    fixing the insertion order; by default unitaries come first.
    """
    if m < 0 or n < 0 or m + n < 1:
        raise ValidationError(f"need m + n >= 1, got (m, n) = ({m}, {n})")
    order = order or "u" * m + "s" * n
    if sorted(order) != sorted("u" * m + "s" * n):
        raise ValidationError(f"order {order!r} does not list {m} unitaries and {n} isometries")
    K = (Z(1), Z(0))
    for size, step in enumerate(order):
        for _ in range(size):
            K = tensor_circle(*K)
        if step == "u":
            K = pv_crossed(*K)
    return K


def _k_single(kind: str, params: dict) -> tuple[FgAbelian, FgAbelian]:
    if kind == "I":
        return Z(1), Z(0)
    if kind == "II":
        n = int(params["n"])
        delta = [[1, 0] for _ in range(n)]
        return extension_solve((Z(n), Z(0)), (Z(2), Z(2)), delta, None)
    if kind == "III":
        m, n = int(params["m"]), int(params["n"])
        delta = [[1, 0]] * m + [[0, 1]] * n
        return extension_solve((Z(m + n), Z(0)), (Z(2), Z(2)), delta, None)
    if kind == "IV":
        return pv_crossed(Z(1), Z(1))
    raise ValidationError(f"unknown type {kind!r}")


def k_of_class(result) -> tuple[FgAbelian, FgAbelian]:
    """K-groups for a classification result (Single or DirectSum)."""
    if getattr(result, "kind", "single") == "direct_sum":
        K0, K1 = FgAbelian(), FgAbelian()
        for _, comp in result.components:
            a, b = k_of_class(comp)
            K0, K1 = K0 + a, K1 + b
        return K0, K1
    return _k_single(result.type, dict(result.params))


def k_to_json(K) -> dict:
    return {"k0": K[0].to_json(), "k1": K[1].to_json()}
