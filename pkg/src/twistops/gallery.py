"""Named example pairs as structured operators, with their expected classification.

Every fixture satisfies ``T_1* T_2 = e^{-2πiθ} T_2 T_1*`` (twist U = e^{2πiθ}).

=============  ==============================================================
toeplitz       ``S*⊗1`` and ``e^{-2πiθN}⊗S*`` on ℓ²(N₀²)
D              ``(S*)^{⊕n}`` and ``⊕ λ_i e^{-2πiθN}``
F              ``(S*)^{⊕m} ⊕ (⊕ λ_j e^{2πiθN})`` and ``(⊕ λ'_i e^{-2πiθN}) ⊕ (S*)^{⊕n}``
torus          bilateral shift and ``e^{-2πiθK}`` on ℓ²(Z)
U              direct sum of fixtures with U = e^{2πiθ_k} on the k-th
=============  ==============================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .angles import GOLDEN, SQRT2_MINUS_1, Angle, parse_angle
from .classify import DirectSum, Single, as_angle
from .errors import ValidationError
from .ktheory import k_of_class
from .structured import ShiftBlock, StructuredOp

__all__ = ["Fixture", "GallerySpec", "build", "parse_spec", "default_lambdas", "LAMBDA_OFFSET", "NAMES"]

NAMES = ("toeplitz", "D", "F", "torus", "U")

# default Λ: n-th roots of unity rotated by this (irrational) angle
LAMBDA_OFFSET = Angle.sqrt(2, Fraction(1, 10))


def default_lambdas(n: int, shift: int = 0) -> tuple:
    """``e^{2πi(k/n + √2/10 + shift/(7n))}`` for k < n, as exact angles."""
    return tuple(Angle.rational(k, n) + LAMBDA_OFFSET + Angle.rational(shift, 7 * n) for k in range(n))


def _lambda_parts(lam) -> tuple[complex, Angle]:
    if isinstance(lam, Angle):
        return 1.0, lam
    z = complex(lam)
    if abs(abs(z) - 1) > 1e-12:
        raise ValidationError(f"Λ entries must be unimodular, got {z}")
    return z, Angle()


def _check_distinct(lams, label: str) -> None:
    vals = [_lambda_parts(l)[0] * _lambda_parts(l)[1].phase(1) for l in lams]
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if abs(vals[i] - vals[j]) <= 1e-9:
                raise ValidationError(f"{label} has repeated entries {i} and {j}; entries must be pairwise distinct")


@dataclass(frozen=True, eq=False)
class GallerySpec:
    name: str
    theta: Angle = SQRT2_MINUS_1
    n: int = 1
    m: int = 1
    lambdas1: tuple = None
    lambdas2: tuple = None
    parts: tuple = ()


@dataclass(frozen=True, eq=False)
class Fixture:
    """A pair, its twist, and the expected classification and K-groups."""

    name: str
    pair: tuple
    twist: object
    expected: object
    expected_k: tuple
    spec: GallerySpec = field(default=None, repr=False)

    @property
    def theta(self) -> Angle:
        return self.spec.theta


def _shift(kinds, v, w=None, lam=1.0) -> ShiftBlock:
    z, ph = _lambda_parts(lam)
    return ShiftBlock(tuple(kinds), tuple(v), w, z, ph)


def toeplitz_pair(theta) -> tuple:
    th = as_angle(theta)
    T1 = StructuredOp((_shift("NN", (1, 0)),))
    T2 = StructuredOp((_shift("NN", (0, 1), (-th, 0)),))
    return T1, T2


def D_pair(n: int, theta, lambdas=None) -> tuple:
    th = as_angle(theta)
    lams = tuple(lambdas) if lambdas is not None else default_lambdas(n)
    if len(lams) != n or n < 1:
        raise ValidationError(f"D needs n >= 1 and exactly n Λ entries (n={n}, got {len(lams)})")
    _check_distinct(lams, "Λ")
    T1 = StructuredOp(tuple(_shift("N", (1,)) for _ in lams))
    T2 = StructuredOp(tuple(_shift("N", (0,), (-th,), l) for l in lams))
    return T1, T2


def F_pair(m: int, n: int, theta, lambdas1=None, lambdas2=None) -> tuple:
    th = as_angle(theta)
    l1 = tuple(lambdas1) if lambdas1 is not None else default_lambdas(m)
    l2 = tuple(lambdas2) if lambdas2 is not None else default_lambdas(n, shift=1)
    if m < 1 or n < 1 or len(l1) != m or len(l2) != n:
        raise ValidationError(f"F needs m, n >= 1 with matching Λ lengths (m={m}, n={n})")
    _check_distinct(l1, "Λ1")
    _check_distinct(l2, "Λ2")
    T1 = [_shift("N", (1,)) for _ in l1] + [_shift("N", (0,), (th,), l) for l in l2]
    T2 = [_shift("N", (0,), (-th,), l) for l in l1] + [_shift("N", (1,)) for _ in l2]
    return StructuredOp(tuple(T1)), StructuredOp(tuple(T2))


def torus_pair(theta) -> tuple:
    th = as_angle(theta)
    return StructuredOp((_shift("Z", (1,)),)), StructuredOp((_shift("Z", (0,), (-th,)),))


def _expected(spec: GallerySpec):
    if spec.name == "toeplitz":
        return Single("I", spec.theta)
    if spec.name == "D":
        return Single("II", spec.theta, {"n": spec.n})
    if spec.name == "F":
        return Single("III", spec.theta, {"m": spec.m, "n": spec.n})
    if spec.name == "torus":
        return Single("IV", spec.theta)
    raise ValidationError(f"no expectation for {spec.name!r}")


def build(spec) -> Fixture:
    """Construct a fixture from a :class:`GallerySpec` or a CLI string like ``D:3:sqrt2m1``."""
    if isinstance(spec, str):
        spec = parse_spec(spec)
    th = spec.theta
    if spec.name == "toeplitz":
        pair = toeplitz_pair(th)
    elif spec.name == "D":
        pair = D_pair(spec.n, th, spec.lambdas1)
    elif spec.name == "F":
        pair = F_pair(spec.m, spec.n, th, spec.lambdas1, spec.lambdas2)
    elif spec.name == "torus":
        pair = torus_pair(th)
    elif spec.name == "U":
        return _build_U(spec)
    else:
        raise ValidationError(f"unknown gallery entry {spec.name!r}; choose from {', '.join(NAMES)}")
    expected = _expected(spec)
    return Fixture(spec.name, pair, th, expected, k_of_class(expected), spec)


def _build_U(spec: GallerySpec) -> Fixture:
    if not spec.parts:
        raise ValidationError("U_twisted needs at least one component")
    fixtures = [build(p) for p in spec.parts]
    T1 = StructuredOp(tuple(b for f in fixtures for b in f.pair[0].blocks))
    T2 = StructuredOp(tuple(b for f in fixtures for b in f.pair[1].blocks))
    U = StructuredOp(
        tuple(
            ShiftBlock(b.kinds, (0,) * b.ndim, None, 1.0, f.theta)
            for f in fixtures
            for b in f.pair[0].blocks
        )
    )
    comps = []
    for f in fixtures:
        c = (f.theta, f.expected)
        if c not in comps:
            comps.append(c)
    comps.sort(key=lambda c: c[0].frac())
    expected = comps[0][1] if len(comps) == 1 else DirectSum(tuple(comps))
    return Fixture("U", (T1, T2), U, expected, k_of_class(expected), spec)


def parse_spec(text: str) -> GallerySpec:
    """Parse ``toeplitz:θ``, ``torus:θ``, ``D:n:θ``, ``F:m:n:θ`` or ``U:<spec>;<spec>...``.

    θ defaults to √2 − 1 and accepts any form understood by :func:`parse_angle`.
    """
    text = text.strip()
    head, _, rest = text.partition(":")
    head = {"toeplitz_pair": "toeplitz", "torus_pair": "torus", "U_twisted": "U"}.get(head, head)
    if head == "U":
        parts = tuple(parse_spec(p) for p in rest.split(";") if p.strip())
        return GallerySpec("U", parts[0].theta if parts else SQRT2_MINUS_1, parts=parts)
    fields = [f for f in rest.split(":")] if rest else []
    try:
        if head in ("toeplitz", "torus"):
            th = parse_angle(fields[0]) if fields else SQRT2_MINUS_1
            return GallerySpec(head, th)
        if head == "D":
            n = int(fields[0])
            th = parse_angle(fields[1]) if len(fields) > 1 else SQRT2_MINUS_1
            return GallerySpec("D", th, n=n)
        if head == "F":
            m, n = int(fields[0]), int(fields[1])
            th = parse_angle(fields[2]) if len(fields) > 2 else SQRT2_MINUS_1
            return GallerySpec("F", th, n=n, m=m)
    except (IndexError, ValueError) as exc:
        raise ValidationError(f"cannot parse gallery spec {text!r}: {exc}") from exc
    raise ValidationError(f"unknown gallery entry {head!r}; choose from {', '.join(NAMES)}")


EXAMPLE_ANGLES = {"sqrt2m1": SQRT2_MINUS_1, "golden": GOLDEN}
