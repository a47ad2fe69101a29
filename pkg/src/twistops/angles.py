"""Rotation angles measured in full turns (θ stands for the phase e^{2πiθ}).

An :class:`Angle` is either exactly rational, an exact rational combination of
square roots of squarefree integers and π (``offset + Σ c_k · ξ_k``), or a bare
real number the caller *declares* irrational.  The first two admit exact
``θ ≡ ±θ' (mod 1)`` decisions because ``{1, √2, √3, √5, √6, ..., π}`` is
linearly independent over Q; the last one falls back to a float comparison.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

__all__ = ["Angle", "parse_angle", "GOLDEN", "SQRT2_MINUS_1"]

_PRECISION = 50  # decimal digits of the rational surrogate used for k·θ mod 1

_SQRT_RE = re.compile(r"^sqrt(\d+)$")


def _squarefree(k: int) -> bool:
    if k < 2:
        return False
    d = 2
    while d * d <= k:
        if k % (d * d) == 0:
            return False
        d += 1
    return True


def _basis_value(name: str) -> mpmath.mpf:
    if name == "pi":
        return mpmath.pi
    m = _SQRT_RE.match(name)
    if not m:
        raise ValueError(f"unknown irrational basis element {name!r}")
    return mpmath.sqrt(int(m.group(1)))


def _check_basis(name: str) -> None:
    if name == "pi":
        return
    m = _SQRT_RE.match(name)
    if not m or not _squarefree(int(m.group(1))):
        raise ValueError(f"basis element must be 'pi' or 'sqrtN' with N squarefree, got {name!r}")


@dataclass(frozen=True)
class Angle:
    """θ = offset + Σ coeff·basis, or a declared-irrational real ``approx``.

    Examples
    --------
    >>> Angle.rational(1, 4).is_rational
    True
    >>> SQRT2_MINUS_1.equal_mod1(Angle.rational(1) - SQRT2_MINUS_1, sign=-1)
    (True, True)
    """

    offset: Fraction = Fraction(0)
    coeffs: tuple = ()
    approx: float | None = None
    _hp: Fraction = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "offset", Fraction(self.offset))
        cleaned = {}
        for name, c in self.coeffs:
            _check_basis(name)
            cleaned[name] = cleaned.get(name, Fraction(0)) + Fraction(c)
        coeffs = tuple(sorted((k, v) for k, v in cleaned.items() if v != 0))
        object.__setattr__(self, "coeffs", coeffs)
        if self.approx is not None:
            if coeffs or self.offset != 0:
                raise ValueError("a numeric angle carries neither offset nor coefficients")
            object.__setattr__(self, "approx", float(self.approx))
        with mpmath.workdps(_PRECISION + 10):
            if self.approx is not None:
                val = mpmath.mpf(self.approx)
            else:
                val = mpmath.mpf(self.offset.numerator) / self.offset.denominator
                for name, c in coeffs:
                    val += mpmath.mpf(c.numerator) / c.denominator * _basis_value(name)
            hp = Fraction(mpmath.nstr(val, _PRECISION, strip_zeros=False, min_fixed=-math.inf, max_fixed=math.inf))
        object.__setattr__(self, "_hp", hp)

    # construction helpers
    @classmethod
    def rational(cls, p, q=1) -> "Angle":
        return cls(offset=Fraction(p, q))

    @classmethod
    def irrational(cls, x: float) -> "Angle":
        """A real number only known numerically, declared irrational by the caller."""
        return cls(approx=float(x))

    @classmethod
    def sqrt(cls, k: int, coeff=1, offset=0) -> "Angle":
        return cls(offset=Fraction(offset), coeffs=((f"sqrt{k}", Fraction(coeff)),))

    # predicates
    @property
    def is_rational(self) -> bool:
        return self.approx is None and not self.coeffs

    @property
    def is_exact(self) -> bool:
        return self.approx is None

    @property
    def is_irrational(self) -> bool:
        return not self.is_rational

    # arithmetic
    def __neg__(self) -> "Angle":
        if self.approx is not None:
            return Angle(approx=-self.approx)
        return Angle(-self.offset, tuple((n, -c) for n, c in self.coeffs))

    def __add__(self, other) -> "Angle":
        other = _as_angle(other)
        if self.approx is not None or other.approx is not None:
            return Angle(approx=float(self) + float(other))
        return Angle(self.offset + other.offset, self.coeffs + other.coeffs)

    __radd__ = __add__

    def __sub__(self, other) -> "Angle":
        return self + (-_as_angle(other))

    def __rsub__(self, other) -> "Angle":
        return _as_angle(other) + (-self)

    def __mul__(self, k) -> "Angle":
        k = Fraction(k)
        if self.approx is not None:
            return Angle(approx=self.approx * float(k))
        return Angle(self.offset * k, tuple((n, c * k) for n, c in self.coeffs))

    __rmul__ = __mul__

    def __float__(self) -> float:
        return float(self._hp)

    # mod-1 arithmetic
    def frac(self, k: int = 1) -> float:
        """Fractional part of k·θ in [0, 1), reduced before rounding to float."""
        return float((self._hp * k) % 1)

    def phase(self, k: int = 1) -> complex:
        """e^{2πi kθ}, with kθ reduced mod 1 first."""
        return cmath.exp(2j * math.pi * self.frac(k))

    def reduced(self) -> "Angle":
        """Representative with fractional value in [0, 1)."""
        if self.approx is not None:
            return Angle(approx=self.frac())
        return self - math.floor(self._hp)

    def equal_mod1(self, other: "Angle", sign: int = 1, tol: float = 1e-12) -> tuple[bool, bool]:
        """Decide θ ≡ sign·θ' (mod 1).  Returns ``(verdict, exact)``."""
        other = _as_angle(other)
        diff = self - other * sign
        if diff.is_exact:
            return (not diff.coeffs and diff.offset.denominator == 1), True
        f = diff.frac()
        return (min(f, 1.0 - f) <= tol), False

    # text forms
    def __str__(self) -> str:
        if self.approx is not None:
            return repr(self.approx)
        parts = []
        if self.offset != 0 or not self.coeffs:
            parts.append(str(self.offset))
        for name, c in self.coeffs:
            if c == 1:
                term = name
            elif c == -1:
                term = "-" + name
            elif c.denominator == 1:
                term = f"{c.numerator}*{name}"
            elif abs(c.numerator) == 1:
                term = f"{'-' if c < 0 else ''}{name}/{c.denominator}"
            else:
                term = f"{c.numerator}*{name}/{c.denominator}"
            parts.append(term)
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out

    def to_json(self) -> dict:
        if self.is_rational:
            return {"rational": [self.offset.numerator, self.offset.denominator]}
        out = {"real": float(self), "irrational": True}
        if self.is_exact:
            out["exact"] = str(self)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Angle":
        if "rational" in obj:
            p, q = obj["rational"]
            return cls.rational(p, q)
        if "exact" in obj:
            return parse_angle(obj["exact"])
        if not obj.get("irrational", False):
            raise ValueError("real angles must be declared irrational")
        return cls.irrational(obj["real"])


def _as_angle(x) -> Angle:
    if isinstance(x, Angle):
        return x
    if isinstance(x, (int, Fraction)):
        return Angle(offset=Fraction(x))
    raise TypeError(f"cannot combine Angle with {type(x).__name__}")


SQRT2_MINUS_1 = Angle.sqrt(2, 1, -1)
GOLDEN = Angle(offset=Fraction(-1, 2), coeffs=(("sqrt5", Fraction(1, 2)),))  # (√5 − 1)/2

_NAMED = {
    "sqrt2m1": SQRT2_MINUS_1,
    "golden": GOLDEN,
    "phi": GOLDEN,
}

_TERM_RE = re.compile(
    r"""^(?P<num>\d+(?:\.\d+)?)?\*?(?P<atom>sqrt\d+|pi)?(?:/(?P<den>\d+))?$"""
)


def parse_angle(text: str, declare_irrational: bool = False) -> Angle:
    """Parse an angle given in turns.

    Accepted forms: named constants (``sqrt2m1``, ``golden``), rationals
    (``1/3``, ``0.25``), and sums of terms like ``sqrt2-1``, ``(sqrt5-1)/2`` is
    written ``sqrt5/2-1/2``, ``2*pi/7``.  A plain decimal is read as the exact
    rational it denotes unless ``declare_irrational`` is set, in which case it
    becomes a numeric irrational angle.
    """
    s = text.strip().replace(" ", "")
    if s in _NAMED:
        return _NAMED[s]
    if declare_irrational and re.fullmatch(r"[+-]?\d*\.?\d+(e[+-]?\d+)?", s):
        return Angle.irrational(float(s))
    if not s:
        raise ValueError("empty angle")
    terms = re.findall(r"[+-]?[^+-]+", s)
    if "".join(terms) != s:
        raise ValueError(f"cannot parse angle {text!r}")
    offset = Fraction(0)
    coeffs = []
    for t in terms:
        sgn = -1 if t.startswith("-") else 1
        body = t.lstrip("+-")
        m = _TERM_RE.match(body)
        if not m or (m.group("num") is None and m.group("atom") is None):
            raise ValueError(f"cannot parse angle term {t!r} in {text!r}")
        c = Fraction(m.group("num")) if m.group("num") else Fraction(1)
        if m.group("den"):
            c /= int(m.group("den"))
        if m.group("atom"):
            coeffs.append((m.group("atom"), sgn * c))
        else:
            offset += sgn * c
    angle = Angle(offset, tuple(coeffs))
    if declare_irrational and angle.is_rational:
        raise ValueError(f"{text!r} is rational but was declared irrational")
    return angle
