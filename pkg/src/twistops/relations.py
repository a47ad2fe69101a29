"""Symbolic words in the generators s_1..s_{m+n}, u_ij and their normal forms.

Generators ``s_1..s_m`` are unitaries, ``s_{m+1}..s_{m+n}`` isometries, and the
``u_ij`` (i < j) are central unitaries.  The defining relations are

    s_i* s_j = u_ij* s_j s_i*      (i < j)
    s_i* s_i = 1,   s_i s_i* = 1 for i <= m,
    u_ij central and unitary.

They imply ``s_i^a s_j^b = u_ij^{ab} s_j^b s_i^a`` for i < j and a, b in {+1, -1}
where ``s^{-1}`` is read as ``s*``.  Every word therefore rewrites to

    ∏ u_ij^{c_ij} · s_1^{α_1} ... s_N^{α_N} · (s_1*)^{β_1} ... (s_N*)^{β_N}

with α_i ∈ Z for unitary indices, α_i, β_i ∈ N₀ for isometries and β_i = 0 for
unitaries.  Phases are integer exponent vectors; nothing here touches floats.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from itertools import combinations

from .errors import ValidationError

__all__ = [
    "Signature",
    "Letter",
    "Word",
    "NormalWord",
    "parse_word",
    "format_word",
    "normal_form",
    "rewrite",
    "adjoint",
    "adjoint_normal",
    "words_equal",
    "monomial_word",
    "multiply",
    "random_word",
]


@dataclass(frozen=True)
class Signature:
    """``m`` unitary and ``n`` isometric generators.

    ``twist_mode`` is ``"central"`` when the u_ij are formal central unitaries
    and ``"scalar"`` when they stand for fixed phases x_ij; the symbolic
    calculus is the same in both modes.
    """

    m: int
    n: int
    twist_mode: str = "central"

    def __post_init__(self):
        if self.m < 0 or self.n < 0 or self.m + self.n < 1:
            raise ValidationError(f"need m, n >= 0 and m + n >= 1, got ({self.m}, {self.n})")
        if self.twist_mode not in ("central", "scalar"):
            raise ValidationError(f"twist_mode must be 'central' or 'scalar', got {self.twist_mode!r}")

    @property
    def size(self) -> int:
        return self.m + self.n

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(combinations(range(1, self.size + 1), 2))

    def is_unitary(self, i: int) -> bool:
        return i <= self.m

    @classmethod
    def parse(cls, text: str) -> "Signature":
        try:
            m, n = (int(t) for t in text.split(","))
        except ValueError as exc:
            raise ValidationError(f"signature must look like 'm,n', got {text!r}") from exc
        return cls(m, n)


@dataclass(frozen=True)
class Letter:
    """One letter: ``s_i`` / ``s_i*`` (``pair is None``) or ``u_ij^{power}``."""

    index: int = 0
    star: bool = False
    pair: tuple[int, int] | None = None
    power: int = 1

    @property
    def is_u(self) -> bool:
        return self.pair is not None

    def __str__(self) -> str:
        if self.is_u:
            i, j = self.pair
            return f"u{i}{j}" if self.power == 1 else f"u{i}{j}^{self.power}"
        return f"s{self.index}*" if self.star else f"s{self.index}"


Word = tuple  # tuple[Letter, ...]


def s(i: int, star: bool = False) -> Letter:
    return Letter(index=i, star=star)


def u(i: int, j: int, power: int = 1) -> Letter:
    return Letter(pair=(i, j), power=power)


_TOKEN_RE = re.compile(r"^(?:s(\d+)(\*?)|u(\d+)(?:,(\d+))?(?:\^(-?\d+))?)$")


def parse_word(text: str, sig: Signature | None = None) -> Word:
    """Parse ``"s1* s2 u12^-1"``.  An empty string is the identity word.

    ``u`` tokens name a pair by two digits (``u12``) or comma-separated
    indices (``u1,12``) for indices above 9.
    """
    letters = []
    for tok in text.split():
        m = _TOKEN_RE.match(tok)
        if not m:
            raise ValidationError(f"bad token {tok!r}", token=tok)
        if m.group(1) is not None:
            letters.append(Letter(index=int(m.group(1)), star=bool(m.group(2))))
        else:
            if m.group(4) is not None:
                i, j = int(m.group(3)), int(m.group(4))
            else:
                digits = m.group(3)
                if len(digits) != 2:
                    raise ValidationError(f"ambiguous pair in {tok!r}; write u<i>,<j>", token=tok)
                i, j = int(digits[0]), int(digits[1])
            if i >= j:
                raise ValidationError(f"u_ij needs i < j, got {tok!r}", token=tok)
            power = int(m.group(5)) if m.group(5) is not None else 1
            letters.append(Letter(pair=(i, j), power=power))
    word = tuple(letters)
    if sig is not None:
        validate_word(word, sig)
    return word


def format_word(word: Word) -> str:
    return " ".join(str(x) for x in word)


def validate_word(word: Word, sig: Signature) -> None:
    N = sig.size
    for x in word:
        if x.is_u:
            i, j = x.pair
            if not (1 <= i < j <= N):
                raise ValidationError(f"u_{i}{j} is not a generator for signature ({sig.m},{sig.n})", letter=str(x))
        elif not (1 <= x.index <= N):
            raise ValidationError(f"s_{x.index} is not a generator for signature ({sig.m},{sig.n})", letter=str(x))


@dataclass(frozen=True)
class NormalWord:
    """Canonical form ``∏u^c · s^α · (s*)^β``.

    ``twist`` is a sorted tuple of ((i, j), c) with nonzero c.  ``zero`` is
    reserved for arithmetic extensions; :func:`normal_form` never produces it.
    """

    twist: tuple
    alpha: tuple
    beta: tuple
    zero: bool = False

    @property
    def twist_dict(self) -> dict:
        return dict(self.twist)

    @property
    def is_identity(self) -> bool:
        return not self.zero and not self.twist and not any(self.alpha) and not any(self.beta)

    def to_json(self) -> dict:
        return {
            "twist": {f"({i},{j})": c for (i, j), c in self.twist},
            "alpha": list(self.alpha),
            "beta": list(self.beta),
        }


def _freeze(c: dict, alpha: list, beta: list) -> NormalWord:
    return NormalWord(tuple(sorted((k, v) for k, v in c.items() if v != 0)), tuple(alpha), tuple(beta))


def _bump(c: dict, i: int, j: int, amount: int) -> None:
    if amount:
        key = (i, j) if i < j else (j, i)
        c[key] = c.get(key, 0) + amount


def _append(c: dict, alpha: list, beta: list, letter: Letter, sig: Signature) -> None:
    """Right-multiply the normal form (c, α, β) by one letter, in place."""
    N = sig.size
    if letter.is_u:
        _bump(c, *letter.pair, letter.power)
        return
    k = letter.index
    if letter.star and not sig.is_unitary(k):
        # s_i* s_k* = u_ki^{-1} s_k* s_i* for k < i
        for i in range(k + 1, N + 1):
            _bump(c, k, i, -beta[i - 1])
        beta[k - 1] += 1
        return
    e = -1 if letter.star else 1
    # pass s_k^e leftwards through (s_N*)^{β_N}, ..., (s_1*)^{β_1}
    for i in range(N, 0, -1):
        b = beta[i - 1]
        if not b:
            continue
        if i == k:
            beta[k - 1] -= 1
            return
        # s_i^{-1} s_k^e: phase u^{-e} per copy if i < k, u^{+e} if i > k
        _bump(c, i, k, -e * b if i < k else e * b)
    # pass through s_i^{α_i} for i > k
    for i in range(N, k, -1):
        _bump(c, k, i, -e * alpha[i - 1])
    alpha[k - 1] += e


def normal_form(word: Word, sig: Signature) -> NormalWord:
    """Canonical form of ``word`` in C^{m,n}_X.

    >>> sig = Signature(0, 2)
    >>> normal_form(parse_word("s1* s2"), sig).to_json()
    {'twist': {'(1,2)': -1}, 'alpha': [0, 1], 'beta': [1, 0]}
    """
    validate_word(word, sig)
    c: dict = {}
    alpha = [0] * sig.size
    beta = [0] * sig.size
    for letter in word:
        _append(c, alpha, beta, letter, sig)
    return _freeze(c, alpha, beta)


def multiply(a: NormalWord, b: NormalWord, sig: Signature) -> NormalWord:
    """Product of two normal forms, itself in normal form."""
    return normal_form(monomial_word(a) + monomial_word(b), sig)


def monomial_word(nw: NormalWord) -> Word:
    """The canonical word ``u^c s^α (s*)^β`` as a letter sequence."""
    letters = [Letter(pair=p, power=cc) for p, cc in nw.twist]
    for i, a in enumerate(nw.alpha, start=1):
        letters.extend([Letter(index=i, star=a < 0)] * abs(a))
    for i, b in enumerate(nw.beta, start=1):
        letters.extend([Letter(index=i, star=True)] * b)
    return tuple(letters)


def adjoint(word: Word) -> Word:
    """Formal adjoint: reverse, toggle stars, invert u-powers."""
    out = []
    for x in reversed(word):
        if x.is_u:
            out.append(Letter(pair=x.pair, power=-x.power))
        else:
            out.append(Letter(index=x.index, star=not x.star))
    return tuple(out)


def adjoint_normal(nw: NormalWord, sig: Signature) -> NormalWord:
    """Normal form of the adjoint of a normal word."""
    return normal_form(adjoint(monomial_word(nw)), sig)


def words_equal(w1: Word, w2: Word, sig: Signature) -> bool:
    return normal_form(w1, sig) == normal_form(w2, sig)


# ---------------------------------------------------------------------------
# Local rewriting system.  Used as an independent route to the normal form:
# any order of rule application must end in the same canonical word.


def _rank(x: Letter, sig: Signature) -> tuple[int, int]:
    # positive letters (incl. unitary stars) first, then isometry stars; ascending index
    if x.star and not sig.is_unitary(x.index):
        return (1, x.index)
    return (0, x.index)


def _redexes(letters: list, sig: Signature) -> list[int]:
    """Positions p such that the pair (letters[p], letters[p+1]) can be rewritten."""
    out = []
    for p in range(len(letters) - 1):
        x, y = letters[p], letters[p + 1]
        if y.is_u and not x.is_u:
            out.append(p)
        elif x.is_u and y.is_u:
            if x.pair > y.pair or x.pair == y.pair:
                out.append(p)
        elif not x.is_u and not y.is_u:
            if x.index == y.index and x.star != y.star:
                if x.star or sig.is_unitary(x.index):
                    out.append(p)
            elif _rank(x, sig) > _rank(y, sig):
                out.append(p)
    return out


def _fire(letters: list, p: int, sig: Signature) -> list:
    x, y = letters[p], letters[p + 1]
    if y.is_u and not x.is_u:
        return letters[:p] + [y, x] + letters[p + 2:]
    if x.is_u and y.is_u:
        if x.pair == y.pair:
            merged = [Letter(pair=x.pair, power=x.power + y.power)] if x.power + y.power else []
            return letters[:p] + merged + letters[p + 2:]
        return letters[:p] + [y, x] + letters[p + 2:]
    if x.index == y.index:
        return letters[:p] + letters[p + 2:]
    # swap x y -> phase * y x using s_i^a s_j^b = u_ij^{ab} s_j^b s_i^a (i < j)
    a = -1 if x.star else 1
    b = -1 if y.star else 1
    i, j = x.index, y.index
    power = a * b if i < j else -a * b
    pair = (i, j) if i < j else (j, i)
    return [Letter(pair=pair, power=power)] + letters[:p] + [y, x] + letters[p + 2:]


def rewrite(word: Word, sig: Signature, rng: random.Random | None = None) -> NormalWord:
    """Normal form by local rewriting; picks redexes at random if ``rng`` is given."""
    validate_word(word, sig)
    letters = list(word)
    while True:
        red = _redexes(letters, sig)
        if not red:
            break
        p = rng.choice(red) if rng is not None else red[0]
        letters = _fire(letters, p, sig)
    c: dict = {}
    alpha = [0] * sig.size
    beta = [0] * sig.size
    for x in letters:
        if x.is_u:
            c[x.pair] = c.get(x.pair, 0) + x.power
        elif x.star and not sig.is_unitary(x.index):
            beta[x.index - 1] += 1
        else:
            alpha[x.index - 1] += -1 if x.star else 1
    return _freeze(c, alpha, beta)


def random_word(sig: Signature, length: int, rng: random.Random, with_u: bool = True) -> Word:
    """Uniform random word of the given length over s_i, s_i* (and u_ij^{±1})."""
    alphabet = [Letter(index=i, star=st) for i in range(1, sig.size + 1) for st in (False, True)]
    if with_u:
        alphabet += [Letter(pair=p, power=e) for p in sig.pairs for e in (1, -1)]
    return tuple(rng.choice(alphabet) for _ in range(length))
