"""Truncated matrix models of the Fock-type and irreducible representations.

The Hilbert space is ``K ⊗ ℓ²(Z)^{⊗m} ⊗ ℓ²(N₀)^{⊗n}`` cut down to the window
``{-L..L}`` on Z-ladders and ``{0..L}`` on N₀-ladders.  All generators act as
(matrix-valued) weighted shifts, so on labels far enough from the cut every
defining relation holds exactly; :meth:`Representation.interior` returns those
labels.  The shift convention is ``S* e_k = e_{k+1}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Number

import numpy as np
import scipy.sparse as sp

from .angles import Angle
from .errors import ValidationError
from .relations import Signature, Word, validate_word

__all__ = [
    "Truncation",
    "Representation",
    "build_fock",
    "build_scalar_rep",
    "build_irrep",
    "relation_residuals",
    "max_relation_residual",
    "faithfulness_witness",
    "apply_word",
    "word_operator",
    "clock_shift",
]

TOL = 1e-10


@dataclass(frozen=True)
class Truncation:
    """Window size ``L`` for every ladder factor."""

    L: int

    def __post_init__(self):
        if self.L < 1:
            raise ValidationError(f"truncation level must be >= 1, got {self.L}")


@dataclass(frozen=True, eq=False)
class Representation:
    """Generator matrices on a truncated tensor-product basis.

    ``labels[r]`` is ``(k, x_1, ..., x_f)``: the coefficient index followed by
    one coordinate per ladder factor, whose types are listed in ``kinds``
    (``"Z"`` or ``"N"``).
    """

    sig: Signature
    kinds: tuple
    L: int
    dim_k: int
    labels: np.ndarray
    s_mats: tuple
    u_mats: dict
    twist: dict = field(default_factory=dict)
    name: str = ""

    @property
    def dim(self) -> int:
        return self.labels.shape[0]

    def interior(self, depth: int = 1) -> np.ndarray:
        """Boolean mask of labels at distance >= ``depth`` from the window cut."""
        if depth <= 0:
            return np.ones(self.dim, dtype=bool)
        mask = np.ones(self.dim, dtype=bool)
        for f, kind in enumerate(self.kinds):
            x = self.labels[:, f + 1]
            mask &= x <= self.L - depth
            if kind == "Z":
                mask &= x >= -self.L + depth
        return mask

    def generator(self, letter) -> sp.csr_matrix:
        if letter.is_u:
            m = self.u_mats[letter.pair]
            p = letter.power
            if p < 0:
                m, p = m.conj().T.tocsr(), -p
            out = sp.identity(self.dim, dtype=complex, format="csr")
            for _ in range(p):
                out = m @ out
            return out
        m = self.s_mats[letter.index - 1]
        return m.conj().T.tocsr() if letter.star else m


def _ladder_range(kind: str, L: int) -> range:
    return range(-L, L + 1) if kind == "Z" else range(0, L + 1)


def _grid(kinds: tuple, L: int, dim_k: int) -> np.ndarray:
    ranges = [range(dim_k)] + [_ladder_range(k, L) for k in kinds]
    return np.array(list(itertools.product(*ranges)), dtype=np.int64).reshape(-1, 1 + len(kinds))


def _assemble(kinds, L, dim_k, factor, block_of) -> sp.csr_matrix:
    """Sparse matrix of ``e_k ⊗ e_x ↦ (B(x) e_k) ⊗ e_{x + δ_factor}``.

    ``block_of(x)`` returns the dim_k × dim_k block for ladder label ``x``;
    ``factor`` is the ladder index shifted (None for a diagonal operator).
    Columns whose image leaves the window are zero.
    """
    ladder = [list(_ladder_range(k, L)) for k in kinds]
    sizes = [len(r) for r in ladder]
    strides = np.cumprod([1] + sizes[::-1])[::-1][1:] if sizes else np.array([], dtype=int)
    n_ladder = int(np.prod(sizes)) if sizes else 1
    rows, cols, vals = [], [], []
    for pos, x in enumerate(itertools.product(*ladder)):
        if factor is not None:
            y = list(x)
            y[factor] += 1
            if y[factor] > L:
                continue
            tgt = pos + int(strides[factor])
        else:
            tgt = pos
        B = np.asarray(block_of(x), dtype=complex).reshape(dim_k, dim_k)
        nz_r, nz_c = np.nonzero(np.abs(B) > 0)
        for a, b in zip(nz_r, nz_c):
            rows.append(a * n_ladder + tgt)
            cols.append(b * n_ladder + pos)
            vals.append(B[a, b])
    dim = dim_k * n_ladder
    return sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=complex)


# ---------------------------------------------------------------------------
# twist normalization


def _is_scalar_twist(t) -> bool:
    return isinstance(t, (Angle, Number, Fraction)) and not isinstance(t, bool)


def _scalar_value(t) -> complex:
    if isinstance(t, Angle):
        return t.phase(1)
    return complex(t)


class _TwistPowers:
    """Integer powers U^k of the twist unitaries, exact for Angle input."""

    def __init__(self, twist: dict, dim_k: int):
        self.twist = twist
        self.dim_k = dim_k
        self._cache: dict = {}

    def power(self, pair, k: int) -> np.ndarray:
        key = (pair, k)
        if key not in self._cache:
            t = self.twist[pair]
            if isinstance(t, Angle):
                val = np.eye(self.dim_k, dtype=complex) * t.phase(k)
            elif _is_scalar_twist(t):
                val = np.eye(self.dim_k, dtype=complex) * complex(t) ** k
            else:
                U = np.asarray(t, dtype=complex)
                val = np.linalg.matrix_power(U, k) if k >= 0 else np.linalg.matrix_power(U.conj().T, -k)
            self._cache[key] = val
        return self._cache[key]

    def phase_product(self, exponents: dict) -> np.ndarray:
        """∏ U_p^{e_p}; Angle-only inputs are combined before exponentiating."""
        if all(isinstance(self.twist[p], Angle) for p in exponents):
            total = Fraction(0)
            for p, e in exponents.items():
                total += self.twist[p]._hp * e
            return np.eye(self.dim_k, dtype=complex) * np.exp(2j * np.pi * float(total % 1))
        out = np.eye(self.dim_k, dtype=complex)
        for p, e in exponents.items():
            if e:
                out = out @ self.power(p, e)
        return out


def _normalize_twist(sig: Signature, twist) -> tuple[dict, int]:
    pairs = sig.pairs
    if isinstance(twist, (Angle, Number)) and not isinstance(twist, bool):
        twist = {p: twist for p in pairs}
    twist = dict(twist)
    missing = [p for p in pairs if p not in twist]
    if missing:
        raise ValidationError(f"twist missing for pairs {missing}", missing=missing)
    dims = {np.asarray(t).shape[0] for p, t in twist.items() if not _is_scalar_twist(t)}
    if len(dims) > 1:
        raise ValidationError(f"twist matrices have inconsistent sizes {sorted(dims)}")
    dim_k = dims.pop() if dims else 1
    mats = {}
    for p in pairs:
        t = twist[p]
        if _is_scalar_twist(t):
            if not isinstance(t, Angle) and abs(abs(complex(t)) - 1) > TOL:
                raise ValidationError(f"scalar twist for {p} is not unimodular", pair=p, residual=abs(abs(complex(t)) - 1))
            mats[p] = np.eye(dim_k) * _scalar_value(t)
        else:
            U = np.asarray(t, dtype=complex)
            if U.shape != (dim_k, dim_k):
                raise ValidationError(f"twist for {p} has shape {U.shape}", pair=p)
            res = np.linalg.norm(U.conj().T @ U - np.eye(dim_k), 2)
            if res > TOL:
                raise ValidationError(f"twist for {p} is not unitary (residual {res:.3e})", pair=p, residual=res)
            mats[p] = U
    for p, q in itertools.combinations(pairs, 2):
        res = np.linalg.norm(mats[p] @ mats[q] - mats[q] @ mats[p], 2)
        if res > TOL:
            raise ValidationError(
                f"twists {p} and {q} do not commute (residual {res:.3e})", pair=[p, q], residual=res
            )
    return {p: twist[p] for p in pairs}, dim_k


# ---------------------------------------------------------------------------
# constructions


def build_fock(sig: Signature, twist, trunc: Truncation | int, name: str = "fock") -> Representation:
    """Fock-type representation with ``π(s_i) = F_i ⊗ S* ⊗ I``, ``π(u_ij) = U_ij ⊗ I``.

    ``twist`` maps each pair (i, j) to a commuting unitary on K, given as an
    :class:`Angle` (meaning e^{2πiθ}), a unimodular complex number, or a
    matrix; a single value is used for every pair.  ``F_i`` multiplies by
    ``∏_{r<i} U_ri^{-x_r}``, where x_r is the r-th ladder coordinate.
    """
    L = trunc.L if isinstance(trunc, Truncation) else Truncation(int(trunc)).L
    twist, dim_k = _normalize_twist(sig, twist)
    kinds = tuple(["Z"] * sig.m + ["N"] * sig.n)
    powers = _TwistPowers(twist, dim_k)
    s_mats = []
    for i in range(1, sig.size + 1):
        def block(x, i=i):
            return powers.phase_product({(r, i): -x[r - 1] for r in range(1, i)})
        s_mats.append(_assemble(kinds, L, dim_k, i - 1, block))
    u_mats = {p: _assemble(kinds, L, dim_k, None, lambda x, p=p: powers.power(p, 1)) for p in sig.pairs}
    labels = _grid(kinds, L, dim_k)
    return Representation(sig, kinds, L, dim_k, labels, tuple(s_mats), u_mats, twist, name)


def _theta_map(sig: Signature, theta) -> dict:
    """Accept one angle, a dict pair -> angle, or a square (skew) array."""
    if isinstance(theta, dict):
        out = {p: theta[p] for p in sig.pairs}
    elif isinstance(theta, (Angle, Number, Fraction)):
        out = {p: theta for p in sig.pairs}
    else:
        arr = theta
        out = {(i, j): arr[i - 1][j - 1] for i, j in sig.pairs}
    return {p: v if isinstance(v, Angle) else _to_angle(v) for p, v in out.items()}


def _to_angle(v) -> Angle:
    if isinstance(v, (int, Fraction)):
        return Angle.rational(Fraction(v))
    return Angle.irrational(float(v))


def build_scalar_rep(theta, trunc: Truncation | int, sig: Signature = Signature(0, 2)) -> Representation:
    """Scalar-phase Fock representation: ``T_1 = S* ⊗ 1``, ``T_2 = e^{2πiθN} ⊗ S*`` for (0, 2).

    Generator i picks up ``e^{2πiθ_ri x_r}`` from every earlier ladder r.
    These operators satisfy ``s_i* s_j = e^{2πiθ_ij} s_j s_i*``, so the
    central unitaries are represented by ``u_ij = e^{-2πiθ_ij}``.
    """
    thetas = _theta_map(sig, theta)
    rep = build_fock(sig, {p: -t for p, t in thetas.items()}, trunc, name="scalar")
    return rep


def _check_torus(rho: dict, thetas: dict, tol: float = TOL) -> None:
    idx = sorted(rho)
    for i in idx:
        R = rho[i]
        res = np.linalg.norm(R.conj().T @ R - np.eye(R.shape[0]), 2)
        if res > tol:
            raise ValidationError(f"rho(s_{i}) is not unitary (residual {res:.3e})", index=i, residual=res)
    for i, j in itertools.combinations(idx, 2):
        x = thetas[(i, j)].phase(1)
        res = np.linalg.norm(rho[i] @ rho[j] - x * rho[j] @ rho[i], 2)
        if res > tol:
            raise ValidationError(
                f"rho fails the torus relation for ({i},{j}) (residual {res:.3e})", pair=(i, j), residual=res
            )


def build_irrep(theta, sig: Signature, I, rho: dict, trunc: Truncation | int) -> Representation:
    """The irreducible representation π^Θ_{(I, ρ)} on ``K_ρ ⊗ ℓ²(N₀)^{⊗|I^c|}``.

    ``I`` must contain the unitary indices 1..m; ``rho`` maps each i in I to a
    unitary matrix (or unimodular scalar) with ``ρ_i ρ_j = e^{2πiθ_ij} ρ_j ρ_i``.
    For j_l in the complement the generator is ``S*`` on ladder l with phases
    ``e^{2πiθ_{j_l j_k} x_k}`` from later ladders k; for i in I it is
    ``ρ_i`` times ``e^{±2πiθ x_k}`` on every ladder (minus sign when i > j_k).
    """
    L = trunc.L if isinstance(trunc, Truncation) else Truncation(int(trunc)).L
    I = sorted(set(I))
    if not set(range(1, sig.m + 1)) <= set(I):
        raise ValidationError(f"I must contain the unitary indices 1..{sig.m}", I=I)
    if any(not (1 <= i <= sig.size) for i in I):
        raise ValidationError(f"I has indices outside 1..{sig.size}", I=I)
    thetas = _theta_map(sig, theta)
    rho = {i: np.atleast_2d(np.asarray(rho[i], dtype=complex)) for i in I}
    dims = {r.shape[0] for r in rho.values()}
    if len(dims) > 1:
        raise ValidationError("rho matrices have inconsistent sizes")
    dim_k = dims.pop() if dims else 1
    _check_torus(rho, thetas)
    J = [j for j in range(1, sig.size + 1) if j not in I]
    kinds = tuple("N" for _ in J)

    def theta_of(a, b):
        return thetas[(a, b)] if a < b else -thetas[(b, a)]

    def phase_block(x, weights):
        total = Fraction(0)
        for k, t in weights:
            total += t._hp * x[k]
        return np.exp(2j * np.pi * float(total % 1))

    s_mats = [None] * sig.size
    for l, j in enumerate(J):
        weights = [(k, theta_of(j, J[k])) for k in range(l + 1, len(J))]
        s_mats[j - 1] = _assemble(kinds, L, dim_k, l, lambda x, w=weights: np.eye(dim_k) * phase_block(x, w))
    for i in I:
        weights = [(k, theta_of(i, jk)) for k, jk in enumerate(J)]
        s_mats[i - 1] = _assemble(kinds, L, dim_k, None, lambda x, i=i, w=weights: rho[i] * phase_block(x, w))
    u_mats = {
        p: _assemble(kinds, L, dim_k, None, lambda x, p=p: np.eye(dim_k) * thetas[p].phase(1)) for p in sig.pairs
    }
    labels = _grid(kinds, L, dim_k)
    return Representation(sig, kinds, L, dim_k, labels, tuple(s_mats), u_mats, dict(thetas), name=f"irrep{tuple(I)}")


def clock_shift(p: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """q×q unitaries (C, S) with ``C S = e^{2πi p/q} S C``: a ρ for a rational 2-torus."""
    w = np.exp(2j * np.pi * p / q)
    C = np.diag(w ** np.arange(q))
    S = np.roll(np.eye(q), 1, axis=0)
    return C, S


# ---------------------------------------------------------------------------
# evaluation and checks


def word_operator(rep: Representation, word: Word) -> sp.csr_matrix:
    validate_word(word, rep.sig)
    out = sp.identity(rep.dim, dtype=complex, format="csr")
    for letter in reversed(word):
        out = rep.generator(letter) @ out
    return out


def apply_word(rep: Representation, word: Word) -> np.ndarray:
    """Dense matrix of the word: product of generators in letter order."""
    return word_operator(rep, word).toarray()


def _residual(M: sp.spmatrix, mask: np.ndarray) -> float:
    M = sp.csc_matrix(M)[:, np.flatnonzero(mask)]
    if M.nnz == 0:
        return 0.0
    col = np.sqrt(np.asarray(abs(M).power(2).sum(axis=0))).ravel()
    return float(col.max()) if col.size else 0.0


def faithfulness_witness(rep: Representation) -> float:
    """Operator norm of ``∏_{i>m} (1 - s_i s_i*)``."""
    Id = sp.identity(rep.dim, dtype=complex, format="csr")
    P = Id
    for i in range(rep.sig.m + 1, rep.sig.size + 1):
        S = rep.s_mats[i - 1]
        P = P @ (Id - S @ S.conj().T)
    P.eliminate_zeros()
    if P.nnz == 0:
        return 0.0
    coo = P.tocoo()
    if np.all(coo.row == coo.col):
        return float(np.abs(coo.data).max())
    A = P.toarray()
    return float(np.linalg.norm(A, 2)) if rep.dim <= 2000 else float(
        sp.linalg.svds(sp.csr_matrix(A), k=1, return_singular_vectors=False)[0]
    )


def relation_residuals(rep: Representation, depth: int = 1, use_mask: bool = True) -> dict:
    """Max over interior basis vectors v of ‖(LHS − RHS) v‖ for every defining relation.

    Keys: ``twisted(i,j)``, ``isometry(i)``, ``unitary(i)`` (i <= m),
    ``central(i;p,q)``, ``u_unitary(p,q)``, ``u_commute(p,q;r,t)``, plus the
    norm of ``∏_{i>m}(1 − s_i s_i*)`` under ``faithfulness_witness``.
    """
    sig = rep.sig
    mask = rep.interior(depth) if use_mask else np.ones(rep.dim, dtype=bool)
    Id = sp.identity(rep.dim, dtype=complex, format="csr")
    S = rep.s_mats
    Sh = [m.conj().T.tocsr() for m in S]
    U = rep.u_mats
    Uh = {p: m.conj().T.tocsr() for p, m in U.items()}
    out = {}
    for i, j in sig.pairs:
        out[f"twisted({i},{j})"] = _residual(Sh[i - 1] @ S[j - 1] - Uh[(i, j)] @ S[j - 1] @ Sh[i - 1], mask)
    for i in range(1, sig.size + 1):
        out[f"isometry({i})"] = _residual(Sh[i - 1] @ S[i - 1] - Id, mask)
    for i in range(1, sig.m + 1):
        out[f"unitary({i})"] = _residual(S[i - 1] @ Sh[i - 1] - Id, mask)
    for i in range(1, sig.size + 1):
        for p in sig.pairs:
            out[f"central({i};{p[0]},{p[1]})"] = _residual(S[i - 1] @ U[p] - U[p] @ S[i - 1], mask)
    for p in sig.pairs:
        out[f"u_unitary({p[0]},{p[1]})"] = max(
            _residual(U[p] @ Uh[p] - Id, mask), _residual(Uh[p] @ U[p] - Id, mask)
        )
    for p, q in itertools.combinations(sig.pairs, 2):
        out[f"u_commute({p[0]},{p[1]};{q[0]},{q[1]})"] = _residual(U[p] @ U[q] - U[q] @ U[p], mask)
    out["faithfulness_witness"] = faithfulness_witness(rep)
    return out


def max_relation_residual(res: dict) -> float:
    return max((v for k, v in res.items() if k != "faithfulness_witness"), default=0.0)
