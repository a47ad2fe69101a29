"""Joint spectra, eigenprojections and multiplicities of commuting unitary matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import ValidationError

__all__ = [
    "JointSpectrum",
    "cluster_circle",
    "joint_spectrum",
    "spectral_projections",
    "universal_tuple_report",
    "angle_of",
]

DEFAULT_TOL = 1e-8


def angle_of(z: complex) -> float:
    """Fraction of a full turn in [0, 1)."""
    t = (np.angle(z) / (2 * np.pi)) % 1.0
    return 0.0 if t >= 1.0 else float(t)


def cluster_circle(values, tol: float) -> list[list[int]]:
    """Single-linkage clusters of unit-circle points at chordal distance ≤ tol.

    Returns index lists ordered by the angle of each cluster's first member.
    """
    values = np.asarray(values, dtype=complex)
    if values.size == 0:
        return []
    order = sorted(range(len(values)), key=lambda k: angle_of(values[k]))
    clusters = [[order[0]]]
    for a, b in zip(order, order[1:]):
        if abs(values[a] - values[b]) <= tol:
            clusters[-1].append(b)
        else:
            clusters.append([b])
    if len(clusters) > 1 and abs(values[order[-1]] - values[order[0]]) <= tol:
        clusters[0] = clusters.pop() + clusters[0]
    return clusters


def _snap(z: np.ndarray) -> np.ndarray:
    mod = np.abs(z)
    return np.where(mod > 0, z / np.where(mod > 0, mod, 1), 1.0 + 0j)


def _mean_point(z: np.ndarray) -> complex:
    m = np.mean(z)
    return complex(m / abs(m)) if abs(m) > 0 else complex(z[0])


def _check_family(U_list, tol: float) -> list:
    mats = [np.atleast_2d(np.asarray(U, dtype=complex)) for U in U_list]
    if not mats:
        raise ValidationError("need at least one matrix")
    d = mats[0].shape[0]
    for k, U in enumerate(mats):
        if U.shape != (d, d):
            raise ValidationError(f"matrix {k} has shape {U.shape}, expected ({d}, {d})", index=k)
        res = np.linalg.norm(U.conj().T @ U - np.eye(d), 2)
        if res > tol:
            raise ValidationError(f"matrix {k} is not unitary (residual {res:.3e})", index=k, residual=float(res))
    for a in range(len(mats)):
        for b in range(a + 1, len(mats)):
            res = np.linalg.norm(mats[a] @ mats[b] - mats[b] @ mats[a], 2)
            if res > tol:
                raise ValidationError(
                    f"matrices {a} and {b} do not commute (residual {res:.3e})", pair=[a, b], residual=float(res)
                )
    return mats


@dataclass(frozen=True, eq=False)
class JointSpectrum:
    """Joint eigenvalue tuples with multiplicities and orthogonal eigenprojections."""

    points: tuple
    multiplicity: dict
    projections: dict
    frames: dict

    @property
    def dim(self) -> int:
        return sum(self.multiplicity.values())

    def to_json(self) -> dict:
        return {
            "points": [[angle_of(z) for z in p] for p in self.points],
            "multiplicities": [self.multiplicity[p] for p in self.points],
        }


def joint_spectrum(U_list, tol: float = DEFAULT_TOL) -> JointSpectrum:
    """Simultaneous eigenspaces of commuting unitaries by iterated refinement.

    Each matrix is compressed to every current joint eigenspace, brought to
    complex Schur form (diagonal for a normal matrix), and the snapped
    eigenvalues are clustered at ``tol``.
    """
    mats = _check_family(U_list, max(tol, 1e-10))
    d = mats[0].shape[0]
    blocks = [((), np.eye(d, dtype=complex))]
    for U in mats:
        refined = []
        for point, Q in blocks:
            M = Q.conj().T @ U @ Q
            T, Z = sla.schur(M, output="complex")
            ev = _snap(np.diag(T))
            for idx in cluster_circle(ev, tol):
                refined.append((point + (_mean_point(ev[idx]),), Q @ Z[:, idx]))
        blocks = refined
    blocks.sort(key=lambda b: tuple(angle_of(z) for z in b[0]))
    points = tuple(p for p, _ in blocks)
    return JointSpectrum(
        points,
        {p: Q.shape[1] for p, Q in blocks},
        {p: Q @ Q.conj().T for p, Q in blocks},
        {p: Q for p, Q in blocks},
    )


def spectral_projections(U, tol: float = DEFAULT_TOL) -> list[tuple[complex, np.ndarray]]:
    """``[(λ_i, P_i)]`` with orthogonal P_i summing to I and Σ λ_i P_i = U."""
    js = joint_spectrum([U], tol)
    return [(p[0], js.projections[p]) for p in js.points]


def universal_tuple_report(U_list, tol: float = DEFAULT_TOL) -> dict:
    """Check the infinite-multiplicity criterion for a finite commuting family.

    A finite-dimensional space always has finite multiplicities, so the
    criterion fails; the report gives the minimum multiplicity.  It also tests
    whether any pair of isometries twisted by each U can exist at all: on a
    finite-dimensional space isometries are unitary, ``T_1T_2 = U T_2T_1``
    forces ``det U = 1``.
    """
    js = joint_spectrum(U_list, tol)
    mults = [js.multiplicity[p] for p in js.points]
    dets = [complex(np.linalg.det(np.atleast_2d(np.asarray(U, dtype=complex)))) for U in U_list]
    exists = all(abs(dv - 1) <= math.sqrt(tol) for dv in dets)
    return {
        "criterion": "M_U(X) = infinity",
        "verdict": "criterion fails: finite multiplicity",
        "satisfied": False,
        "dim": js.dim,
        "min_multiplicity": min(mults),
        "spectrum": js.to_json(),
        "finite_dim_tuple_exists": exists,
        "existence_note": (
            "det U = 1 holds for every twist, so unitary pairs are not excluded by the determinant test"
            if exists
            else "no pair of isometries on this finite-dimensional space satisfies the twisted relation: "
            "it would force det U = 1"
        ),
        "determinants": [[dv.real, dv.imag] for dv in dets],
    }
