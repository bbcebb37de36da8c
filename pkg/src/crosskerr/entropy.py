"""Atomic reduced density matrix and its von Neumann entropy.

The atom starts in a pure product state with the field, so the atomic entropy
equals the field entropy and measures atom-field entanglement.  Eigenvalues of
the 3x3 matrix come from the trigonometric solution of its characteristic
cubic ``l^3 + b0 l^2 + b1 l + b2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import AtomFieldState, CouplingConfig, evolve_grid
from .errors import IntegrityError
from .states import TwoModeAmplitudes

__all__ = [
    "CubicCoefficients",
    "atomic_density_matrix",
    "density_matrices",
    "cubic_coefficients",
    "cubic_eigenvalues",
    "von_neumann_entropy",
    "entropy_from_eigenvalues",
    "entropy_trace",
]

# spread of the spectrum below which the trigonometric form is abandoned
DEGENERATE_RADICAND = 1e-14
# arccos loses half the digits this close to +-1 (a doubly degenerate pair)
ARCCOS_EDGE = 1e-8
NEGATIVE_LIMIT = 1e-8


@dataclass(frozen=True)
class CubicCoefficients:
    b0: float
    b1: float
    b2: float


def density_matrices(components: np.ndarray) -> np.ndarray:
    """Atomic reduced density matrices for per-sector components ``(..., 3, N + 1)``.

    With ``x_l[n]`` the amplitude of the level-``l`` ket grown from sector
    ``n``, the field kets are ``|n, N-n>`` (level 0), ``|n-1, N-n>`` (level 1)
    and ``|n-1, N-n+1>`` (level 2).  Level 0 and level 2 share the field ket
    ``|m, N-m>`` between sectors ``m`` and ``m + 1``; level-1 kets hold one
    photon fewer and overlap with neither, so those coherences vanish.
    """
    x0, x1, x2 = components[..., 0, :], components[..., 1, :], components[..., 2, :]
    batch = components.shape[:-2]
    rho = np.zeros(batch + (3, 3), dtype=complex)
    rho[..., 0, 0] = np.sum(np.abs(x0) ** 2, axis=-1)
    rho[..., 1, 1] = np.sum(np.abs(x1) ** 2, axis=-1)
    rho[..., 2, 2] = np.sum(np.abs(x2) ** 2, axis=-1)
    rho02 = np.sum(x0[..., :-1] * np.conj(x2[..., 1:]), axis=-1)
    rho[..., 0, 2] = rho02
    rho[..., 2, 0] = np.conj(rho02)
    return rho


def atomic_density_matrix(state: AtomFieldState) -> np.ndarray:
    rho = density_matrices(state.components)
    _check_density(rho)
    return rho


def _check_density(rho):
    if np.max(np.abs(rho - np.conj(np.swapaxes(rho, -1, -2)))) > 1e-12:
        raise IntegrityError("atomic density matrix is not Hermitian")
    trace = np.trace(rho, axis1=-2, axis2=-1).real
    if np.max(np.abs(trace - 1.0)) > 1e-10:
        raise IntegrityError("atomic density matrix trace differs from 1")


def cubic_coefficients(rho) -> CubicCoefficients:
    """Coefficients of ``det(l I - rho) = l^3 + b0 l^2 + b1 l + b2``."""
    b0, b1, b2 = _coefficients(np.asarray(rho))
    return CubicCoefficients(float(b0), float(b1), float(b2))


def _coefficients(rho):
    r = lambda i, j: rho[..., i, j]
    b0 = -(r(0, 0) + r(1, 1) + r(2, 2)).real
    b1 = (
        r(0, 0) * r(1, 1) + r(0, 0) * r(2, 2) + r(1, 1) * r(2, 2)
        - r(0, 1) * r(1, 0) - r(0, 2) * r(2, 0) - r(1, 2) * r(2, 1)
    ).real
    b2 = (
        r(0, 0) * r(1, 2) * r(2, 1) + r(1, 1) * r(0, 2) * r(2, 0) + r(2, 2) * r(0, 1) * r(1, 0)
        - r(0, 0) * r(1, 1) * r(2, 2) - r(0, 2) * r(1, 0) * r(2, 1) - r(0, 1) * r(1, 2) * r(2, 0)
    ).real
    return b0, b1, b2


def cubic_eigenvalues(rho) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) of Hermitian 3x3 matrices and a fallback flag.

    The roots are ``-b0/3 + (2/3) sqrt(b0^2 - 3 b1) cos(alpha + 2 pi k / 3)`` with
    ``alpha = arccos((9 b0 b1 - 2 b0^3 - 27 b2) / (2 (b0^2 - 3 b1)^{3/2})) / 3``.
    Where the spectrum is (nearly) degenerate that form is ill-conditioned and
    ``numpy.linalg.eigvalsh`` is used instead; the flag marks those matrices.
    Accepts a single matrix or a stack ``(..., 3, 3)``.
    """
    rho = np.asarray(rho)
    b0, b1, b2 = _coefficients(rho)
    radicand = b0 * b0 - 3.0 * b1
    safe = np.where(radicand > 0, radicand, 1.0)
    arg = (9.0 * b0 * b1 - 2.0 * b0**3 - 27.0 * b2) / (2.0 * safe**1.5)
    fallback = (radicand < DEGENERATE_RADICAND) | (np.abs(arg) > 1.0 - ARCCOS_EDGE)
    alpha = np.arccos(np.clip(arg, -1.0, 1.0)) / 3.0
    k = np.arange(3)
    lam = (-b0 / 3.0)[..., None] + (2.0 / 3.0) * np.sqrt(safe)[..., None] * np.cos(
        alpha[..., None] + 2.0 * np.pi * k / 3.0
    )
    lam = -np.sort(-lam, axis=-1)
    if np.any(fallback):
        sub = rho[fallback]
        off = sub - np.eye(3) * np.diagonal(sub, axis1=-2, axis2=-1)[..., None, :]
        diagonal = np.all(off == 0, axis=(-2, -1))
        vals = np.empty(sub.shape[:-1])
        vals[diagonal] = -np.sort(-np.diagonal(sub[diagonal], axis1=-2, axis2=-1).real, axis=-1)
        if np.any(~diagonal):
            vals[~diagonal] = np.linalg.eigvalsh(sub[~diagonal])[..., ::-1]
        lam[fallback] = vals
    if lam.ndim == 1:
        return lam, bool(fallback)
    return lam, fallback


def entropy_from_eigenvalues(lam) -> np.ndarray:
    """``-sum l ln l`` with ``0 ln 0 = 0``.

    Eigenvalues are clipped into ``[0, 1]``; roundoff down to ``-1e-8`` is
    tolerated, anything more negative raises :class:`IntegrityError`.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < -NEGATIVE_LIMIT):
        raise IntegrityError(f"density matrix eigenvalue {lam.min():.3g} is negative")
    lam = np.clip(lam, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0, -lam * np.log(np.where(lam > 0, lam, 1.0)), 0.0)
    return terms.sum(axis=-1)


def von_neumann_entropy(rho) -> float:
    lam, _ = cubic_eigenvalues(rho)
    return float(entropy_from_eigenvalues(lam))


def entropy_trace(initial: TwoModeAmplitudes, coupling: CouplingConfig, taus) -> dict[str, np.ndarray]:
    """Entropy, eigenvalues and fallback flags on a time grid."""
    rho = density_matrices(evolve_grid(initial, coupling, taus))
    _check_density(rho)
    lam, fallback = cubic_eigenvalues(rho)
    return {
        "entropy": entropy_from_eigenvalues(lam),
        "eigenvalues": lam,
        "fallback": np.atleast_1d(fallback),
    }
