"""Two-mode quadrature variances of the evolved atom-field state.

``X1 = (a + a^dag + b + b^dag) / (2 sqrt 2)`` and
``X2 = (a - a^dag + b - b^dag) / (2i sqrt 2)``; a quadrature is squeezed when
``S = 4 var(X) - 1 < 0``.  Expectation values are evaluated exactly on the
sparse ket list: each ladder operator shifts a ket label and picks up the
matching amplitude, if that ket is populated at all.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import AtomFieldState, _ket_labels

__all__ = ["QuadratureReport", "quadrature_report", "quadrature_trace", "ladder_expectations"]


@dataclass(frozen=True)
class QuadratureReport:
    var_x1: float
    var_x2: float
    s_x1: float
    s_x2: float
    uncertainty_product: float


def _flat_labels(N):
    labels = list(_ket_labels(N))
    flat = [(level, n_a, n_b) for level, _, n_a, n_b in labels]
    source = [(level, n) for level, n, _, _ in labels]
    return flat, source


def _transition(flat, shift_a, shift_b, coeff):
    """Index pairs ``(src, dst)`` and coefficients for a ket-shifting operator."""
    index = {ket: i for i, ket in enumerate(flat)}
    src, dst, c = [], [], []
    for i, (level, n_a, n_b) in enumerate(flat):
        target = (level, n_a + shift_a, n_b + shift_b)
        j = index.get(target)
        if j is None:
            continue
        value = coeff(n_a, n_b)
        if value != 0:
            src.append(i)
            dst.append(j)
            c.append(value)
    return np.array(src, dtype=int), np.array(dst, dtype=int), np.array(c, dtype=float)


def ladder_expectations(components: np.ndarray, N: int) -> dict[str, np.ndarray]:
    """``<a>, <b>, <a^2>, <b^2>, <ab>, <a^dag b>, <n_a>, <n_b>`` for per-sector components.

    ``components`` has shape ``(..., 3, N + 1)`` as produced by
    :func:`crosskerr.dynamics.evolve_grid`.
    """
    flat, source = _flat_labels(N)
    levels = np.array([s[0] for s in source])
    sectors = np.array([s[1] for s in source])
    psi = components[..., levels, sectors]
    n_a = np.array([k[1] for k in flat], dtype=float)
    n_b = np.array([k[2] for k in flat], dtype=float)

    def expect(shift_a, shift_b, coeff):
        src, dst, c = _transition(flat, shift_a, shift_b, coeff)
        if len(src) == 0:
            return np.zeros(psi.shape[:-1], dtype=complex)
        return np.sum(np.conj(psi[..., dst]) * c * psi[..., src], axis=-1)

    probs = np.abs(psi) ** 2
    return {
        "a": expect(-1, 0, lambda na, nb: np.sqrt(na)),
        "b": expect(0, -1, lambda na, nb: np.sqrt(nb)),
        "aa": expect(-2, 0, lambda na, nb: np.sqrt(na * (na - 1.0))),
        "bb": expect(0, -2, lambda na, nb: np.sqrt(nb * (nb - 1.0))),
        "ab": expect(-1, -1, lambda na, nb: np.sqrt(na * nb)),
        "adag_b": expect(1, -1, lambda na, nb: np.sqrt((na + 1.0) * nb)),
        "n_a": probs @ n_a,
        "n_b": probs @ n_b,
    }


def _assemble(ev):
    A = ev["a"] + ev["b"]
    AA = ev["aa"] + ev["bb"] + 2.0 * ev["ab"]
    AdA = ev["n_a"] + ev["n_b"] + 2.0 * ev["adag_b"].real
    var_x1 = (2.0 * AA.real + 2.0 * AdA + 2.0) / 8.0 - (A.real / np.sqrt(2.0)) ** 2
    var_x2 = (-2.0 * AA.real + 2.0 * AdA + 2.0) / 8.0 - (A.imag / np.sqrt(2.0)) ** 2
    return var_x1, var_x2


def quadrature_trace(components: np.ndarray, N: int) -> dict[str, np.ndarray]:
    """Batched quadrature report over the leading axes of ``components``."""
    var_x1, var_x2 = _assemble(ladder_expectations(components, N))
    return {
        "var_x1": var_x1,
        "var_x2": var_x2,
        "s_x1": 4.0 * var_x1 - 1.0,
        "s_x2": 4.0 * var_x2 - 1.0,
        "product": var_x1 * var_x2,
    }


def quadrature_report(state: AtomFieldState) -> QuadratureReport:
    tr = quadrature_trace(state.components, state.N)
    return QuadratureReport(
        float(tr["var_x1"]),
        float(tr["var_x2"]),
        float(tr["s_x1"]),
        float(tr["s_x2"]),
        float(tr["product"]),
    )
