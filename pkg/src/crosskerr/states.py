"""Cross-Kerr nonlinear coherent states on a fixed-N sector.

The state is ``C^-1 exp(mu J+) |0, N>`` with the deformed raising operator of
:mod:`crosskerr.algebra`.  Amplitudes live on the kets ``|n, N - n>``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .algebra import Convention, _check_sector, check_kappa, log_binomials, log_weights
from .errors import IntegrityError, QuadratureError

__all__ = [
    "CKNCSParams",
    "TwoModeAmplitudes",
    "build_ckncs",
    "joint_distribution",
    "marginal_distribution",
    "identity_resolution_check",
    "state_to_csv",
    "state_from_csv",
]


@dataclass(frozen=True)
class CKNCSParams:
    N: int
    mu: complex
    kappa_tilde: float = 0.0
    convention: Convention = Convention.OPERATOR

    def __post_init__(self):
        object.__setattr__(self, "N", _check_sector(self.N))
        mu = complex(self.mu)
        if not np.isfinite(mu):
            raise ValueError(f"mu must be finite, got {self.mu!r}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "kappa_tilde", check_kappa(self.kappa_tilde))
        object.__setattr__(self, "convention", Convention.parse(self.convention))


@dataclass(frozen=True, eq=False)
class TwoModeAmplitudes:
    """Normalised amplitudes; ``amps[n]`` belongs to ``|n, N - n>``."""

    N: int
    amps: np.ndarray
    params: CKNCSParams | None = field(default=None, compare=False)

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != (self.N + 1,):
            raise ValueError(f"expected {self.N + 1} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    def __eq__(self, other):
        if not isinstance(other, TwoModeAmplitudes):
            return NotImplemented
        return self.N == other.N and np.array_equal(self.amps, other.amps)

    __hash__ = None

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def norm(self) -> float:
        return float(np.sqrt(self.probabilities.sum()))


def _log_unnormalised_moduli(N, abs_mu, kappa_tilde, convention):
    n = np.arange(N + 1)
    lw = log_weights(N, kappa_tilde, convention)
    # mu = 0 leaves only n = 0; the 0 * -inf at n = 0 is discarded
    with np.errstate(divide="ignore", invalid="ignore"):
        mu_part = np.where(n == 0, 0.0, n * np.log(abs_mu))
    return 0.5 * log_binomials(N) + lw + mu_part


def build_ckncs(params: CKNCSParams | None = None, **kwargs) -> TwoModeAmplitudes:
    """Build the normalised coherent state.

    Accepts either a :class:`CKNCSParams` or its fields as keyword arguments::

        build_ckncs(N=10, mu=0.5, kappa_tilde=0.1)
    """
    if params is None:
        params = CKNCSParams(**kwargs)
    elif kwargs:
        raise TypeError("pass either params or keyword fields, not both")
    N, mu = params.N, params.mu
    log_mod = _log_unnormalised_moduli(N, abs(mu), params.kappa_tilde, params.convention)
    log_mod -= 0.5 * logsumexp(2.0 * log_mod)
    phase = np.exp(1j * np.angle(mu) * np.arange(N + 1)) if mu != 0 else np.ones(N + 1)
    amps = np.exp(log_mod) * phase
    if mu.imag == 0 and mu.real >= 0:
        amps = amps.real.astype(complex)
    return TwoModeAmplitudes(N, amps, params)


def joint_distribution(state: TwoModeAmplitudes) -> np.ndarray:
    """``p[n_a, n_b]`` on the ``(N+1) x (N+1)`` grid; nonzero only on ``n_a + n_b = N``."""
    N = state.N
    table = np.zeros((N + 1, N + 1))
    n = np.arange(N + 1)
    table[n, N - n] = state.probabilities
    return table


def marginal_distribution(state: TwoModeAmplitudes, mode: str) -> np.ndarray:
    p_a = state.probabilities
    if mode == "a":
        return p_a.copy()
    if mode == "b":
        return p_a[::-1].copy()
    raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")


def _deformed_power_sum(log_x: np.ndarray, M: int, kappa_tilde: float, convention) -> np.ndarray:
    """log of ``(1 + x)_k^M = sum_n binom(M, n)_k x^n`` for each ``x = exp(log_x)``."""
    n = np.arange(M + 1)
    log_coef = log_binomials(M) + 2.0 * log_weights(M, kappa_tilde, convention)
    return logsumexp(log_coef[None, :] + n[None, :] * log_x[:, None], axis=1)


def _radial_diagonal(s: np.ndarray, N: int, kappa_tilde: float, convention) -> np.ndarray:
    """Integrand of the identity-resolution diagonal in the compact variable ``s``.

    With ``x = |mu|^2 = s / (1 - s)`` and the angle integrated out, the ``n``-th
    diagonal element is ``(N + 1) * binom(N, n)_k * x^n / ((1+x)_k^N (1+x)_k^2)``
    times the Jacobian ``dx/ds = (1 - s)^-2``.  Returns shape ``(len(s), N + 1)``.
    """
    log_x = np.log(s) - np.log1p(-s)
    n = np.arange(N + 1)
    log_coef = log_binomials(N) + 2.0 * log_weights(N, kappa_tilde, convention)
    log_norm = _deformed_power_sum(log_x, N, kappa_tilde, convention)
    log_measure = _deformed_power_sum(log_x, 2, kappa_tilde, convention)
    log_jac = -2.0 * np.log1p(-s)
    log_val = (
        log_coef[None, :]
        + n[None, :] * log_x[:, None]
        - log_norm[:, None]
        - log_measure[:, None]
        + log_jac[:, None]
    )
    return (N + 1) * np.exp(log_val)


def _gauss_legendre(func, panels: int, order: int) -> np.ndarray:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    s = (0.5 * (hi + lo))[:, None] + half[:, None] * nodes[None, :]
    vals = func(s.ravel())
    w = (half[:, None] * weights[None, :]).ravel()
    return w @ vals


def identity_resolution_check(
    N: int,
    kappa_tilde: float = 0.0,
    convention: Convention | str = Convention.OPERATOR,
    tol: float = 1e-8,
    order: int = 32,
    max_panels: int = 1024,
) -> float:
    """Max-norm residual of the coherent-state resolution of identity.

    Integrates ``(N+1)/pi * d^2mu |mu><mu| / (1+|mu|^2)^2`` over the plane
    (``kt = 0``).  For ``kt > 0`` the deformed normalisation and the deformed
    measure ``1 / (1+|mu|^2)_k^2`` enter an ordinary integral; the returned
    residual is then a diagnostic and is expected to be nonzero.

    The angular integral kills off-diagonal elements, so only the diagonal is
    computed.  Composite Gauss-Legendre panels are doubled until two successive
    estimates agree within ``tol``; otherwise :class:`QuadratureError` is raised.
    """
    N = _check_sector(N)
    kappa_tilde = check_kappa(kappa_tilde)
    convention = Convention.parse(convention)

    def func(s):
        return _radial_diagonal(s, N, kappa_tilde, convention)

    panels = 1
    prev = _gauss_legendre(func, panels, order)
    while panels < max_panels:
        panels *= 2
        cur = _gauss_legendre(func, panels, order)
        change = float(np.max(np.abs(cur - prev)))
        if change < tol:
            return float(np.max(np.abs(cur - 1.0)))
        prev = cur
    raise QuadratureError(
        f"identity quadrature did not converge to {tol:g} "
        f"(last change {change:.3g}, residual {np.max(np.abs(cur - 1.0)):.3g})",
        residual=float(np.max(np.abs(cur - 1.0))),
    )


_CSV_HEADER = ("N", "mu_re", "mu_im", "kappa_tilde", "convention")


def state_to_csv(state: TwoModeAmplitudes) -> str:
    """Serialise as a CSV block: one parameter header row, then ``n, amp_re, amp_im, probability``."""
    params = state.params
    if params is None:
        raise ValueError("state carries no construction parameters")
    if abs(state.norm() - 1.0) > 1e-10:
        raise IntegrityError(f"state norm {state.norm()!r} differs from 1")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_CSV_HEADER)
    w.writerow([params.N, repr(params.mu.real), repr(params.mu.imag), repr(params.kappa_tilde),
                params.convention.value])
    w.writerow(("n", "amp_re", "amp_im", "probability"))
    for n, (a, p) in enumerate(zip(state.amps, state.probabilities)):
        w.writerow([n, repr(float(a.real)), repr(float(a.imag)), repr(float(p))])
    return buf.getvalue()


def state_from_csv(text: str) -> TwoModeAmplitudes:
    rows = list(csv.reader(io.StringIO(text)))
    if len(rows) < 3 or tuple(rows[0]) != _CSV_HEADER:
        raise ValueError("not a coherent-state CSV block")
    N, mu_re, mu_im, kt, conv = rows[1]
    params = CKNCSParams(int(N), complex(float(mu_re), float(mu_im)), float(kt), conv)
    amps = np.array([complex(float(r[1]), float(r[2])) for r in rows[3:]])
    return TwoModeAmplitudes(params.N, amps, params)
