"""Cross-Kerr deformation function and the deformed su(2) generators.

The cross-Kerr Hamiltonian ``w_a n_a + w_b n_b + (k/2) n_a n_b`` is rewritten as a
two-dimensional f-deformed oscillator whose mode-a ladder operators carry the
factor ``f(n_b) = sqrt(1 + kt * n_b)`` with ``kt = k / (2 w_a)``.  Everything
downstream is parameterised by the dimensionless ``kt`` alone.

Matrices act on one sector of fixed total photon number ``N``, spanned by the
kets ``|n, N - n>`` ordered by ``n`` ascending.
"""

from __future__ import annotations

import enum
from math import comb

import numpy as np
from scipy.special import gammaln

__all__ = [
    "Convention",
    "check_kappa",
    "deformation_value",
    "deformed_factorial",
    "log_weights",
    "deformed_binomial",
    "ladder_apply",
    "su2_generators",
    "spectrum_check",
]


class Convention(str, enum.Enum):
    """How the deformed factorial in the coherent-state coefficients is read.

    ``OPERATOR`` expands ``exp(mu J+)|0, N>`` exactly, giving the weight
    ``prod_{j=N-n}^{N-1} f(j)`` for the ket ``|n, N-n>``.  ``LITERAL`` uses the
    factorial ``[f]!`` evaluated at ``n_b = N - n``.  Both agree at ``kt = 0``.
    """

    OPERATOR = "operator"
    LITERAL = "literal"

    @classmethod
    def parse(cls, value: "Convention | str") -> "Convention":
        if isinstance(value, cls):
            return value
        aliases = {"operatorexpansion": cls.OPERATOR, "literalfactorial": cls.LITERAL}
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(
                f"unknown coefficient convention {value!r}; expected 'operator' or 'literal'"
            ) from None


def check_kappa(kappa_tilde: float) -> float:
    kappa_tilde = float(kappa_tilde)
    if not np.isfinite(kappa_tilde) or kappa_tilde < 0:
        raise ValueError(f"kappa_tilde must be finite and >= 0, got {kappa_tilde}")
    return kappa_tilde


def _check_sector(N: int) -> int:
    if int(N) != N or N < 0:
        raise ValueError(f"sector photon number N must be a nonnegative integer, got {N}")
    return int(N)


def deformation_value(kappa_tilde: float, n_b):
    """Return ``f(kt, n_b) = sqrt(1 + kt * n_b)``.

    ``n_b`` may be an integer or an integer array.
    """
    kappa_tilde = check_kappa(kappa_tilde)
    n_b_arr = np.asarray(n_b)
    if np.any(n_b_arr < 0):
        raise ValueError("photon number n_b must be >= 0")
    out = np.sqrt(1.0 + kappa_tilde * n_b_arr)
    return float(out) if out.ndim == 0 else out


def _log_f(kappa_tilde: float, n: np.ndarray) -> np.ndarray:
    return 0.5 * np.log1p(kappa_tilde * n)


def deformed_factorial(kappa_tilde: float, m: int) -> float:
    """``[f]!(m) = f(1) f(2) ... f(m)`` with ``[f]!(0) = 1``."""
    kappa_tilde = check_kappa(kappa_tilde)
    if int(m) != m or m < 0:
        raise ValueError(f"m must be a nonnegative integer, got {m}")
    return float(np.exp(_log_f(kappa_tilde, np.arange(1, int(m) + 1)).sum()))


def log_weights(N: int, kappa_tilde: float, convention: Convention | str = Convention.OPERATOR) -> np.ndarray:
    """Natural log of the coherent-state weight ``W_n`` for ``n = 0..N``."""
    N = _check_sector(N)
    kappa_tilde = check_kappa(kappa_tilde)
    convention = Convention.parse(convention)
    # cumulative sums of log f(j) for j = 0..N; csum[m] = sum_{j<m} log f(j)
    csum = np.concatenate(([0.0], np.cumsum(_log_f(kappa_tilde, np.arange(N + 1)))))
    n = np.arange(N + 1)
    if convention is Convention.OPERATOR:
        # prod_{j=N-n}^{N-1} f(j)
        return csum[N] - csum[N - n]
    # prod_{j=1}^{N-n} f(j); f(0) = 1 so the j = 0 term contributes nothing
    return csum[N - n + 1]


def deformed_binomial(N: int, n: int, kappa_tilde: float, convention: Convention | str = Convention.OPERATOR) -> float:
    """Deformed binomial coefficient ``binom(N, n) * W_n**2``."""
    N = _check_sector(N)
    if int(n) != n or not 0 <= n <= N:
        raise ValueError(f"need 0 <= n <= N, got n={n}, N={N}")
    n = int(n)
    lw = log_weights(N, kappa_tilde, convention)[n]
    return float(comb(N, n) * np.exp(2.0 * lw))


def log_binomials(N: int) -> np.ndarray:
    n = np.arange(N + 1)
    return gammaln(N + 1) - gammaln(n + 1) - gammaln(N - n + 1)


def ladder_apply(direction: str, kappa_tilde: float, state: np.ndarray) -> np.ndarray:
    """Apply the deformed mode-a ladder operator to a two-mode ket.

    ``state[n_a, n_b]`` holds the amplitude of ``|n_a, n_b>`` on a finite
    truncation.  ``"lower"`` applies ``A = a f(n_b)``; ``"raise"`` applies
    ``A^dagger = f(n_b) a^dagger``.  Raising a populated top row of the
    truncation raises ``ValueError`` instead of silently dropping amplitude.
    """
    kappa_tilde = check_kappa(kappa_tilde)
    psi = np.asarray(state)
    if psi.ndim != 2:
        raise ValueError("state must be a 2-D array indexed by (n_a, n_b)")
    da, db = psi.shape
    f = np.sqrt(1.0 + kappa_tilde * np.arange(db))
    out = np.zeros_like(psi, dtype=np.result_type(psi, float))
    if direction == "lower":
        out[:-1] = np.sqrt(np.arange(1, da))[:, None] * f[None, :] * psi[1:]
    elif direction == "raise":
        if np.any(psi[-1] != 0):
            raise ValueError("raising leaves the truncation; enlarge the mode-a cutoff")
        out[1:] = np.sqrt(np.arange(1, da))[:, None] * f[None, :] * psi[:-1]
    else:
        raise ValueError(f"direction must be 'lower' or 'raise', got {direction!r}")
    return out


def su2_generators(N: int, kappa_tilde: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Dense ``(J+, J-, J0)`` on the sector ``{|n, N-n>}``.

    ``J+ = f(n_b) a^dagger b`` maps ``|n, N-n>`` to
    ``sqrt((n+1)(N-n)) f(N-n-1) |n+1, N-n-1>``; ``J-`` is its transpose and
    ``J0 = (n_a - n_b)/2``.
    """
    N = _check_sector(N)
    kappa_tilde = check_kappa(kappa_tilde)
    n = np.arange(N)
    sub = np.sqrt((n + 1.0) * (N - n)) * np.sqrt(1.0 + kappa_tilde * (N - n - 1))
    j_plus = np.diag(sub, k=-1)
    j_minus = j_plus.T.copy()
    j0 = np.diag((2.0 * np.arange(N + 1) - N) / 2.0)
    return j_plus, j_minus, j0


def spectrum_check(N: int, kappa_tilde: float, omega_a: float, omega_b: float) -> float:
    """Largest mismatch between the cross-Kerr and deformed-oscillator spectra.

    Compares ``w_a f^2 n_a + w_b n_b`` against ``w_a n_a + w_b n_b + (k/2) n_a n_b``
    on every ket of the sector, with ``k = 2 w_a kt``.
    """
    N = _check_sector(N)
    kappa_tilde = check_kappa(kappa_tilde)
    if not omega_a > 0:
        raise ValueError("omega_a must be > 0")
    n_a = np.arange(N + 1, dtype=float)
    n_b = N - n_a
    kappa = 2.0 * omega_a * kappa_tilde
    deformed = omega_a * deformation_value(kappa_tilde, n_b) ** 2 * n_a + omega_b * n_b
    kerr = omega_a * n_a + omega_b * n_b + 0.5 * kappa * n_a * n_b
    return float(np.max(np.abs(deformed - kerr)))
