"""Lambda-type three-level atom driven by the two-mode coherent state.

The interaction ``g_a (s10 a + a^dag s01) + g_b (s12 b + b^dag s21)`` couples
only the three kets ``|0; n_a, n_b>``, ``|1; n_a - 1, n_b>`` and
``|2; n_a - 1, n_b + 1>``, so every initial field ket evolves inside its own
three-dimensional block with a closed-form solution.  Times are the
dimensionless ``tau = g_a t``.

Evolved states are stored per initial sector: ``components[..., level, n]``
is the amplitude of the level-``level`` ket that grew out of ``|0; n, N - n>``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .errors import IntegrityError
from .states import TwoModeAmplitudes
from .statistics import cross_correlation, mandel_parameter, mean_occupations

__all__ = [
    "CouplingConfig",
    "RabiFrequencies",
    "SectorAmplitudes",
    "AtomFieldState",
    "rabi_frequencies",
    "sector_amplitudes",
    "evolve",
    "evolve_grid",
    "atomic_occupations",
    "joint_distribution_at",
    "marginals_at",
    "time_statistics",
    "revival_period",
    "tau_grid",
]


@dataclass(frozen=True)
class CouplingConfig:
    g_a: float = 1.0
    g_b: float = 1.0

    def __post_init__(self):
        if not (self.g_a > 0 and self.g_b > 0):
            raise ValueError(f"couplings must be positive, got g_a={self.g_a}, g_b={self.g_b}")

    @classmethod
    def from_ratio(cls, g_ratio: float) -> "CouplingConfig":
        return cls(1.0, float(g_ratio))

    @property
    def ratio(self) -> float:
        return self.g_b / self.g_a


@dataclass(frozen=True)
class RabiFrequencies:
    omega_a: np.ndarray
    omega_b: np.ndarray
    omega_two: np.ndarray


def rabi_frequencies(n_a, n_b, coupling: CouplingConfig) -> RabiFrequencies:
    """One-photon ``g sqrt(n + 1)`` per mode and the two-photon combination."""
    n_a = np.asarray(n_a, dtype=float)
    n_b = np.asarray(n_b, dtype=float)
    om_a = coupling.g_a * np.sqrt(n_a + 1.0)
    om_b = coupling.g_b * np.sqrt(n_b + 1.0)
    return RabiFrequencies(om_a, om_b, np.sqrt(om_a**2 + om_b**2))


@dataclass(frozen=True)
class SectorAmplitudes:
    n_a: np.ndarray
    n_b: np.ndarray
    c0: np.ndarray
    c1: np.ndarray
    c2: np.ndarray

    def populations(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return np.abs(self.c0) ** 2, np.abs(self.c1) ** 2, np.abs(self.c2) ** 2


def _block_solution(n_a, n_b, ratio, tau):
    """Closed-form block amplitudes, broadcasting over all arguments.

    Frequencies are in units of ``g_a``: ``A = sqrt(n_a)``, ``B = r sqrt(n_b + 1)``.
    """
    a2 = np.asarray(n_a, dtype=float)
    b2 = ratio**2 * (np.asarray(n_b, dtype=float) + 1.0)
    w2 = a2 + b2
    phase = np.sqrt(w2) * np.asarray(tau, dtype=float)
    cos, sin = np.cos(phase), np.sin(phase)
    c0 = (b2 + a2 * cos) / w2
    c1 = -1j * np.sqrt(a2 / w2) * sin
    c2 = np.sqrt(a2 * b2) * (cos - 1.0) / w2
    return c0.astype(complex), c1, c2.astype(complex)


def sector_amplitudes(n_a, n_b, coupling: CouplingConfig, tau) -> SectorAmplitudes:
    """Block amplitudes for an atom starting in level 0 with field ``|n_a, n_b>``.

    ``c0, c1, c2`` multiply ``|0; n_a, n_b>``, ``|1; n_a-1, n_b>`` and
    ``|2; n_a-1, n_b+1>``.  With ``W = sqrt(A^2 + B^2)``, ``A = g_a sqrt(n_a)``
    and ``B = g_b sqrt(n_b + 1)``::

        c0 = (B^2 + A^2 cos Wt) / W^2
        c1 = -i (A / W) sin Wt
        c2 = A B (cos Wt - 1) / W^2
    """
    n_a = np.asarray(n_a)
    n_b = np.asarray(n_b)
    if np.any(n_a < 0) or np.any(n_b < 0):
        raise ValueError("photon numbers must be >= 0")
    c0, c1, c2 = _block_solution(n_a, n_b, coupling.ratio, np.asarray(tau))
    return SectorAmplitudes(n_a, n_b, c0, c1, c2)


@dataclass(frozen=True)
class AtomFieldState:
    """Atom-field state at one time, stored per initial sector.

    ``components[level, n]`` is the amplitude of ``|0; n, N-n>``,
    ``|1; n-1, N-n>`` or ``|2; n-1, N-n+1>`` for ``level = 0, 1, 2``.
    """

    N: int
    tau: float
    components: np.ndarray

    @property
    def amplitudes(self) -> dict[tuple[int, int, int], complex]:
        """Sparse map ``(level, n_a, n_b) -> amplitude`` of the populated kets."""
        out = {}
        for level, n, n_a, n_b in _ket_labels(self.N):
            amp = self.components[level, n]
            if amp != 0:
                out[(level, n_a, n_b)] = complex(amp)
        return out

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.components) ** 2)))

    def dense(self, cutoff: int | None = None) -> np.ndarray:
        """Amplitude array ``psi[level, n_a, n_b]`` with each mode truncated at ``cutoff`` photons."""
        cutoff = self.N + 1 if cutoff is None else cutoff
        psi = np.zeros((3, cutoff + 1, cutoff + 1), dtype=complex)
        for (level, n_a, n_b), amp in self.amplitudes.items():
            if n_a > cutoff or n_b > cutoff:
                raise ValueError("cutoff too small for the populated kets")
            psi[level, n_a, n_b] = amp
        return psi


def _ket_labels(N):
    for n in range(N + 1):
        yield 0, n, n, N - n
        if n > 0:
            yield 1, n, n - 1, N - n
            yield 2, n, n - 1, N - n + 1


def evolve_grid(initial: TwoModeAmplitudes, coupling: CouplingConfig, taus) -> np.ndarray:
    """Per-sector components on a time grid, shape ``(len(taus), 3, N + 1)``."""
    N = initial.N
    n = np.arange(N + 1)
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    c0, c1, c2 = _block_solution(n[None, :], (N - n)[None, :], coupling.ratio, taus[:, None])
    # n = 0 blocks: A = 0, so c1 = c2 = 0 and c0 = 1 exactly
    blocks = np.stack([c0, c1, c2], axis=1)
    return blocks * initial.amps[None, None, :]


def evolve(initial: TwoModeAmplitudes, coupling: CouplingConfig, tau: float) -> AtomFieldState:
    comps = evolve_grid(initial, coupling, [tau])[0]
    state = AtomFieldState(initial.N, float(tau), comps)
    if abs(state.norm() - 1.0) > 1e-10:
        raise IntegrityError(f"evolved state norm {state.norm()!r} at tau={tau}")
    return state


def atomic_occupations(initial: TwoModeAmplitudes, coupling: CouplingConfig, taus) -> np.ndarray:
    """Level populations, shape ``(3, len(taus))``; columns sum to one."""
    comps = evolve_grid(initial, coupling, taus)
    occ = (np.abs(comps) ** 2).sum(axis=2).T
    if np.any(np.abs(occ.sum(axis=0) - 1.0) > 1e-10):
        raise IntegrityError("atomic occupations do not sum to one")
    return occ


def joint_tables(components: np.ndarray, N: int) -> np.ndarray:
    """Joint photon tables ``P[..., n_a, n_b]`` summed over atomic levels."""
    pops = np.abs(components) ** 2
    batch = pops.shape[:-2]
    table = np.zeros(batch + (N + 1, N + 1))
    n = np.arange(N + 1)
    table[..., n, N - n] += pops[..., 0, :]
    m = n[1:]
    table[..., m - 1, N - m] += pops[..., 1, 1:]
    table[..., m - 1, N - m + 1] += pops[..., 2, 1:]
    return table


def joint_distribution_at(state: AtomFieldState) -> np.ndarray:
    return joint_tables(state.components, state.N)


def marginals_at(state: AtomFieldState) -> tuple[np.ndarray, np.ndarray]:
    table = joint_distribution_at(state)
    return table.sum(axis=1), table.sum(axis=0)


def time_statistics(initial: TwoModeAmplitudes, coupling: CouplingConfig, taus) -> dict:
    """Means, ``g2`` and Mandel parameters on a time grid.

    Undefined points (zero mean) are masked in the returned arrays.
    """
    tables = joint_tables(evolve_grid(initial, coupling, taus), initial.N)
    mean_a, mean_b = mean_occupations(tables)
    return {
        "mean_a": mean_a,
        "mean_b": mean_b,
        "g2": cross_correlation(tables),
        "q_a": mandel_parameter(tables, "a"),
        "q_b": mandel_parameter(tables, "b"),
    }


def tau_grid(tau_max: float = 50.0, points: int = 5000) -> np.ndarray:
    return np.linspace(0.0, tau_max, points)


def _autocorrelation(x: np.ndarray) -> np.ndarray:
    """Unbiased autocorrelation normalised to 1 at zero lag."""
    n = len(x)
    spec = np.fft.rfft(x, 2 * n)
    acf = np.fft.irfft(spec * np.conj(spec), 2 * n)[:n]
    acf /= n - np.arange(n)
    return acf / acf[0]


def revival_period(trace, taus=None, *, significance: float = 0.3, collapse: float = 0.1,
                   max_lag_fraction: float = 2 / 3):
    """Dominant recurrence time of an oscillating trace, or ``None``.

    Works on the autocorrelation of the mean-subtracted trace.  If its peaks
    never drop below ``collapse`` the trace is simply periodic and the first
    peak is returned.  Otherwise the Rabi oscillation has dephased, and the
    answer is the highest peak of the first group of peaks that climbs back
    above ``significance`` after the collapse.  Lags are in units of ``taus``
    (uniform grid) or in samples when ``taus`` is omitted.
    """
    x = np.asarray(trace, dtype=float)
    x = x - x.mean()
    if len(x) < 4 or np.max(np.abs(x)) < 1e-12:
        return None
    step = 1.0
    if taus is not None:
        taus = np.asarray(taus, dtype=float)
        step = (taus[-1] - taus[0]) / (len(taus) - 1)
    acf = _autocorrelation(x)[: int(len(x) * max_lag_fraction)]
    peaks, _ = find_peaks(acf)
    if len(peaks) == 0:
        return None
    heights = acf[peaks]
    collapsed = np.flatnonzero(heights < collapse)
    if len(collapsed) == 0:
        return float(peaks[0] * step) if heights[0] >= significance else None
    after = np.arange(len(peaks)) > collapsed[0]
    revived = np.flatnonzero(after & (heights >= significance))
    if len(revived) == 0:
        return None
    start = revived[0]
    stop = start
    while stop + 1 < len(peaks) and heights[stop + 1] >= significance:
        stop += 1
    best = start + int(np.argmax(heights[start : stop + 1]))
    return float(peaks[best] * step)
