"""Wootters concurrence and concurrence time series."""

from dataclasses import dataclass

import numpy as np

from .hilbert import TwoQubitState, partial_trace

__all__ = [
    "SPIN_FLIP",
    "ConcurrenceTrace",
    "concurrence",
    "concurrences",
    "concurrence_trace",
    "pair_reductions",
]

# sigma^y (x) sigma^y
SPIN_FLIP = np.array([[0, 0, 0, -1],
                      [0, 0, 1, 0],
                      [0, 1, 0, 0],
                      [-1, 0, 0, 0]], dtype=complex)


def concurrences(rhos, rank_tol=1e-14):
    """Concurrence of a stack of 4x4 density matrices, shape ``(..., 4, 4)``.

    The decreasing ``lambda_i`` are the square roots of the spectrum of
    ``rho (sy sy) rho* (sy sy)``. They are computed as the singular values
    of ``tau = A^T (sy sy) A`` with ``rho = A A^dagger``, which avoids taking
    square roots of eigenvalues at roundoff level. Eigenvalues of ``rho``
    below ``rank_tol`` times the largest one are treated as zero.
    """
    rhos = np.asarray(rhos, dtype=complex)
    herm = 0.5 * (rhos + np.swapaxes(rhos.conj(), -1, -2))
    w, v = np.linalg.eigh(herm)
    w = np.where(w > rank_tol * w[..., -1:], w, 0.0)
    a = v * np.sqrt(w)[..., None, :]
    tau = np.swapaxes(a, -1, -2) @ SPIN_FLIP @ a
    lam = np.linalg.svd(tau, compute_uv=False)
    c = lam[..., 0] - lam[..., 1] - lam[..., 2] - lam[..., 3]
    return np.clip(c, 0.0, 1.0)


def concurrence(rho):
    """Wootters concurrence of a two-qubit state.

    Parameters
    ----------
    rho : TwoQubitState or (4, 4) array_like

    Returns
    -------
    float in [0, 1]
    """
    entries = rho.entries if isinstance(rho, TwoQubitState) else np.asarray(rho, dtype=complex)
    if entries.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {entries.shape}")
    tr = np.trace(entries)
    if abs(tr - 1) > 1e-6:
        raise ValueError(f"two-qubit state has trace {tr:.8f}, expected 1")
    return float(concurrences(entries))


def pair_reductions(states, n_sites, j, k):
    """Reduced pair density matrices for a stack of pure states ``(S, 2**n)``."""
    states = np.asarray(states)
    aj, ak = n_sites - 1 - j, n_sites - 1 - k
    t = states.reshape((-1,) + (2,) * n_sites)
    t = np.moveaxis(t, (aj + 1, ak + 1), (1, 2)).reshape(states.shape[0], 4, -1)
    return t @ t.conj().transpose(0, 2, 1)


@dataclass(frozen=True)
class ConcurrenceTrace:
    """``C_jk(t)`` on a time grid, with its maximum over ``window``."""

    site_pair: tuple
    times: np.ndarray
    values: np.ndarray
    window: tuple
    c_max: float
    t_max: float

    @classmethod
    def from_values(cls, site_pair, times, values, window=None):
        times = np.asarray(times, dtype=float)
        values = np.clip(np.asarray(values, dtype=float), 0.0, 1.0)
        if window is None:
            window = (float(times[0]), float(times[-1]))
        inside = (times >= window[0]) & (times <= window[1])
        if not inside.any():
            raise ValueError(f"no samples inside window {window}")
        sel = np.flatnonzero(inside)
        best = sel[np.argmax(values[sel])]
        for a in (times, values):
            a.setflags(write=False)
        return cls(tuple(site_pair), times, values, tuple(window), float(values[best]),
                   float(times[best]))


def concurrence_trace(traj, j, k, window=None):
    """Concurrence of sites ``(j, k)`` at every snapshot of ``traj``."""
    n = traj.n_sites
    for s in (j, k):
        if not 0 <= s < n:
            raise IndexError(f"site {s} out of range for {n} sites")
    if j == k:
        raise ValueError("concurrence needs two distinct sites")
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    if traj.kind == "pure":
        rhos = pair_reductions(traj.states, n, j, k)
    else:
        rhos = np.array([partial_trace(traj.states[i], (j, k)).entries for i in range(len(traj))])
    return ConcurrenceTrace.from_values((j, k), traj.times, concurrences(rhos), window)
