"""Fixed-step time propagation of pure states and density matrices.

Both integrators use the classical fourth-order Runge-Kutta scheme on a
uniform sampling grid. Each sampling interval is split into the smallest
integer number of equal steps with ``dt <= 2 pi / (nu * omega_max)``, so step
counts are reproducible and independent of the order in which runs execute.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, ResourceError
from .hilbert import ORACLE_CAP, DensityMatrix, PureState, site_bits

__all__ = [
    "LINDBLAD_CAP",
    "NoiseSpec",
    "StepControl",
    "Trajectory",
    "sample_times",
    "evolve_pure",
    "evolve_lindblad",
    "expm_oracle",
    "lindblad_memory",
]

LINDBLAD_CAP = 8


@dataclass(frozen=True)
class NoiseSpec:
    """Pure dephasing at the same ``rate`` (lambda) on every site."""

    rate: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.rate) or self.rate < 0:
            raise ValueError(f"dephasing rate must be finite and >= 0, got {self.rate}")


@dataclass(frozen=True)
class StepControl:
    nu: float = 50.0

    def __post_init__(self):
        if not self.nu >= 50:
            raise ValueError(f"nu must be at least 50, got {self.nu}")

    def max_step(self, omega_max):
        if not math.isfinite(omega_max):
            raise NumericError(f"non-finite frequency scale {omega_max}")
        if omega_max <= 0:
            return math.inf
        return 2 * math.pi / (self.nu * omega_max)


@dataclass(frozen=True)
class Trajectory:
    """Snapshots on a strictly increasing time grid.

    ``states`` is ``None`` when the run only recorded ``observations``.
    ``norm_drift`` accumulates the per-step deviation of the norm (pure
    states) or the trace (density matrices) before renormalization.
    """

    times: np.ndarray
    states: np.ndarray
    n_sites: int
    kind: str
    frame: str = "lab"
    dt: float = 0.0
    n_steps: int = 0
    norm_drift: float = 0.0
    max_step_drift: float = 0.0
    observations: list = field(default_factory=list)

    def __len__(self):
        return len(self.times)

    def state(self, i):
        if self.states is None:
            raise ValueError("trajectory was run without storing states")
        if self.kind == "pure":
            return PureState(self.n_sites, self.states[i])
        return DensityMatrix(self.n_sites, self.states[i])


def sample_times(t_span, samples):
    t0, t1 = map(float, t_span)
    if not t1 > t0:
        raise ValueError(f"t_span must be increasing, got {t_span}")
    if samples < 2:
        raise ValueError("need at least two samples")
    return np.linspace(t0, t1, int(samples))


def _segments(times, dt_max, breaks=()):
    """Per sampling interval, the list of ``(start, step, count, end)`` runs.

    Every interval is cut at the ``breaks`` (switch-on times) that fall
    inside it, so no step straddles a discontinuity of ``H(t)``. ``end`` is
    the time at which the last stage of a run evaluates ``H``: the left
    limit just below a break, the run end otherwise.
    """
    out = []
    for t0, t1 in zip(times[:-1], times[1:]):
        edges = [t0] + sorted(b for b in breaks if t0 < b < t1) + [t1]
        runs = []
        for a, b in zip(edges[:-1], edges[1:]):
            n = 1 if math.isinf(dt_max) else max(1, math.ceil((b - a) / dt_max - 1e-9))
            end = math.nextafter(b, -math.inf) if b in breaks else b
            runs.append((a, (b - a) / n, n, end))
        out.append(runs)
    return out


def _breaks(model):
    p = getattr(model, "protocol", None)
    return (p.t_on,) if p is not None and p.t_on > 0 else ()


def _step_stats(segments):
    steps = [run[1] for runs in segments for run in runs]
    return float(max(steps)), int(sum(run[2] for runs in segments for run in runs))


def _freeze(a):
    a.setflags(write=False)
    return a


def evolve_pure(psi0, model, t_span, step_control=None, samples=400, store=True, observer=None):
    """Integrate ``i dpsi/dt = H(t) psi`` with RK4.

    Parameters
    ----------
    psi0 : PureState
        Normalized initial state.
    model : EdgeHamiltonian
        Anything with ``apply(t, psi)``, ``omega_max`` and ``frame``.
    t_span : (float, float)
    step_control : StepControl, optional
    samples : int
        Number of snapshots on ``linspace(t0, t1, samples)``.
    store : bool
        Keep the full state at every sample.
    observer : callable, optional
        ``observer(t, psi)`` evaluated at every sample; results land in
        ``Trajectory.observations``.
    """
    step_control = step_control or StepControl()
    psi = np.array(psi0.amplitudes, dtype=complex)
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise ValueError("initial state is not normalized")
    times = sample_times(t_span, samples)
    segments = _segments(times, step_control.max_step(model.omega_max), _breaks(model))
    f = model.apply
    snaps = np.empty((len(times), psi.size), dtype=complex) if store else None
    obs = []
    drift = 0.0
    worst = 0.0

    def record(i, t):
        if store:
            snaps[i] = psi
        if observer is not None:
            obs.append(observer(t, psi))

    record(0, times[0])
    for i, runs in enumerate(segments):
        for t, h, n, end in runs:
            for s in range(n):
                ts = t + s * h
                te = end if s == n - 1 else ts + h
                k1 = f(ts, psi)
                k2 = f(ts + 0.5 * h, psi - 0.5j * h * k1)
                k3 = f(ts + 0.5 * h, psi - 0.5j * h * k2)
                k4 = f(te, psi - 1j * h * k3)
                psi = psi - (1j * h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
                nrm = np.linalg.norm(psi)
                if not math.isfinite(nrm):
                    raise NumericError(f"state diverged at t={ts + h}")
                d = abs(nrm - 1)
                drift += d
                worst = max(worst, d)
                psi /= nrm
        record(i + 1, times[i + 1])
    dt, n_steps = _step_stats(segments)
    return Trajectory(_freeze(times), None if snaps is None else _freeze(snaps), psi0.n_sites,
                      "pure", model.frame, dt, n_steps, drift, worst, obs)


def lindblad_memory(n_sites, samples=0):
    """Bytes needed for dense Lindblad propagation (working set plus snapshots)."""
    return 16 * 4 ** n_sites * (12 + samples)


def evolve_lindblad(rho0, model, noise, t_span, step_control=None, samples=400, store=True,
                    observer=None, cap=LINDBLAD_CAP, tol=1e-8):
    """Integrate the pure-dephasing master equation with RK4.

    ``drho/dt = -i [H, rho] + (rate/2) sum_n (sz_n rho sz_n - rho)``
    """
    n = rho0.n_sites
    if n > cap:
        need = lindblad_memory(n, samples if store else 0)
        raise ResourceError(f"Lindblad propagation of {n} sites exceeds the cap of {cap} "
                            f"sites; it would need about {need / 2 ** 20:.1f} MiB", need)
    step_control = step_control or StepControl()
    rho = np.array(rho0.entries, dtype=complex)
    if abs(np.trace(rho) - 1) > 1e-10:
        raise ValueError("initial density matrix does not have unit trace")
    times = sample_times(t_span, samples)
    scale = model.omega_max + 0.5 * noise.rate * n
    segments = _segments(times, step_control.max_step(2 * scale), _breaks(model))
    z = 1 - 2 * site_bits(n)
    # sum_n sz_n rho sz_n is an elementwise product for diagonal sz_n
    dephase = 0.5 * noise.rate * (z @ z.T - n).astype(float)
    h_static = model.matrix(0.0) if getattr(model, "static", False) else None

    def rhs(t, r):
        H = h_static if h_static is not None else model.matrix(t)
        hr = H @ r
        return -1j * (hr - hr.conj().T) + dephase * r

    snaps = np.empty((len(times),) + rho.shape, dtype=complex) if store else None
    obs = []
    drift = 0.0
    worst = 0.0

    def record(i, t):
        if store:
            snaps[i] = rho
        if observer is not None:
            obs.append(observer(t, rho))

    record(0, times[0])
    for i, runs in enumerate(segments):
        for t, h, ns, end in runs:
            for s in range(ns):
                ts = t + s * h
                te = end if s == ns - 1 else ts + h
                k1 = rhs(ts, rho)
                k2 = rhs(ts + 0.5 * h, rho + 0.5 * h * k1)
                k3 = rhs(ts + 0.5 * h, rho + 0.5 * h * k2)
                k4 = rhs(te, rho + h * k3)
                rho = rho + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
                d = abs(np.trace(rho) - 1)
                if not math.isfinite(d):
                    raise NumericError(f"density matrix diverged at t={ts + h}")
                drift += d
                worst = max(worst, d)
        record(i + 1, times[i + 1])
    dt, n_steps = _step_stats(segments)
    herm = np.max(np.abs(rho - rho.conj().T))
    tr = abs(np.trace(rho) - 1)
    if herm > tol or tr > tol:
        raise NumericError(f"Lindblad run lost accuracy: trace error {tr:.2e}, "
                           f"Hermiticity error {herm:.2e} (tolerance {tol:.0e}); "
                           "increase nu")
    return Trajectory(_freeze(times), None if snaps is None else _freeze(snaps), n, "density",
                      model.frame, dt, n_steps, drift, worst, obs)


def expm_oracle(H_dense, psi0, t):
    """``exp(-i H t) psi0`` by dense eigendecomposition."""
    H = np.asarray(H_dense, dtype=complex)
    n = int(round(np.log2(H.shape[0])))
    if n > ORACLE_CAP:
        raise ResourceError(f"expm oracle is capped at {ORACLE_CAP} sites, got {n}",
                            16 * 4 ** n)
    if np.max(np.abs(H - H.conj().T)) > 1e-10:
        raise ValueError("Hamiltonian is not Hermitian")
    w, v = np.linalg.eigh(H)
    psi = np.asarray(psi0.amplitudes if isinstance(psi0, PureState) else psi0, dtype=complex)
    out = v @ (np.exp(-1j * w * t) * (v.conj().T @ psi))
    return PureState(n, out)
