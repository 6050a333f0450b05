"""Parameter sweeps of the peak end-to-end concurrence.

Each grid point is an independent, pure function of ``(config, value)``,
so results do not depend on worker count or execution order.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import __version__
from .entanglement import ConcurrenceTrace, concurrences, pair_reductions
from .errors import ConfigError, ResourceError
from .hilbert import DensityMatrix, partial_trace, vacuum
from .model import hamiltonian_action
from .propagate import (LINDBLAD_CAP, NoiseSpec, StepControl, evolve_lindblad, evolve_pure,
                        lindblad_memory)

__all__ = [
    "SweepPoint",
    "SweepResult",
    "evaluate_point",
    "closed_system_trace",
    "run_frequency_sweep",
    "run_decoherence_sweep",
    "initial_state",
]

_DYNAMICS = ("coupling-drive", "field-drive")


@dataclass(frozen=True)
class SweepPoint:
    value: float
    c_max: float
    t_max: float
    drift: float
    n_steps: int


@dataclass(frozen=True)
class SweepResult:
    """Sweep output: one row per grid value plus a metadata echo."""

    axis: str
    values: np.ndarray
    c_max: np.ndarray
    t_max: np.ndarray
    drift: np.ndarray
    metadata: dict = field(default_factory=dict)

    def columns(self):
        return {"swept_value": self.values, "c_max": self.c_max, "t_max": self.t_max,
                "drift": self.drift}

    def argmax(self):
        return float(self.values[int(np.argmax(self.c_max))])


def initial_state(n_sites):
    """All spins in the reference state ``|00..0>``."""
    return vacuum(n_sites)


def _protocol_for(cfg, axis, value):
    if axis == "omega_d":
        return cfg.protocol.replace(omega_d=value), cfg.noise
    if axis == "lambda":
        return cfg.protocol, NoiseSpec(value * cfg.lambda_scale)
    return cfg.protocol, cfg.noise


def closed_system_trace(cfg, protocol=None, frame=None, samples=None):
    """Concurrence trace of the configured pair for a noiseless run."""
    protocol = protocol or cfg.protocol
    j, k = cfg.site_pair()
    model = hamiltonian_action(cfg.network, protocol, frame or cfg.frame)
    n = cfg.network.n_sites

    def observe(t, psi):
        return pair_reductions(psi[None], n, j, k)[0]

    window = cfg.t_end if cfg.t_end is not None else protocol.window(n)
    traj = evolve_pure(initial_state(n), model, (0.0, window), StepControl(cfg.nu),
                       samples or cfg.samples, store=False, observer=observe)
    trace = ConcurrenceTrace.from_values((j, k), traj.times, concurrences(np.array(traj.observations)))
    return trace, traj


def evaluate_point(cfg, axis, value):
    """Peak concurrence for one grid value.

    A closed system (zero dephasing) is propagated as a pure state; any
    positive rate uses the dense master equation. The interaction picture
    differs from the lab frame by local sz rotations, which leave pair
    concurrences unchanged and commute with the dephasing.
    """
    protocol, noise = _protocol_for(cfg, axis, value)
    if noise.rate == 0:
        trace, traj = closed_system_trace(cfg, protocol)
    else:
        n = cfg.network.n_sites
        j, k = cfg.site_pair()
        model = hamiltonian_action(cfg.network, protocol, cfg.frame)
        window = cfg.t_end if cfg.t_end is not None else protocol.window(n)
        traj = evolve_lindblad(initial_state(n).density_matrix(), model, noise,
                               (0.0, window), StepControl(cfg.nu), cfg.samples, store=False,
                               observer=lambda t, r: partial_trace(DensityMatrix(n, r),
                                                                   (j, k)).entries)
        trace = ConcurrenceTrace.from_values((j, k), traj.times,
                                             concurrences(np.array(traj.observations)))
    return SweepPoint(float(value), trace.c_max, trace.t_max, traj.norm_drift, traj.n_steps)


def _evaluate(args):
    return evaluate_point(*args)


def _run_points(cfg, axis, grid, workers):
    jobs = [(cfg, axis, v) for v in grid]
    workers = min(workers or cfg.workers, len(jobs)) or 1
    if workers <= 1:
        return [_evaluate(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_evaluate, jobs))


def _metadata(cfg, axis, points):
    meta = cfg.echo()
    meta.update({
        "swept": axis,
        "integrator": {"method": "rk4-fixed-step", "nu": cfg.nu, "frame": cfg.frame,
                       "steps_per_point": [p.n_steps for p in points]},
        "version": __version__,
    })
    return meta


def _collect(cfg, axis, points):
    arr = lambda name: np.array([getattr(p, name) for p in points], dtype=float)
    return SweepResult(axis, arr("value"), arr("c_max"), arr("t_max"), arr("drift"),
                       _metadata(cfg, axis, points))


def _check_dynamics(cfg, axis):
    errors = []
    if cfg.scenario not in _DYNAMICS:
        errors.append(f"scenario {cfg.scenario!r} cannot be swept; use coupling-drive or field-drive")
    if cfg.axis != axis:
        errors.append(f"this sweep needs [sweep] {axis}, config sweeps {cfg.axis or 'nothing'}")
    elif not cfg.grid:
        errors.append(f"[sweep] {axis}: grid is empty")
    if errors:
        raise ConfigError(errors)


def run_frequency_sweep(cfg, workers=None):
    """``C_max`` of the configured pair against the driving frequency.

    Parameters
    ----------
    cfg : SweepConfig
        Must sweep ``omega_d``. A positive ``[noise] lambda`` switches every
        point to the master equation.
    workers : int, optional
        Process count; overrides ``cfg.workers``.
    """
    _check_dynamics(cfg, "omega_d")
    if cfg.noise.rate > 0:
        _check_lindblad(cfg)
    return _collect(cfg, "omega_d", _run_points(cfg, "omega_d", cfg.grid, workers))


def _check_lindblad(cfg):
    n = cfg.network.n_sites
    if n > LINDBLAD_CAP:
        need = lindblad_memory(n, 0)
        raise ResourceError(f"dephasing runs are capped at {LINDBLAD_CAP} sites, got {n}; "
                            f"a dense density matrix would need about {need / 2 ** 20:.1f} MiB",
                            need)


def run_decoherence_sweep(cfg, workers=None, frequencies=None):
    """``C_max`` against the dephasing rate at the configured ``omega_d``.

    Rates in ``cfg.grid`` are in units of ``cfg.lambda_unit``. With
    ``frequencies`` given, a full frequency curve is returned per rate as
    well, as ``(result, {rate: SweepResult})``.
    """
    _check_dynamics(cfg, "lambda")
    if max(cfg.grid) > 0:
        _check_lindblad(cfg)
    result = _collect(cfg, "lambda", _run_points(cfg, "lambda", cfg.grid, workers))
    if frequencies is None:
        return result
    curves = {}
    for rate in cfg.grid:
        sub = replace(cfg, axis="omega_d", grid=tuple(frequencies),
                      noise=NoiseSpec(rate * cfg.lambda_scale))
        curves[rate] = _collect(sub, "omega_d", _run_points(sub, "omega_d", sub.grid, workers))
    return result, curves
