"""T-junction routers, entanglement splitting and multipartite target states.

Site layout of a router: the trunk occupies sites ``0 .. L-1`` with the
sender (Alice) on site 0, the junction is site ``L``, and each arm follows
as a contiguous block attached to the junction by its first site.
"""

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .entanglement import concurrence, concurrence_trace
from .errors import ResourceError
from .hilbert import PureState, partial_trace
from .model import NetworkSpec, excitation_number, hamiltonian_action
from .propagate import evolve_pure

__all__ = [
    "RouterSpec",
    "SplitState",
    "SplitResult",
    "build_router_graph",
    "run_split_experiment",
    "multipartite_target_state",
    "pairwise_concurrence_table",
]

_DRIVES = ("driven", "undriven")
_INITS = ("bell", "neighbor", "excitation")


@dataclass(frozen=True)
class RouterSpec:
    """Geometry and drive assignment of a router.

    ``init`` selects the initial state of :func:`run_split_experiment`:
    ``bell`` shares a Bell pair between Alice and her neighbour (site 1),
    ``neighbor`` puts one excitation on site 1 and ``excitation`` one on
    Alice. ``alice_link`` scales Alice's coupling to site 1 and defaults to
    0 for ``bell`` (Alice keeps her half of the pair) and 1 otherwise.
    ``labels`` optionally names parties by site.
    """

    trunk_length: int
    arm_lengths: tuple = (1, 1)
    arm_drive: tuple = None
    trunk_drive: str = "undriven"
    arm_field_offset: tuple = None
    init: str = "bell"
    alice_link: float = None
    labels: dict = None

    def __post_init__(self):
        arms = tuple(int(a) for a in self.arm_lengths)
        if self.trunk_length < 1 or not arms or min(arms) < 1:
            raise ValueError("trunk and arm lengths must be at least 1")
        if len(arms) < 2:
            raise ValueError("a router needs at least two arms")
        drive = self.arm_drive or ("driven",) * len(arms)
        if isinstance(drive, str):
            drive = (drive,) * len(arms)
        drive = tuple(drive)
        offsets = self.arm_field_offset or (0.0,) * len(arms)
        if len(drive) != len(arms) or len(offsets) != len(arms):
            raise ValueError("per-arm settings must match the number of arms")
        if set(drive) - set(_DRIVES) or self.trunk_drive not in _DRIVES:
            raise ValueError(f"drive assignments must be one of {_DRIVES}")
        if self.init not in _INITS:
            raise ValueError(f"init must be one of {_INITS}")
        object.__setattr__(self, "arm_lengths", arms)
        object.__setattr__(self, "arm_drive", drive)
        object.__setattr__(self, "arm_field_offset", tuple(float(o) for o in offsets))
        if self.labels:
            n = self.n_sites
            sites = list(self.labels.values())
            if len(set(sites)) != len(sites):
                raise ValueError(f"overlapping site labels: {self.labels}")
            if any(not 0 <= s < n for s in sites):
                raise ValueError(f"label outside 0..{n - 1}: {self.labels}")

    @property
    def junction(self):
        return self.trunk_length

    @property
    def n_sites(self):
        return self.trunk_length + 1 + sum(self.arm_lengths)

    def arm_sites(self):
        """Site indices of each arm, ordered from the junction outward."""
        out, start = [], self.junction + 1
        for length in self.arm_lengths:
            out.append(list(range(start, start + length)))
            start += length
        return out

    @property
    def alice_link_scale(self):
        if self.alice_link is not None:
            return float(self.alice_link)
        return 0.0 if self.init == "bell" else 1.0


def build_router_graph(r, gamma=0.0):
    """Network of the trunk chain plus arms joined at the junction."""
    n = r.n_sites
    edges, scale, driven = [], [], []
    trunk_driven = r.trunk_drive == "driven"
    for a in range(r.junction):
        edges.append((a, a + 1))
        scale.append(r.alice_link_scale if a == 0 else 1.0)
        driven.append(trunk_driven)
    ac = [trunk_driven] * (r.junction + 1)
    offset = [0.0] * (r.junction + 1)
    for sites, drive, off in zip(r.arm_sites(), r.arm_drive, r.arm_field_offset):
        is_driven = drive == "driven"
        for a, b in zip([r.junction] + sites[:-1], sites):
            edges.append((a, b))
            scale.append(1.0)
            driven.append(is_driven)
        ac += [is_driven] * len(sites)
        offset += [off] * len(sites)
    return NetworkSpec(n, tuple(edges), gamma, edge_scale=scale, edge_driven=driven,
                       field_offset=offset, ac_field=ac)


def _initial_state(r):
    amps = np.zeros(2 ** r.n_sites, dtype=complex)
    if r.init == "bell":
        amps[1] = amps[2] = 1 / np.sqrt(2)
    elif r.init == "neighbor":
        amps[2] = 1.0
    else:
        amps[1] = 1.0
    return PureState(r.n_sites, amps)


@dataclass(frozen=True)
class SplitResult:
    traces: dict
    arm_sites: list
    arrival_times: dict
    peaks: dict
    excitation_drift: float
    flagged: bool = False
    notes: list = field(default_factory=list)


def run_split_experiment(r, p, t_span=None, gamma=0.0, samples=400, step_control=None):
    """Propagate the router and trace ``C(Alice, n)`` for every arm site.

    ``t_span`` defaults to the window ``(0, 4 N / max(J0, J1))``. A nonzero
    ``gamma`` runs but is flagged, since routing assumes the isotropic chain.
    """
    notes = []
    if gamma != 0:
        msg = f"routing assumes gamma = 0, running with gamma={gamma}"
        warnings.warn(msg, stacklevel=2)
        notes.append(msg)
    spec = build_router_graph(r, gamma)
    if t_span is None:
        t_span = (0.0, p.window(spec.n_sites))
    psi0 = _initial_state(r)
    traj = evolve_pure(psi0, hamiltonian_action(spec, p), t_span, step_control, samples)
    n0 = excitation_number(psi0)
    drift = max(abs(excitation_number(traj.states[i]) - n0) for i in range(len(traj)))
    traces, arrivals, peaks = {}, {}, {}
    for site in itertools.chain.from_iterable(r.arm_sites()):
        tr = concurrence_trace(traj, 0, site)
        traces[site] = tr
        arrivals[site] = tr.t_max
        peaks[site] = tr.c_max
    return SplitResult(traces, r.arm_sites(), arrivals, peaks, drift, bool(notes), notes)


@dataclass(frozen=True)
class SplitState:
    """Single-excitation superposition shared among parties (site p = party p)."""

    labels: tuple
    amplitudes: np.ndarray
    state: PureState
    vacuum: complex = 0.0

    @property
    def n_sites(self):
        return self.state.n_sites


def multipartite_target_state(branches, labels=None, vacuum=0.0):
    """``sum_p a_p |0..1_p..0>`` (plus ``vacuum |0..0>``), normalized."""
    amps = np.asarray(branches, dtype=complex).ravel()
    n = amps.size
    if n < 1:
        raise ValueError("need at least one branch")
    norm = np.sqrt(np.sum(np.abs(amps) ** 2) + abs(vacuum) ** 2)
    if norm == 0:
        raise ValueError("branch amplitudes are all zero")
    amps = amps / norm
    psi = np.zeros(2 ** n, dtype=complex)
    psi[1 << np.arange(n)] = amps
    psi[0] = vacuum / norm
    labels = tuple(labels) if labels is not None else tuple(f"party{i}" for i in range(n))
    if len(labels) != n:
        raise ValueError("one label per branch")
    amps.setflags(write=False)
    return SplitState(labels, amps, PureState(n, psi), vacuum / norm)


def pairwise_concurrence_table(state, cap=12):
    """Symmetric matrix of ``C_jk`` over all site pairs."""
    if isinstance(state, SplitState):
        state = state.state
    n = state.n_sites
    if n > cap:
        raise ResourceError(f"pairwise table capped at {cap} sites, got {n}")
    table = np.zeros((n, n))
    for j, k in itertools.combinations(range(n), 2):
        table[j, k] = table[k, j] = concurrence(partial_trace(state, (j, k)))
    return table
