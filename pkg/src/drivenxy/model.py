"""Spin networks, drive protocols and their time-dependent Hamiltonians.

The lab-frame Hamiltonian of a network with edges ``(n, m)`` is::

    H(t) = 1/2 sum_n h_n(t) sz_n
         + sum_(n,m) J_nm(t)/4 [(1 + gamma) sx_n sx_m + (1 - gamma) sy_n sy_m]

with ``h_n(t) = eps_n (h0 + h1 sin(w t)) + offset_n`` and
``J_nm(t) = scale_nm (J0 + J1 sin(w t))``. Couplings and the ac part of the
field vanish before the quench time ``t_on``.

Moving to the frame ``U0(t) = exp(-i sum_n phi_n(t) sz_n)`` with
``dphi_n/dt = h_n/2`` removes the Zeeman term and leaves the swap and pair
terms dressed with the phases ``delta = 2 (phi_n - phi_m)`` and
``sigma = 2 (phi_n + phi_m)``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator

from .hilbert import PureState, site_bits, _indices

__all__ = [
    "NetworkSpec",
    "DriveProtocol",
    "PhaseFrame",
    "drive_values",
    "edge_couplings",
    "interaction_phases",
    "rotate_frame",
    "EdgeHamiltonian",
    "LabHamiltonian",
    "InteractionHamiltonian",
    "StaticEdgeHamiltonian",
    "hamiltonian_action",
    "excitation_number",
]


def _floats(values, n, default, name):
    if values is None:
        values = [default] * n
    elif np.isscalar(values):
        values = [values] * n
    values = tuple(float(v) for v in values)
    if len(values) != n:
        raise ValueError(f"{name} needs {n} entries, got {len(values)}")
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"{name} entries must be finite")
    return values


def _bools(values, n, name):
    if values is None:
        return (True,) * n
    if isinstance(values, (bool, np.bool_)):
        return (bool(values),) * n
    values = tuple(bool(v) for v in values)
    if len(values) != n:
        raise ValueError(f"{name} needs {n} entries, got {len(values)}")
    return values


@dataclass(frozen=True)
class NetworkSpec:
    """Topology and static parameters of a spin network.

    ``edge_scale`` multiplies ``J(t)`` per edge. Edges with
    ``edge_driven=False`` only carry the dc coupling ``J0``; sites with
    ``ac_field=False`` only see the dc field. ``field_offset`` adds a static
    per-site field on top of ``eps_n h(t)``.
    """

    n_sites: int
    edges: tuple
    gamma: float = 0.0
    epsilon: tuple = None
    edge_scale: tuple = None
    edge_driven: tuple = None
    field_offset: tuple = None
    ac_field: tuple = None

    def __post_init__(self):
        n = int(self.n_sites)
        if n < 1:
            raise ValueError(f"n_sites must be positive, got {n}")
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        seen = set()
        for a, b in edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) references a site outside 0..{n - 1}")
            if a == b:
                raise ValueError(f"self-loop on site {a}")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        if not math.isfinite(self.gamma):
            raise ValueError("gamma must be finite")
        ne = len(edges)
        object.__setattr__(self, "n_sites", n)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "epsilon", _floats(self.epsilon, n, 1.0, "epsilon"))
        object.__setattr__(self, "edge_scale", _floats(self.edge_scale, ne, 1.0, "edge_scale"))
        object.__setattr__(self, "edge_driven", _bools(self.edge_driven, ne, "edge_driven"))
        object.__setattr__(self, "field_offset", _floats(self.field_offset, n, 0.0, "field_offset"))
        object.__setattr__(self, "ac_field", _bools(self.ac_field, n, "ac_field"))

    @classmethod
    def chain(cls, n_sites, gamma=0.0, epsilon=None):
        """Open linear chain with nearest-neighbour edges ``(n, n+1)``."""
        return cls(n_sites, tuple((n, n + 1) for n in range(n_sites - 1)), gamma, epsilon)

    @property
    def homogeneous(self):
        return (len(set(self.epsilon)) == 1 and not any(self.field_offset)
                and len(set(self.ac_field)) == 1)

    def end_pair(self):
        return (0, self.n_sites - 1)


@dataclass(frozen=True)
class DriveProtocol:
    """dc/ac amplitudes of the field and coupling drives."""

    h0: float = 1.0
    h1: float = 0.0
    J0: float = 0.0
    J1: float = 0.0
    omega_d: float = 0.0
    t_on: float = 0.0

    def __post_init__(self):
        for name in ("h0", "h1", "J0", "J1", "omega_d", "t_on"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, float(v))
        if (self.h1 != 0 or self.J1 != 0) and self.omega_d <= 0:
            raise ValueError("omega_d must be positive when an ac amplitude is nonzero")

    def replace(self, **changes):
        return DriveProtocol(**{**self.__dict__, **changes})

    def window(self, n_sites):
        """End of the observation window, ``4 N / max(J0, J1)``."""
        jmax = max(self.J0, self.J1)
        if jmax <= 0:
            raise ValueError("observation window undefined for max(J0, J1) <= 0")
        return 4.0 * n_sites / jmax

    def _ac(self, t):
        if t < self.t_on or self.omega_d == 0:
            return 0.0
        return math.sin(self.omega_d * t)


def drive_values(p, spec, t):
    """Local fields ``h_n(t)`` and the global coupling ``J(t)``."""
    s = p._ac(t)
    eps = np.asarray(spec.epsilon)
    ac = np.asarray(spec.ac_field, dtype=float)
    h = eps * (p.h0 + ac * p.h1 * s) + np.asarray(spec.field_offset)
    J = p.J0 + p.J1 * s if t >= p.t_on else 0.0
    return h, J


def edge_couplings(p, spec, t):
    """Per-edge couplings ``J_nm(t)``."""
    if t < p.t_on:
        return np.zeros(len(spec.edges))
    s = p._ac(t)
    driven = np.asarray(spec.edge_driven, dtype=float)
    return np.asarray(spec.edge_scale) * (p.J0 + driven * p.J1 * s)


@dataclass(frozen=True)
class PhaseFrame:
    """Accumulated local phases at time ``t`` and the derived edge phases."""

    t: float
    phi: np.ndarray
    edges: tuple = field(default=())

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)

    @property
    def delta(self):
        """Phase of the swap term sigma^+_n sigma^-_m on each edge."""
        return np.array([2.0 * (self.phi[a] - self.phi[b]) for a, b in self.edges])

    @property
    def sigma(self):
        """Phase of the pair term sigma^+_n sigma^+_m on each edge."""
        return np.array([2.0 * (self.phi[a] + self.phi[b]) for a, b in self.edges])


def interaction_phases(p, spec, t):
    """Closed-form ``phi_n(t) = 1/2 int_0^t h_n(s) ds``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    eps = np.asarray(spec.epsilon)
    ac = np.asarray(spec.ac_field, dtype=float)
    integral = (eps * p.h0 + np.asarray(spec.field_offset)) * t
    if p.h1 != 0 and t > p.t_on:
        w = p.omega_d
        integral = integral + ac * eps * p.h1 * (math.cos(w * p.t_on) - math.cos(w * t)) / w
    return PhaseFrame(t, 0.5 * integral, spec.edges)


def rotate_frame(state, frame, direction):
    """Apply ``U0^dagger`` (``to_interaction``) or ``U0`` (``to_lab``)."""
    phi = frame.phi
    if state.n_sites != phi.size:
        raise ValueError(f"state has {state.n_sites} sites, frame has {phi.size}")
    z = 1 - 2 * site_bits(state.n_sites)
    angle = z @ phi
    if direction == "to_interaction":
        phase = np.exp(1j * angle)
    elif direction == "to_lab":
        phase = np.exp(-1j * angle)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return PureState(state.n_sites, phase * state.amplitudes)


def excitation_number(state):
    """Expectation of ``sum_n (1 - sz_n)/2``."""
    if isinstance(state, PureState):
        n, psi = state.n_sites, state.amplitudes
    else:
        psi = np.asarray(state)
        n = int(round(np.log2(psi.shape[0])))
    counts = site_bits(n).sum(axis=1)
    if psi.ndim == 1:
        return float(np.sum(counts * np.abs(psi) ** 2))
    return float(np.real(np.sum(counts * np.diag(psi))))


# source-bit class on an edge (n, m), code = b_n + 2 b_m, and the ladder
# pair that acts on it: sigma^+ clears a set bit, sigma^- sets a clear one
_LADDER = {
    0: ("-", "-"),
    1: ("+", "-"),
    2: ("-", "+"),
    3: ("+", "+"),
}


class EdgeHamiltonian:
    """Matrix-free Hamiltonian built from site fields and edge ladder terms.

    Subclasses supply ``fields(t)`` (coefficients of sz_n) and
    ``edge_table(t)``, an ``(E, 4)`` array with the coefficients of
    sigma^-sigma^-, sigma^+sigma^-, sigma^-sigma^+ and sigma^+sigma^+ on
    every edge, in that order.
    """

    frame = "lab"
    static = False

    def __init__(self, spec):
        self.spec = spec
        self.n_sites = spec.n_sites
        self.dim = 2 ** spec.n_sites
        idx = _indices(self.n_sites)
        bits = site_bits(self.n_sites)
        self._z = (1 - 2 * bits).astype(float)
        ne = len(spec.edges)
        self._perm = np.empty((ne, self.dim), dtype=np.intp)
        self._cls = np.empty((ne, self.dim), dtype=np.intp)
        for e, (a, b) in enumerate(spec.edges):
            src = idx ^ ((1 << a) | (1 << b))
            self._perm[e] = src
            self._cls[e] = bits[src, a] + 2 * bits[src, b]
        self._erow = np.arange(ne)[:, None]

    def fields(self, t):
        return np.zeros(self.n_sites)

    def edge_table(self, t):
        raise NotImplementedError

    def apply(self, t, psi):
        """``H(t) psi`` for a vector or a stack of column vectors."""
        coef = self.edge_table(t)[self._erow, self._cls]
        diag = self._z @ self.fields(t)
        if psi.ndim == 2:
            coef = coef[..., None]
            diag = diag[:, None]
        out = diag * psi
        if len(self._perm):
            out = out + (coef * psi[self._perm]).sum(axis=0)
        return out

    __call__ = apply

    def matrix(self, t):
        """Dense ``H(t)``."""
        m = np.diag((self._z @ self.fields(t)).astype(complex))
        coef = self.edge_table(t)[self._erow, self._cls]
        rows = np.broadcast_to(_indices(self.n_sites), self._perm.shape)
        np.add.at(m, (rows.ravel(), self._perm.ravel()), coef.ravel())
        return m

    def at(self, t, phases=None):
        """Fixed-time ``scipy`` linear operator."""
        if phases is not None:
            if self.frame != "interaction":
                raise ValueError("a phase frame only applies to the interaction picture")
            if not math.isclose(phases.t, t, rel_tol=0, abs_tol=1e-12):
                raise ValueError(f"phase frame is for t={phases.t}, requested t={t}")
        return LinearOperator((self.dim, self.dim), matvec=lambda v: self.apply(t, v),
                              rmatvec=lambda v: self.apply(t, v), dtype=complex)

    def terms(self, t):
        """Pauli-string terms of ``H(t)`` for :func:`hilbert.dense_operator`."""
        out = [(f, ((n, "z"),)) for n, f in enumerate(self.fields(t)) if f != 0]
        for (a, b), row in zip(self.spec.edges, self.edge_table(t)):
            for code, c in enumerate(row):
                if c != 0:
                    la, lb = _LADDER[code]
                    out.append((c, ((a, la), (b, lb))))
        return out

    @property
    def omega_max(self):
        raise NotImplementedError


class _DrivenHamiltonian(EdgeHamiltonian):
    def __init__(self, spec, protocol):
        super().__init__(spec)
        self.protocol = protocol
        p = protocol
        g = spec.gamma
        self._eps = np.asarray(spec.epsilon)
        self._ac_sites = np.asarray(spec.ac_field, dtype=float)
        self._offset = np.asarray(spec.field_offset)
        self._scale = np.asarray(spec.edge_scale)
        self._driven = np.asarray(spec.edge_driven, dtype=float)
        self._ea = np.array([a for a, _ in spec.edges], dtype=np.intp)
        self._eb = np.array([b for _, b in spec.edges], dtype=np.intp)
        # H(t) is affine in s = sin(w t): split diagonal and edge weights into dc and ac parts
        self._d_dc = self._z @ (0.5 * (self._eps * p.h0 + self._offset))
        self._d_ac = self._z @ (0.5 * self._eps * self._ac_sites * p.h1)
        base = 0.5 * np.array([g, 1.0, 1.0, g])[self._cls]
        self._w_dc = (self._scale * p.J0)[:, None] * base
        self._w_ac = (self._scale * self._driven * p.J1)[:, None] * base
        self._has_dc = bool(np.any(self._w_dc))
        self._has_ac = bool(np.any(self._w_ac))
        self._dense = None

    def _couplings(self, t):
        p = self.protocol
        if t < p.t_on:
            return np.zeros(self._scale.size)
        return self._scale * (p.J0 + self._driven * (p.J1 * p._ac(t)))

    def _edge_apply(self, t, psi):
        """Lab-frame coupling part of ``H(t) psi``; ``None`` while switched off."""
        if t < self.protocol.t_on or not len(self._perm):
            return None
        s = self.protocol._ac(t)
        src = psi[self._perm]
        if psi.ndim == 2:
            w_dc, w_ac = self._w_dc[..., None], self._w_ac[..., None]
        else:
            w_dc, w_ac = self._w_dc, self._w_ac
        if not self._has_ac:
            return (w_dc * src).sum(axis=0)
        if not self._has_dc:
            return s * (w_ac * src).sum(axis=0)
        return ((w_dc + s * w_ac) * src).sum(axis=0)

    def _edge_matrix(self, t):
        if self._dense is None:
            rows = np.broadcast_to(_indices(self.n_sites), self._perm.shape).ravel()
            parts = []
            for w in (self._w_dc, self._w_ac):
                m = np.zeros((self.dim, self.dim), dtype=complex)
                np.add.at(m, (rows, self._perm.ravel()), w.ravel())
                parts.append(m)
            self._dense = tuple(parts)
        if t < self.protocol.t_on:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return self._dense[0] + self.protocol._ac(t) * self._dense[1]


class LabHamiltonian(_DrivenHamiltonian):
    def apply(self, t, psi):
        diag = self._d_dc + self.protocol._ac(t) * self._d_ac
        out = (diag[:, None] if psi.ndim == 2 else diag) * psi
        edge = self._edge_apply(t, psi)
        return out if edge is None else out + edge

    __call__ = apply

    def matrix(self, t):
        m = self._edge_matrix(t)
        m[np.diag_indices(self.dim)] += self._d_dc + self.protocol._ac(t) * self._d_ac
        return m

    def fields(self, t):
        p = self.protocol
        return 0.5 * (self._eps * (p.h0 + self._ac_sites * (p.h1 * p._ac(t))) + self._offset)

    def edge_table(self, t):
        g = self.spec.gamma
        return 0.5 * self._couplings(t)[:, None] * np.array([g, 1.0, 1.0, g])

    def terms(self, t):
        """Terms written in the sx sx / sy sy form of the lab Hamiltonian."""
        h, _ = drive_values(self.protocol, self.spec, t)
        J = edge_couplings(self.protocol, self.spec, t)
        g = self.spec.gamma
        out = [(0.5 * hn, ((n, "z"),)) for n, hn in enumerate(h)]
        for (a, b), j in zip(self.spec.edges, J):
            out.append((j * (1 + g) / 4, ((a, "x"), (b, "x"))))
            out.append((j * (1 - g) / 4, ((a, "y"), (b, "y"))))
        return out

    @property
    def omega_max(self):
        return _omega_max(self.spec, self.protocol, interaction=False)


class InteractionHamiltonian(_DrivenHamiltonian):
    """``H~(t) = U0^dagger H_edges(t) U0`` with ``U0 = exp(-i sum phi_n sz_n)``.

    ``apply`` and ``matrix`` rotate the lab coupling part by the diagonal
    phase ``exp(i sum phi_n sz_n)``; ``edge_table`` spells out the same
    operator as phase-dressed ladder terms.
    """

    frame = "interaction"

    def _phi(self, t):
        p = self.protocol
        integral = (self._eps * p.h0 + self._offset) * t
        if p.h1 != 0 and t > p.t_on:
            w = p.omega_d
            integral = integral + self._ac_sites * self._eps * (
                p.h1 * (math.cos(w * p.t_on) - math.cos(w * t)) / w)
        return 0.5 * integral

    def _rotation(self, t):
        """``exp(i sum_n phi_n(t) sz_n)`` on the basis, i.e. the diagonal of ``U0^dagger``."""
        p = self.protocol
        theta = self._d_dc * t
        if p.h1 != 0 and t > p.t_on:
            w = p.omega_d
            theta = theta + self._d_ac * ((math.cos(w * p.t_on) - math.cos(w * t)) / w)
        return np.exp(1j * theta)

    def apply(self, t, psi):
        ph = self._rotation(t)
        if psi.ndim == 2:
            ph = ph[:, None]
        edge = self._edge_apply(t, ph.conj() * psi)
        return np.zeros_like(psi, dtype=complex) if edge is None else ph * edge

    __call__ = apply

    def matrix(self, t):
        ph = self._rotation(t)
        return ph[:, None] * self._edge_matrix(t) * ph.conj()[None, :]

    def edge_table(self, t):
        phi = self._phi(t)
        pa, pb = phi[self._ea], phi[self._eb]
        ed = np.exp(2j * (pa - pb))
        es = np.exp(2j * (pa + pb))
        g = self.spec.gamma
        return 0.5 * self._couplings(t)[:, None] * np.stack([g * es.conj(), ed, ed.conj(), g * es],
                                                            axis=1)

    @property
    def omega_max(self):
        return _omega_max(self.spec, self.protocol, interaction=True)


class StaticEdgeHamiltonian(EdgeHamiltonian):
    """Time-independent edge Hamiltonian with one shared ladder table."""

    static = True

    def __init__(self, spec, swap, pair, frame="interaction"):
        super().__init__(spec)
        self.frame = frame
        scale = np.asarray(spec.edge_scale)[:, None]
        self._table = scale * np.array([np.conj(pair), swap, np.conj(swap), pair], dtype=complex)

    def edge_table(self, t):
        return self._table

    @property
    def omega_max(self):
        return float(np.sum(np.max(np.abs(self._table), axis=1)))


def _omega_max(spec, p, interaction):
    eps = np.abs(np.asarray(spec.epsilon))
    off = np.abs(np.asarray(spec.field_offset))
    hmax = eps * (abs(p.h0) + abs(p.h1)) + off
    scale = np.abs(np.asarray(spec.edge_scale))
    jmax = scale * (abs(p.J0) + abs(p.J1))
    # operator-norm bound: one block per edge, plus the fields outside the interaction picture
    bound = 0.5 * np.sum(jmax * max(1.0, abs(spec.gamma)))
    freqs = [p.omega_d, abs(p.h0), abs(p.J0) + abs(p.J1), abs(p.h0) + abs(p.h1)]
    if interaction:
        # the pair phase exp(i Sigma) turns at up to twice the largest field
        freqs += [bound, 2.0 * hmax.max()]
    else:
        freqs.append(bound + 0.5 * hmax.sum())
    return float(max(freqs))


def hamiltonian_action(spec, protocol, frame="lab"):
    """Matrix-free ``H(t)`` (``lab``) or ``H~(t)`` (``interaction``)."""
    if frame == "lab":
        return LabHamiltonian(spec, protocol)
    if frame == "interaction":
        return InteractionHamiltonian(spec, protocol)
    raise ValueError(f"unknown frame {frame!r}")
