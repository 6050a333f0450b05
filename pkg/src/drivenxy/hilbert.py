"""Computational-basis states and matrix-free spin operators.

Basis convention: site ``n`` is bit ``n`` of the basis index (little
endian). A cleared bit is ``|0>``, the sigma^z = +1 eigenstate, so the
all-zero index 0 is the fully aligned state ``|00...0>``. Ket strings such
as ``"100"`` list sites in increasing order, i.e. ``"100"`` has site 0
excited and maps to index 1.

sigma^+ = (sigma^x + i sigma^y)/2 raises the sigma^z eigenvalue and hence
maps ``|1> -> |0>``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ResourceError

__all__ = [
    "ORACLE_CAP",
    "PureState",
    "DensityMatrix",
    "TwoQubitState",
    "basis_state",
    "vacuum",
    "apply_pauli",
    "apply_two_site",
    "partial_trace",
    "dense_operator",
    "PAULI",
]

ORACLE_CAP = 6

PAULI = {
    "i": np.eye(2, dtype=complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "+": np.array([[0, 1], [0, 0]], dtype=complex),
    "-": np.array([[0, 0], [1, 0]], dtype=complex),
}

_TWO_SITE_KINDS = ("swap+-", "swap-+", "raise++", "lower--", "xx", "yy")


def _frozen(a, dtype=complex):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


def _check_dim(n_sites, length, what):
    if n_sites < 1:
        raise ValueError(f"n_sites must be positive, got {n_sites}")
    if length != 2 ** n_sites:
        raise ValueError(f"{what} has length {length}, expected 2**{n_sites}")


@dataclass(frozen=True)
class PureState:
    """State vector over the ``2**n_sites`` computational basis.

    The amplitudes are stored read-only. Normalization is not enforced here
    because operator images (e.g. sigma^+ on ``|0>``) need not be normalized.
    """

    n_sites: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes).reshape(-1)
        _check_dim(self.n_sites, amps.size, "amplitudes")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self):
        nrm = self.norm
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return PureState(self.n_sites, self.amplitudes / nrm)

    def density_matrix(self):
        return DensityMatrix(self.n_sites, np.outer(self.amplitudes, self.amplitudes.conj()))

    def fidelity(self, other):
        return float(abs(np.vdot(self.amplitudes, _vector(other))) ** 2)


@dataclass(frozen=True)
class DensityMatrix:
    n_sites: int
    entries: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.entries)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        _check_dim(self.n_sites, rho.shape[0], "density matrix")
        object.__setattr__(self, "entries", rho)

    @property
    def trace(self):
        return complex(np.trace(self.entries))

    def check(self, atol=1e-10, pos_tol=1e-8):
        """Raise ``ValueError`` unless Hermitian, unit-trace and positive."""
        rho = self.entries
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > atol:
            raise ValueError(f"not Hermitian (deviation {herm:.3e})")
        if abs(self.trace - 1) > atol:
            raise ValueError(f"trace is {self.trace}, expected 1")
        lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
        if lo < -pos_tol:
            raise ValueError(f"negative eigenvalue {lo:.3e}")
        return self


@dataclass(frozen=True)
class TwoQubitState:
    """Reduced state of a site pair; ``site_pair[0]`` is the first tensor factor."""

    entries: np.ndarray
    site_pair: tuple = (0, 1)

    def __post_init__(self):
        rho = _frozen(self.entries)
        if rho.shape != (4, 4):
            raise ValueError(f"two-qubit state must be 4x4, got {rho.shape}")
        object.__setattr__(self, "entries", rho)
        object.__setattr__(self, "site_pair", tuple(self.site_pair))

    @classmethod
    def from_ket(cls, ket, site_pair=(0, 1)):
        """Build from amplitudes ordered ``|00>, |01>, |10>, |11>`` (first factor leftmost)."""
        ket = np.asarray(ket, dtype=complex).reshape(4)
        return cls(np.outer(ket, ket.conj()), site_pair)

    @property
    def trace(self):
        return complex(np.trace(self.entries))


def basis_state(bits):
    """Computational basis state from a ket string, site 0 first."""
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"invalid ket string {bits!r}")
    n = len(bits)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[sum(1 << i for i, c in enumerate(bits) if c == "1")] = 1.0
    return PureState(n, amps)


def vacuum(n_sites):
    """The fully aligned state ``|00...0>``."""
    amps = np.zeros(2 ** n_sites, dtype=complex)
    amps[0] = 1.0
    return PureState(n_sites, amps)


@lru_cache(maxsize=None)
def _indices(n_sites):
    idx = np.arange(2 ** n_sites)
    idx.setflags(write=False)
    return idx


@lru_cache(maxsize=None)
def site_bits(n_sites):
    """(2**n_sites, n_sites) array of occupation bits, read-only."""
    bits = (_indices(n_sites)[:, None] >> np.arange(n_sites)) & 1
    bits.setflags(write=False)
    return bits


def _vector(state):
    if isinstance(state, PureState):
        return state.amplitudes
    return np.asarray(state, dtype=complex)


def _check_site(site, n_sites):
    if not 0 <= site < n_sites:
        raise IndexError(f"site {site} out of range for {n_sites} sites")


def apply_pauli(state, site, axis):
    """Apply one of ``x, y, z, +, -`` on ``site`` and return the image.

    The input is left untouched; every output amplitude is read from exactly
    one input amplitude.
    """
    n = state.n_sites
    _check_site(site, n)
    psi = state.amplitudes
    idx = _indices(n)
    b = (idx >> site) & 1
    if axis == "z":
        out = (1 - 2 * b) * psi
    else:
        src = psi[idx ^ (1 << site)]
        if axis == "x":
            out = src
        elif axis == "y":
            out = 1j * (2 * b - 1) * src
        elif axis == "+":
            out = np.where(b == 0, src, 0)
        elif axis == "-":
            out = np.where(b == 1, src, 0)
        else:
            raise ValueError(f"unknown Pauli axis {axis!r}")
    return PureState(n, out)


def apply_two_site(state, n, m, kind, coeff=1.0):
    """Apply ``coeff`` times a two-site operator on sites ``n`` and ``m``.

    ``kind`` is one of ``swap+-`` (sigma^+_n sigma^-_m), ``swap-+``,
    ``raise++``, ``lower--``, ``xx`` or ``yy``.
    """
    N = state.n_sites
    _check_site(n, N)
    _check_site(m, N)
    if n == m:
        raise ValueError("two-site operator needs distinct sites")
    idx = _indices(N)
    bn = (idx >> n) & 1
    bm = (idx >> m) & 1
    src = state.amplitudes[idx ^ ((1 << n) | (1 << m))]
    # factor indexed by the target basis state
    if kind == "swap+-":
        factor = (bn == 0) & (bm == 1)
    elif kind == "swap-+":
        factor = (bn == 1) & (bm == 0)
    elif kind == "raise++":
        factor = (bn == 0) & (bm == 0)
    elif kind == "lower--":
        factor = (bn == 1) & (bm == 1)
    elif kind == "xx":
        factor = 1.0
    elif kind == "yy":
        factor = -(2 * bn - 1) * (2 * bm - 1)
    else:
        raise ValueError(f"unknown two-site kind {kind!r}; expected one of {_TWO_SITE_KINDS}")
    return PureState(N, coeff * factor * src)


def partial_trace(source, keep):
    """Reduced density matrix of the pair ``keep = (j, k)``.

    ``source`` may be a :class:`PureState`, a :class:`DensityMatrix` or a raw
    vector/matrix (``n_sites`` is then inferred from the length).
    """
    j, k = keep
    if isinstance(source, (PureState, DensityMatrix)):
        n = source.n_sites
        data = source.amplitudes if isinstance(source, PureState) else source.entries
    else:
        data = np.asarray(source, dtype=complex)
        n = int(round(np.log2(data.shape[0])))
    _check_site(j, n)
    _check_site(k, n)
    if j == k:
        raise ValueError("partial trace needs two distinct sites")
    # reshape axis a holds site n-1-a
    aj, ak = n - 1 - j, n - 1 - k
    if data.ndim == 1:
        t = np.moveaxis(data.reshape((2,) * n), (aj, ak), (0, 1)).reshape(4, -1)
        rho = t @ t.conj().T
    else:
        t = data.reshape((2,) * (2 * n))
        t = np.moveaxis(t, (aj, ak, n + aj, n + ak), (0, 1, n, n + 1))
        rest = 2 ** (n - 2)
        rho = np.einsum("iaja->ij", t.reshape(4, rest, 4, rest))
    return TwoQubitState(rho, (j, k))


def dense_operator(terms, n_sites, cap=ORACLE_CAP):
    """Dense matrix of a sum of Pauli-string terms (test oracle).

    ``terms`` is an iterable of ``(coeff, ops)`` with ``ops`` a sequence of
    ``(site, axis)`` pairs; sites not named carry the identity.
    """
    if n_sites > cap:
        need = 16 * 4 ** n_sites
        raise ResourceError(
            f"dense operator for {n_sites} sites exceeds the oracle cap of {cap} "
            f"(would need {need} bytes)", required_bytes=need)
    dim = 2 ** n_sites
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, ops in terms:
        local = [PAULI["i"]] * n_sites
        for site, axis in ops:
            _check_site(site, n_sites)
            local[site] = local[site] @ PAULI[axis]
        mat = np.ones((1, 1), dtype=complex)
        for site in reversed(range(n_sites)):
            mat = np.kron(mat, local[site])
        out += coeff * mat
    return out
