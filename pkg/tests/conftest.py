"""Shared oracles for the test suite.

The dense operators here are built from explicit Kronecker products and do
not touch the package's own matrix builders.
"""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SP = np.array([[0, 1], [0, 0]], dtype=complex)  # |1> -> |0>
SM = SP.T.copy()
SPIN_FLIP_ORACLE = np.kron(SY, SY)
OPS = {"x": SX, "y": SY, "z": SZ, "+": SP, "-": SM}


def kron_op(local, n):
    """Dense operator with ``local[site]`` on the given sites.

    Site 0 is the least significant bit, so the Kronecker product runs from
    site ``n-1`` down to site 0.
    """
    out = np.array([[1.0 + 0j]])
    for site in reversed(range(n)):
        out = np.kron(out, local.get(site, I2))
    return out


def lab_hamiltonian_oracle(n, edges, gamma, h, J):
    """``1/2 sum h_n sz_n + sum J_e/4 [(1+g) sx sx + (1-g) sy sy]``."""
    H = sum(0.5 * h[s] * kron_op({s: SZ}, n) for s in range(n))
    for (a, b), j in zip(edges, J):
        H = H + j / 4 * ((1 + gamma) * kron_op({a: SX, b: SX}, n)
                         + (1 - gamma) * kron_op({a: SY, b: SY}, n))
    return H


def random_state(rng, n):
    v = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return v / np.linalg.norm(v)


def random_density(rng, n, rank=None):
    dim = 2 ** n
    rank = rank or dim
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def loop_partial_trace(rho, n, j, k):
    """Reduced pair matrix by an explicit sum over all basis indices."""
    out = np.zeros((4, 4), dtype=complex)
    dim = 2 ** n
    for r in range(dim):
        for c in range(dim):
            rest_r = [(r >> s) & 1 for s in range(n) if s not in (j, k)]
            rest_c = [(c >> s) & 1 for s in range(n) if s not in (j, k)]
            if rest_r != rest_c:
                continue
            a = 2 * ((r >> j) & 1) + ((r >> k) & 1)
            b = 2 * ((c >> j) & 1) + ((c >> k) & 1)
            out[a, b] += rho[r, c]
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


VERDICTS = []


def record_verdict(name, ok, detail):
    VERDICTS.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
