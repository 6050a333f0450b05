import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from drivenxy.entanglement import concurrence
from drivenxy.errors import ResourceError
from drivenxy.hilbert import partial_trace
from drivenxy.model import DriveProtocol, LabHamiltonian
from drivenxy.router import (RouterSpec, build_router_graph, multipartite_target_state,
                             pairwise_concurrence_table, run_split_experiment)


def test_router_layout():
    r = RouterSpec(2, (3, 3))
    assert r.n_sites == 9 and r.junction == 2
    assert r.arm_sites() == [[3, 4, 5], [6, 7, 8]]
    spec = build_router_graph(r)
    assert spec.edges == ((0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (2, 6), (6, 7), (7, 8))
    degree = np.bincount(np.ravel(spec.edges), minlength=9)
    assert degree[2] == 3
    # Alice keeps her half of the Bell pair: her link is decoupled
    assert spec.edge_scale[0] == 0.0 and set(spec.edge_scale[1:]) == {1.0}


def test_drive_assignment_reaches_the_hamiltonian():
    r = RouterSpec(1, (2, 2), arm_drive=("driven", "undriven"), init="excitation")
    spec = build_router_graph(r, gamma=0.0)
    p = DriveProtocol(h0=1, h1=0.3, J0=0.1, J1=0.2, omega_d=1.0)
    t = 0.9
    model = LabHamiltonian(spec, p)
    fields = 2 * model.fields(t)
    driven_sites, still_sites = [2, 3], [0, 1, 4, 5]
    assert np.allclose(fields[driven_sites], 1 + 0.3 * np.sin(t))
    assert np.allclose(fields[still_sites], 1.0)
    couplings = 2 * model.edge_table(t)[:, 1]
    assert np.allclose(couplings, [0.1, 0.1 + 0.2 * np.sin(t), 0.1 + 0.2 * np.sin(t), 0.1, 0.1])


def test_router_validation():
    with pytest.raises(ValueError):
        RouterSpec(0)
    with pytest.raises(ValueError):
        RouterSpec(2, (3,))
    with pytest.raises(ValueError):
        RouterSpec(2, (3, 3), arm_drive=("driven",))
    with pytest.raises(ValueError):
        RouterSpec(2, (3, 3), init="ghz")
    with pytest.raises(ValueError, match="overlapping"):
        RouterSpec(2, (3, 3), labels={"Bob": 5, "Charlie": 5})


def test_symmetric_splitter():
    r = RouterSpec(2, (3, 3), arm_drive="undriven")
    res = run_split_experiment(r, DriveProtocol(h0=1, J0=0.1), samples=200)
    for a, b in zip(*res.arm_sites):
        assert np.max(np.abs(res.traces[a].values - res.traces[b].values)) < 1e-8
    assert res.peaks[5] >= 0.3 and res.peaks[8] >= 0.3
    assert res.excitation_drift < 1e-10
    assert not res.flagged


def test_anisotropic_router_is_flagged():
    r = RouterSpec(1, (1, 1), init="neighbor")
    with pytest.warns(UserWarning, match="gamma"):
        res = run_split_experiment(r, DriveProtocol(h0=1, J0=0.1), (0, 5), gamma=0.5, samples=10)
    assert res.flagged and res.notes


def test_tripartite_target():
    s = multipartite_target_state([1 / np.sqrt(2), 0.5, 0.5], labels=("Alice", "Bob", "Charlie"))
    assert np.allclose(s.state.amplitudes[[1, 2, 4]], [1 / np.sqrt(2), 0.5, 0.5])
    table = pairwise_concurrence_table(s)
    assert table[0, 1] == pytest.approx(np.sqrt(0.5), abs=1e-6)
    assert table[0, 2] == pytest.approx(np.sqrt(0.5), abs=1e-6)
    assert table[1, 2] == pytest.approx(0.5, abs=1e-6)


@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                min_size=2, max_size=5).filter(lambda a: sum(abs(x) ** 2 for x in a) > 1e-3))
def test_single_excitation_pairs_follow_two_ab(branches):
    s = multipartite_target_state(branches)
    a = s.amplitudes
    assert np.sum(np.abs(a) ** 2) == pytest.approx(1)
    table = pairwise_concurrence_table(s)
    for j, k in itertools.combinations(range(len(a)), 2):
        assert table[j, k] == pytest.approx(2 * abs(a[j] * a[k]), abs=1e-7)
        assert table[j, k] == pytest.approx(concurrence(partial_trace(s.state, (j, k))))


def test_vacuum_admixture_keeps_pair_concurrence_formula():
    s = multipartite_target_state([1, 1], vacuum=1.0)
    a = s.amplitudes
    assert pairwise_concurrence_table(s)[0, 1] == pytest.approx(2 * abs(a[0] * a[1]), abs=1e-8)


def test_target_errors():
    with pytest.raises(ValueError):
        multipartite_target_state([0, 0])
    with pytest.raises(ValueError):
        multipartite_target_state([1, 1], labels=("only",))
    with pytest.raises(ResourceError):
        pairwise_concurrence_table(multipartite_target_state(np.ones(5)), cap=4)
