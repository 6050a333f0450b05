"""Splitting one half of a Bell pair into two arms of a T-junction.

Alice keeps one spin of a Bell pair and the other spin enters a trunk that
branches into two identical arms. With isotropic couplings the excitation
spreads symmetrically, so Bob and Charlie at the arm ends each become
entangled with Alice. The second part lists the pairwise concurrences of
the W-type target states such a splitter aims for.

Run with ``python3 demos/splitter.py``.
"""

import numpy as np

from drivenxy import load_preset, multipartite_target_state, pairwise_concurrence_table
from drivenxy import run_split_experiment

cfg = load_preset("router")
router = cfg.router
res = run_split_experiment(router, cfg.protocol, gamma=cfg.network.gamma, samples=cfg.samples)
bob, charlie = (arm[-1] for arm in router.arm_sites())
print(f"{router.n_sites} sites, junction at site {router.junction}")
for name, site in (("Bob", bob), ("Charlie", charlie)):
    print(f"  Alice-{name}: peak C = {res.peaks[site]:.3f} at t = {res.arrival_times[site]:.1f}")
print(f"  excitation number drift {res.excitation_drift:.1e}")

for amps, labels in (([1 / np.sqrt(2), 0.5, 0.5], ("Alice", "Bob", "Charlie")),
                     ([0.5] * 4, ("A", "B", "C", "D"))):
    state = multipartite_target_state(amps, labels)
    table = pairwise_concurrence_table(state)
    print("target", " + ".join(f"{a:.3f}|{l}>" for a, l in zip(amps, labels)))
    for j in range(len(amps)):
        for k in range(j + 1, len(amps)):
            print(f"  C({labels[j]}, {labels[k]}) = {table[j, k]:.4f}")
