"""How fast does dephasing erase the resonant entanglement?

The resonant coupling drive from ``resonance_scan.py`` is repeated under
pure dephasing of strength lambda on every site, with lambda measured in
units of the drive amplitude J = J1. The density matrix is integrated
directly, so this demo stays at four sites.

Run with ``python3 demos/dephasing.py``.
"""

from drivenxy import load_preset, run_decoherence_sweep

cfg = load_preset("fig5a", {"network.n_sites": "4", "run.samples": "200",
                            "sweep.lambda": "0, 1e-4, 1e-3, 1e-2, 3e-2"})
result = run_decoherence_sweep(cfg)
reference = result.c_max[0]
for lam, c, t in zip(result.values, result.c_max, result.t_max):
    print(f"  lambda = {lam:6.0e} J   C_max = {c:.3f}   ({c / reference:6.1%} of noiseless)"
          f"   at t = {t:.0f}")
