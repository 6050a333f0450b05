"""Rotating-wave effective models and analytic resonance conditions."""

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .errors import UnsupportedScenarioError
from .model import StaticEdgeHamiltonian

__all__ = [
    "EffectiveModel",
    "ResonancePrediction",
    "effective_resonant_model",
    "expansion_coefficient",
    "predict_resonances",
]


@dataclass(frozen=True)
class EffectiveModel:
    """Time-averaged coupling-drive model at ``omega_d = 2 h0``.

    ``H = J_eff sum [s+ s- + gamma_eff s+ s+ + h.c.]`` with ``J_eff = J0/2``
    and ``gamma_eff = gamma J1 / (2 J0)``. When ``J0 == 0`` the anisotropy is
    infinite: ``gamma_eff`` is ``None``, ``infinite_anisotropy`` is set, and
    only the pair term with amplitude ``pair_coupling = gamma J1 / 4``
    survives.
    """

    J_eff: float
    gamma_eff: float
    pair_coupling: float
    infinite_anisotropy: bool = False


def effective_resonant_model(spec, p):
    """Build the static effective model and its matrix-free action.

    The pair term is taken real. The exact time average carries an extra
    uniform phase on s+ s+, which a static local sz rotation removes, so
    concurrences are unaffected.

    Returns
    -------
    (EffectiveModel, StaticEdgeHamiltonian)
    """
    if p.h1 != 0:
        raise UnsupportedScenarioError("the effective model covers the coupling drive only (h1 = 0)")
    if not spec.homogeneous:
        raise UnsupportedScenarioError("the effective model needs homogeneous fields")
    if p.omega_d and not math.isclose(p.omega_d, 2 * p.h0 * spec.epsilon[0], rel_tol=1e-6):
        warnings.warn(f"effective model assumes omega_d = 2 h0, got omega_d={p.omega_d}",
                      stacklevel=2)
    pair = spec.gamma * p.J1 / 4
    if p.J0 == 0:
        model = EffectiveModel(0.0, None, pair, infinite_anisotropy=True)
    else:
        model = EffectiveModel(p.J0 / 2, spec.gamma * p.J1 / (2 * p.J0), pair)
    return model, StaticEdgeHamiltonian(spec, swap=p.J0 / 2, pair=pair)


def expansion_coefficient(n, k, h1, omega_d):
    """Coefficient of ``exp(i [2 h0 + (n - 2k) omega_d] t)`` in ``exp(i Sigma(t))``.

    With ``Sigma(t) = 2 h0 t + 2 (h1/omega_d) (1 - cos omega_d t)`` the
    expansion in powers of ``h1/omega_d`` gives
    ``exp(2i h1/omega_d) (-i)^n (h1/omega_d)^n / n! * binom(n, k)``.
    """
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    if omega_d <= 0:
        raise ValueError("omega_d must be positive")
    a = h1 / omega_d
    return complex(math.e ** (2j * a) * (-1j) ** n * a ** n / math.factorial(n) * math.comb(n, k))


@dataclass(frozen=True)
class ResonancePrediction:
    order: int
    k: int
    omega: float
    weight: float
    ratio: Fraction  # omega / h0, exact

    def residual(self):
        """``(2 h0 + (n - 2k) omega) / h0`` in exact rational arithmetic."""
        return 2 + (self.order - 2 * self.k) * self.ratio


def predict_resonances(h0, max_order, h1=None):
    """Positive driving frequencies with ``2 h0 + (n - 2k) omega = 0``.

    Entries are deduplicated (the lowest order wins) and sorted by
    ``weight = (h1/omega)^n / n!``. ``h1`` defaults to ``0.1 h0``.
    """
    if h0 <= 0:
        raise ValueError("h0 must be positive")
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    h1 = 0.1 * h0 if h1 is None else h1
    found = {}
    for n in range(1, max_order + 1):
        for k in range(n + 1):
            if 2 * k <= n:
                continue
            ratio = Fraction(2, 2 * k - n)
            if ratio in found:
                continue
            omega = float(ratio) * h0
            found[ratio] = ResonancePrediction(n, k, omega, abs(h1 / omega) ** n / math.factorial(n),
                                               ratio)
    return sorted(found.values(), key=lambda r: (-r.weight, r.order, -r.omega))
