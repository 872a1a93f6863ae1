"""Single-qubit orange-slice pulses and their purely geometric phase.

A pulse drives the qubit along a meridian of the Bloch sphere; two pulses
with the second envelope reversed close the loop along a second meridian.
The composed propagator is diagonal and imprints opposite phases on the
poles, while the dynamical phase vanishes identically along the path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .matrix_core import SIGMA_X, SIGMA_Y

TWO_PI = 2.0 * math.pi

ENVELOPES = ("rect", "gauss")


@dataclass(frozen=True)
class AbelianPulse:
    """Constant-phase drive with a signed pulse area.

    phi is reduced to [0, 2pi) at construction; area keeps its sign, a
    negative value meaning a time-reversed envelope.
    """

    phi: float
    area: float

    def __post_init__(self):
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)
        object.__setattr__(self, "area", float(self.area))


def abelian_hamiltonian(phi: float, amplitude: float) -> np.ndarray:
    """Transverse drive (amplitude/2) (cos(phi) sx + sin(phi) sy)."""
    return 0.5 * amplitude * (math.cos(phi) * SIGMA_X + math.sin(phi) * SIGMA_Y)


def abelian_evolution(pulse: AbelianPulse) -> np.ndarray:
    """Closed-form propagator of a constant-phase pulse.

    Only the accumulated area enters; the envelope shape is irrelevant.
    """
    half = 0.5 * pulse.area
    c = math.cos(half)
    s = math.sin(half)
    return np.array(
        [
            [c, -1j * s * np.exp(-1j * pulse.phi)],
            [-1j * s * np.exp(1j * pulse.phi), c],
        ],
        dtype=complex,
    )


def _envelope_profile(kind: str, n: int) -> np.ndarray:
    """Samples of a unit-area envelope at n midpoints of [0, 1]."""
    if kind == "rect":
        return np.ones(n)
    if kind == "gauss":
        t = (np.arange(n) + 0.5) / n
        prof = np.exp(-0.5 * ((t - 0.5) / 0.15) ** 2)
        return prof * n / prof.sum()
    raise ValueError(f"unknown envelope {kind!r}; expected one of {ENVELOPES}")


def sliced_abelian_evolution(pulse: AbelianPulse, slices: int = 10_000, envelope: str = "rect") -> np.ndarray:
    """Time-sliced product oracle for :func:`abelian_evolution`.

    Integrates the shaped envelope on a midpoint grid; agreement with the
    closed form for both rect and gauss envelopes is what certifies that
    only the area matters.
    """
    if slices < 1:
        raise ValueError("slices must be >= 1")
    profile = _envelope_profile(envelope, slices)
    areas = profile * (pulse.area / slices)
    u = np.eye(2, dtype=complex)
    for da in areas:
        u = abelian_evolution(AbelianPulse(pulse.phi, da)) @ u
    return u


def abelian_orange_slice(phi1: float, phi2: float) -> np.ndarray:
    """Composite gate of the two-meridian loop.

    Built as the real product of the two pulse propagators (the second
    with reversed envelope, i.e. area -pi), not from the known answer.
    The result is diag(exp(-i w/2), exp(+i w/2)) with w = 2 (phi2 - phi1).
    """
    first = abelian_evolution(AbelianPulse(phi1, math.pi))
    second = abelian_evolution(AbelianPulse(phi2, -math.pi))
    return second @ first


def _pole_state(n: int) -> np.ndarray:
    if n not in (0, 1):
        raise ValueError("pole index must be 0 or 1")
    state = np.zeros(2, dtype=complex)
    state[n] = 1.0
    return state


def dynamical_phase(pulses, n: int, slices: int = 10_000) -> float:
    """-integral of <psi(t)|H(t)|psi(t)> dt along the evolving pole state.

    The integrand is evaluated on a midpoint grid in accumulated area
    (envelope-independent substitution), with the state propagated in
    closed form pulse by pulse.  slices counts quadrature points per pulse.
    """
    if slices < 1:
        raise ValueError("slices must be >= 1")
    state = _pole_state(n)
    total = 0.0
    for pulse in pulses:
        h_unit = abelian_hamiltonian(pulse.phi, 1.0)
        da = pulse.area / slices
        mids = (np.arange(slices) + 0.5) * da
        c = np.cos(0.5 * mids)
        s = np.sin(0.5 * mids)
        ph = np.exp(1j * pulse.phi)
        a0 = c * state[0] - 1j * s * np.conj(ph) * state[1]
        a1 = -1j * s * ph * state[0] + c * state[1]
        # <psi|h_unit|psi> with h_unit purely off-diagonal
        expect = 2.0 * np.real(np.conj(a0) * h_unit[0, 1] * a1)
        total += -float(np.sum(expect) * da)
        state = abelian_evolution(pulse) @ state
    return total


def plus_minus_states(phi: float):
    """The two equatorial states (|0> +- e^{i phi} |1>)/sqrt(2)."""
    ph = np.exp(1j * phi)
    plus = np.array([1.0, ph], dtype=complex) / math.sqrt(2.0)
    minus = np.array([1.0, -ph], dtype=complex) / math.sqrt(2.0)
    return plus, minus


def unbiasedness_check(phi: float, alphas) -> np.ndarray:
    """|<+-(phi)|psi_0(t)>| for the pole state driven to each sampled area.

    Returns an array of shape (len(alphas), 2); every entry equals
    1/sqrt(2) because the meridian stays equidistant from both states.
    """
    plus, minus = plus_minus_states(phi)
    out = np.empty((len(alphas), 2))
    state0 = _pole_state(0)
    for i, alpha in enumerate(alphas):
        psi = abelian_evolution(AbelianPulse(phi, alpha)) @ state0
        out[i, 0] = abs(np.vdot(plus, psi))
        out[i, 1] = abs(np.vdot(minus, psi))
    return out
