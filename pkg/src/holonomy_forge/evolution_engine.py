"""Propagators for ring pulses, in the 4-dim working basis or the full register.

A pulse is a coupling pattern with a signed area.  The generated evolution
is exp(-i (area/2) K) where K is the block-form coupling operator; in the
working basis that exponential has a closed form built from the 2x2
singular value decomposition of the coupling block, which is what
:func:`closed_form_evolution` implements.  The sliced product and the full
16-dim route exist as independent oracles against it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain_model import CouplingSet, build_full_hamiltonian, coupling_matrix, project_to_block
from .matrix_core import dagger, exp_hermitian, svd2

SPACES = ("effective4", "full16")


@dataclass(frozen=True)
class PulseSpec:
    """A coupling pattern held for a signed pulse area."""

    couplings: CouplingSet
    area: float
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "area", float(self.area))


def closed_form_evolution(t: np.ndarray, area: float) -> np.ndarray:
    """Block evolution exp(-i (area/2) [[0, t], [t†, 0]]) via the SVD of t.

    With t = u diag(s) v† the four blocks are u cos(a s/2) u†,
    -i u sin(a s/2) v†, -i v sin(a s/2) u†, and v cos(a s/2) v†.  Negative
    areas flip the sign of the sine blocks and leave the cosines alone.
    """
    tri = svd2(t)
    half = 0.5 * area * tri.s
    cos_d = np.diag(np.cos(half)).astype(complex)
    sin_d = np.diag(np.sin(half)).astype(complex)
    u, v = tri.u, tri.v
    out = np.empty((4, 4), dtype=complex)
    out[:2, :2] = u @ cos_d @ dagger(u)
    out[:2, 2:] = -1j * (u @ sin_d @ dagger(v))
    out[2:, :2] = -1j * (v @ sin_d @ dagger(u))
    out[2:, 2:] = v @ cos_d @ dagger(v)
    return out


def _check_space(space: str) -> None:
    if space not in SPACES:
        raise ValueError(f"unknown space {space!r}; expected one of {SPACES}")


def pulse_evolution(pulse: PulseSpec, space: str = "effective4") -> np.ndarray:
    """Exact propagator of a single pulse in the requested space."""
    _check_space(space)
    if space == "effective4":
        return closed_form_evolution(coupling_matrix(pulse.couplings), pulse.area)
    h16 = build_full_hamiltonian(pulse.couplings)
    return exp_hermitian(h16, 0.5 * pulse.area)


def sliced_evolution(c: CouplingSet, area: float, slices: int = 10_000, space: str = "effective4") -> np.ndarray:
    """Midpoint product oracle: the ordered product of `slices` equal steps.

    The generator is time-independent up to the scalar envelope, so any
    slice count is exact; the product tests the implementation, not the
    physics.
    """
    _check_space(space)
    if slices < 1:
        raise ValueError("slices must be >= 1")
    h16 = build_full_hamiltonian(c)
    h = h16 if space == "full16" else project_to_block(h16)
    step = exp_hermitian(h, 0.5 * area / slices)
    u = np.eye(h.shape[0], dtype=complex)
    for _ in range(slices):
        u = step @ u
    return u


def compose_schedule(pulses, space: str = "effective4") -> np.ndarray:
    """Right-to-left product of the per-pulse propagators."""
    _check_space(space)
    pulses = tuple(pulses)
    if not pulses:
        raise ValueError("schedule must contain at least one pulse")
    dim = 4 if space == "effective4" else 16
    u = np.eye(dim, dtype=complex)
    for pulse in pulses:
        u = pulse_evolution(pulse, space) @ u
    return u
