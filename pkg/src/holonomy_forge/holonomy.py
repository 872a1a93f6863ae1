"""Pulse pairs that close a loop of working planes, and the loop's holonomy.

A slice is two pulses: the first carries the working plane M_q to the
complementary plane, the second (with reversed envelope, hence negative
signed area) carries it back.  When both pulses satisfy the half-turn
conditions - every cos(area*s/2) vanishing and every sin(area*s/2) a sign -
the composite propagator is block diagonal, and its blocks are U(2)
holonomies with closed algebraic forms in the pulses' SVD factors.

The second half of the module checks the geometric picture behind those
blocks: the evolving plane follows a two-leg geodesic path, swept by frames
built from the SVD factors, and stays mutually unbiased with a fixed pair
of reference planes throughout.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain_model import CouplingSet, coupling_matrix
from .errors import ConditionUnsatisfiable, NotBlockDiagonal, NumericalConditionError
from .evolution_engine import PulseSpec, compose_schedule
from .matrix_core import U2Decomposition, dagger, decompose_u2, svd2

CONDITION_TOL = 1e-10
BLOCK_TOL = 1e-12


def z_power(p: int) -> np.ndarray:
    """diag(1, (-1)^p) for p in {0, 1}."""
    if p not in (0, 1):
        raise ValueError("p must be 0 or 1")
    return np.diag([1.0, -1.0 if p else 1.0]).astype(complex)


@dataclass(frozen=True)
class SliceConditions:
    """Outcome of the half-turn condition check for one pulse.

    sin(area*S/2) = sign * Z^p with the stated residual; the extra overall
    sign is recorded explicitly instead of being folded into p.
    """

    ok: bool
    p: int
    sign: int
    residual: float


def couplings_from_matrix(t: np.ndarray) -> CouplingSet:
    """Entrywise inverse of :func:`coupling_matrix`: realize a target block."""
    t = np.asarray(t, dtype=complex)
    if t.shape != (2, 2):
        raise ValueError("coupling block must be 2x2")
    return CouplingSet(
        j=(t[0, 0].real, t[1, 0].real, t[1, 1].real, t[0, 1].real),
        dz=(-t[0, 0].imag, t[1, 0].imag, -t[1, 1].imag, t[0, 1].imag),
    )


def design_isoclinic_pulse(u_target: np.ndarray, v_target: np.ndarray, label: str = "") -> PulseSpec:
    """Couplings with block u v† (all singular values 1) held for area pi.

    Such a pulse satisfies the half-turn conditions with p = 0 and sign +1.
    """
    t = np.asarray(u_target, dtype=complex) @ dagger(np.asarray(v_target, dtype=complex))
    return PulseSpec(couplings=couplings_from_matrix(t), area=math.pi, label=label)


def validate_slice_conditions(t: np.ndarray, area: float, tol: float = CONDITION_TOL) -> SliceConditions:
    """Check cos(area*S/2) = 0 and sin(area*S/2) = sign * Z^p.

    The signed area is used directly, so a reversed pulse typically reports
    sign = -1.  Branches are tried in the fixed order (p, sign) =
    (0,+1), (0,-1), (1,+1), (1,-1); raises ConditionUnsatisfiable with the
    best residual when none matches within tol.
    """
    tri = svd2(np.asarray(t, dtype=complex))
    half = 0.5 * area * tri.s
    cos_v = np.cos(half)
    sin_v = np.sin(half)
    best = None
    for p in (0, 1):
        targets = np.array([1.0, -1.0 if p else 1.0])
        for sign in (1, -1):
            residual = max(float(np.max(np.abs(cos_v))), float(np.max(np.abs(sin_v - sign * targets))))
            if best is None or residual < best[2]:
                best = (p, sign, residual)
    p, sign, residual = best
    if residual > tol:
        raise ConditionUnsatisfiable(
            f"no half-turn branch matches: best residual {residual:.3e} (p={p}, sign={sign:+d})",
            residual=residual,
        )
    return SliceConditions(ok=True, p=p, sign=sign, residual=residual)


@dataclass(frozen=True)
class SliceSpec:
    """Validated two-pulse loop: pulses plus their condition branches."""

    pulse1: PulseSpec
    pulse2: PulseSpec
    p1: int
    p2: int
    sign1: int
    sign2: int


def build_slice(pulse1: PulseSpec, pulse2: PulseSpec, tol: float = CONDITION_TOL) -> SliceSpec:
    """Validate both pulses' half-turn conditions and record the branches."""
    c1 = validate_slice_conditions(coupling_matrix(pulse1.couplings), pulse1.area, tol)
    c2 = validate_slice_conditions(coupling_matrix(pulse2.couplings), pulse2.area, tol)
    return SliceSpec(
        pulse1=pulse1,
        pulse2=pulse2,
        p1=c1.p,
        p2=c2.p,
        sign1=c1.sign,
        sign2=c2.sign,
    )


def isoclinic_slice(u1: np.ndarray, v1: np.ndarray, u2: np.ndarray, v2: np.ndarray) -> SliceSpec:
    """Standard slice from two designed pulses, the second reversed."""
    pulse1 = design_isoclinic_pulse(u1, v1, label="leg1")
    forward2 = design_isoclinic_pulse(u2, v2, label="leg2")
    pulse2 = PulseSpec(couplings=forward2.couplings, area=-forward2.area, label=forward2.label)
    return build_slice(pulse1, pulse2)


@dataclass(frozen=True)
class HolonomyPair:
    """The two U(2) blocks of a composed slice, with their angle splits.

    delta_chi is the common Abelian phase magnitude: the blocks carry
    exp(-i delta_chi) and exp(+i delta_chi) respectively.
    """

    uc0: np.ndarray
    uc1: np.ndarray
    dec0: U2Decomposition
    dec1: U2Decomposition
    delta_chi: float

    @classmethod
    def from_unitaries(cls, uc0: np.ndarray, uc1: np.ndarray) -> "HolonomyPair":
        """Wrap explicit blocks; delta_chi is taken from the first block."""
        uc0 = np.asarray(uc0, dtype=complex)
        uc1 = np.asarray(uc1, dtype=complex)
        dec0 = decompose_u2(uc0)
        dec1 = decompose_u2(uc1)
        return cls(uc0=uc0, uc1=uc1, dec0=dec0, dec1=dec1, delta_chi=dec0.chi)


def holonomy_pair(spec: SliceSpec, block_tol: float = BLOCK_TOL) -> HolonomyPair:
    """Compose the slice and extract both holonomy blocks.

    The composite is computed by actually multiplying the two pulse
    propagators; the algebraic products built from the SVD factors and the
    recorded (p, sign) branches must agree with the evolved blocks within
    block_tol, otherwise the two routes have diverged and we refuse to
    return either.
    """
    evolved = compose_schedule((spec.pulse1, spec.pulse2), "effective4")
    off = max(float(np.max(np.abs(evolved[:2, 2:]))), float(np.max(np.abs(evolved[2:, :2]))))
    if off > block_tol:
        raise NotBlockDiagonal(f"composed slice is not block diagonal: off-block magnitude {off:.3e}")
    uc0 = evolved[:2, :2].copy()
    uc1 = evolved[2:, 2:].copy()

    tri1 = svd2(coupling_matrix(spec.pulse1.couplings))
    tri2 = svd2(coupling_matrix(spec.pulse2.couplings))
    zp1 = z_power(spec.p1)
    zp2 = z_power(spec.p2)
    prefactor = -float(spec.sign1 * spec.sign2)
    k1 = tri1.u @ zp1 @ dagger(tri1.v)
    k2_eff = prefactor * (tri2.u @ zp2 @ dagger(tri2.v))
    alg0 = k2_eff @ dagger(k1)
    alg1 = dagger(k2_eff) @ k1
    mismatch = max(float(np.max(np.abs(alg0 - uc0))), float(np.max(np.abs(alg1 - uc1))))
    if mismatch > block_tol:
        raise NumericalConditionError(
            f"algebraic and evolved holonomies disagree by {mismatch:.3e}"
        )

    chi1 = decompose_u2(k1).chi
    chi2 = decompose_u2(k2_eff).chi
    delta_chi = math.atan2(math.sin(chi2 - chi1), math.cos(chi2 - chi1))
    return HolonomyPair(
        uc0=uc0,
        uc1=uc1,
        dec0=decompose_u2(uc0),
        dec1=decompose_u2(uc1),
        delta_chi=delta_chi,
    )


# ---------------------------------------------------------------------------
# frames and plane geometry

_B_KETS = np.eye(4, dtype=complex)

# B-coordinate indices of the kets entering the frame vectors, per q:
# e1 uses |(1-q) q 0 0>, e2 uses |0 0 (1-q) q>,
# e3 uses |q (1-q) 0 0>, e4 uses |0 0 q (1-q)>.
_FRAME_KET_INDICES = {0: (0, 1, 2, 3), 1: (2, 3, 0, 1)}


def lambda_operator(q: int, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """blockdiag(i^q u, i^(1-q) v) in B coordinates."""
    if q not in (0, 1):
        raise ValueError("q must be 0 or 1")
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = (1j**q) * np.asarray(u, dtype=complex)
    out[2:, 2:] = (1j ** (1 - q)) * np.asarray(v, dtype=complex)
    return out


def lambda_basis(q: int, u: np.ndarray, v: np.ndarray, l: int) -> np.ndarray:
    """The four frame vectors e1..e4 for leg l, as columns of a 4x4 array.

    e3 and e4 carry the (-1)^l leg sign.
    """
    if l not in (1, 2):
        raise ValueError("leg index must be 1 or 2")
    lam = lambda_operator(q, u, v)
    idx = _FRAME_KET_INDICES[q]
    leg_sign = (-1.0) ** l
    cols = [
        lam @ _B_KETS[:, idx[0]],
        lam @ _B_KETS[:, idx[1]],
        leg_sign * (lam @ _B_KETS[:, idx[2]]),
        leg_sign * (lam @ _B_KETS[:, idx[3]]),
    ]
    return np.stack(cols, axis=1)


@dataclass(frozen=True)
class Frame2:
    """Two orthonormal 4-dim vectors spanning a plane."""

    vectors: np.ndarray  # shape (4, 2)

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=complex)
        if vectors.shape != (4, 2):
            raise ValueError("Frame2 expects a 4x2 array of column vectors")
        gram = dagger(vectors) @ vectors
        if np.max(np.abs(gram - np.eye(2))) > 1e-12:
            raise ValueError("frame vectors are not orthonormal")
        object.__setattr__(self, "vectors", vectors)

    def projector(self) -> np.ndarray:
        return self.vectors @ dagger(self.vectors)


def geodesic_frame(spec: SliceSpec, leg: int, q: int, t_fraction: float) -> Frame2:
    """Frame of the geodesic path at a fractional position along one leg.

    Leg 1 interpolates the first pulse's signed area; leg 2 interpolates
    the reversed second pulse, i.e. uses -t_fraction * pulse2.area, and is
    built in the complementary basis (plane index 1-q).  At every fraction
    the frame's projector reproduces the schedule-evolved plane exactly.
    """
    if leg not in (1, 2):
        raise ValueError("leg index must be 1 or 2")
    if q not in (0, 1):
        raise ValueError("q must be 0 or 1")
    if leg == 1:
        tri = svd2(coupling_matrix(spec.pulse1.couplings))
        half = 0.5 * (t_fraction * spec.pulse1.area) * tri.s
        basis = lambda_basis(q, tri.u, tri.v, 1)
    else:
        tri = svd2(coupling_matrix(spec.pulse2.couplings))
        half = 0.5 * (-t_fraction * spec.pulse2.area) * tri.s
        basis = lambda_basis(1 - q, tri.u, tri.v, 2)
    cols = np.empty((4, 2), dtype=complex)
    for k in range(2):
        cols[:, k] = math.cos(half[k]) * basis[:, k] + math.sin(half[k]) * basis[:, k + 2]
    return Frame2(vectors=cols)


def rotating_plane_projector(pulse: PulseSpec, t_fraction: float) -> np.ndarray:
    """Projector of the plane swept from M0 by a partial pulse.

    Built from the two rotating frame vectors; it matches conjugating the
    M0 projector by the partial-area propagator.
    """
    tri = svd2(coupling_matrix(pulse.couplings))
    lam0 = lambda_operator(0, tri.u, tri.v)
    half = 0.5 * (t_fraction * pulse.area) * tri.s
    mu1 = lam0 @ (math.cos(half[0]) * _B_KETS[:, 0] - math.sin(half[0]) * _B_KETS[:, 2])
    mu2 = lam0 @ (math.cos(half[1]) * _B_KETS[:, 1] - math.sin(half[1]) * _B_KETS[:, 3])
    return np.outer(mu1, np.conj(mu1)) + np.outer(mu2, np.conj(mu2))


def fixed_pole_frames(u: np.ndarray, v: np.ndarray):
    """The two reference planes P+ and P- seen from the pulse's factors.

    Returns (plus_frame, minus_frame), each a Frame2 spanning the plane of
    (|1000> +- i |0100>)/sqrt(2) and (|0010> +- i |0001>)/sqrt(2), mapped
    through blockdiag(u, i v).
    """
    lam0 = lambda_operator(0, u, v)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    frames = []
    for sgn in (1.0, -1.0):
        a = lam0 @ ((_B_KETS[:, 0] + sgn * 1j * _B_KETS[:, 2]) * inv_sqrt2)
        b = lam0 @ ((_B_KETS[:, 1] + sgn * 1j * _B_KETS[:, 3]) * inv_sqrt2)
        frames.append(Frame2(vectors=np.stack([a, b], axis=1)))
    return frames[0], frames[1]


def mutual_unbiasedness(pulse: PulseSpec, samples: int) -> np.ndarray:
    """Tr[P+- P(t)] at evenly spaced fractions of the pulse.

    Returns an array of shape (samples, 2) with columns (plus, minus).
    For pulses with equal singular values both columns are exactly 1.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    tri = svd2(coupling_matrix(pulse.couplings))
    plus, minus = fixed_pole_frames(tri.u, tri.v)
    p_plus = plus.projector()
    p_minus = minus.projector()
    fractions = np.linspace(0.0, 1.0, samples)
    out = np.empty((samples, 2))
    for i, f in enumerate(fractions):
        p_t = rotating_plane_projector(pulse, float(f))
        out[i, 0] = float(np.trace(p_plus @ p_t).real)
        out[i, 1] = float(np.trace(p_minus @ p_t).real)
    return out
