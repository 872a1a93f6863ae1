"""Survival-probability read-out of the holonomy blocks.

The read-out gate acts inside each working plane separately: next-nearest
neighbour couplings plus a detuning generate a 2x2 block Hamiltonian per
plane, and an evolution under it multiplies the corresponding holonomy
block.  Probing the composite with a tomographically complete set of
states and maximizing the worst-case survival probability recovers the
block up to a global phase; a closed-form inverter provides the answer the
optimizer must reproduce.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExhausted
from .holonomy import HolonomyPair
from .matrix_core import SIGMA_X, SIGMA_Y, SIGMA_Z, decompose_u2, exp_hermitian

#: survival threshold the optimizer must clear
RECOVERY_TARGET = 0.999


@dataclass(frozen=True)
class MeasurementConfig:
    """Read-out knobs: detuning e, in-plane couplings, and duration b."""

    e: float = 0.0
    j13: float = 0.0
    d13: float = 0.0
    j24: float = 0.0
    d24: float = 0.0
    b: float = 1.0


def nnn_blocks(cfg: MeasurementConfig):
    """The two 2x2 read-out generators (t0 acting on M0, t1 on M1).

    Both share the detuning e on the diagonal; the off-diagonal entries
    carry the next-nearest-neighbour couplings of the respective plane.
    """
    t0 = np.array(
        [
            [cfg.e, cfg.j13 + 1j * cfg.d13],
            [cfg.j13 - 1j * cfg.d13, -cfg.e],
        ],
        dtype=complex,
    )
    t1 = np.array(
        [
            [cfg.e, cfg.j24 + 1j * cfg.d24],
            [cfg.j24 - 1j * cfg.d24, -cfg.e],
        ],
        dtype=complex,
    )
    return t0, t1


def nnn_hamiltonian(cfg: MeasurementConfig) -> np.ndarray:
    """Block-diagonal 4x4 read-out generator in B coordinates."""
    t0, t1 = nnn_blocks(cfg)
    h = np.zeros((4, 4), dtype=complex)
    h[:2, :2] = t0
    h[2:, 2:] = t1
    return h


def w_gates(cfg: MeasurementConfig):
    """(exp(-i b t0), exp(-i b t1))."""
    t0, t1 = nnn_blocks(cfg)
    return exp_hermitian(t0, cfg.b), exp_hermitian(t1, cfg.b)


def prepare_initial_state(site: int) -> np.ndarray:
    """B-coordinate state with the excitation on the given ring site (1..4)."""
    mapping = {1: 0, 3: 1, 2: 2, 4: 3}
    if site not in mapping:
        raise ValueError("site must be one of 1, 2, 3, 4")
    state = np.zeros(4, dtype=complex)
    state[mapping[site]] = 1.0
    return state


@dataclass(frozen=True)
class ProbeSet:
    """States probing one working plane.

    Every state must be unit norm and supported on the declared plane
    (components outside below 1e-12).
    """

    subspace: int
    states: tuple

    def __post_init__(self):
        if self.subspace not in (0, 1):
            raise ValueError("subspace must be 0 or 1")
        states = tuple(np.asarray(s, dtype=complex) for s in self.states)
        outside = slice(2, 4) if self.subspace == 0 else slice(0, 2)
        for s in states:
            if s.shape != (4,):
                raise ValueError("probe states must be 4-dim vectors")
            if abs(np.linalg.norm(s) - 1.0) > 1e-12:
                raise ValueError("probe states must be unit norm")
            if np.max(np.abs(s[outside])) > 1e-12:
                raise ValueError(f"probe state leaves M{self.subspace}")
        object.__setattr__(self, "states", states)

    def reduced(self) -> np.ndarray:
        """Stack of the in-plane 2-dim components, shape (n, 2)."""
        inside = slice(0, 2) if self.subspace == 0 else slice(2, 4)
        return np.stack([s[inside] for s in self.states])


def tomographic_probes(subspace: int = 0) -> ProbeSet:
    """The canonical four probes: both plane basis states, their + and +i mixes."""
    if subspace not in (0, 1):
        raise ValueError("subspace must be 0 or 1")
    base = 2 * subspace
    e1 = np.zeros(4, dtype=complex)
    e2 = np.zeros(4, dtype=complex)
    e1[base] = 1.0
    e2[base + 1] = 1.0
    plus = (e1 + e2) / math.sqrt(2.0)
    plus_i = (e1 + 1j * e2) / math.sqrt(2.0)
    return ProbeSet(subspace=subspace, states=(e1, e2, plus, plus_i))


def survival_probability(psi: np.ndarray, uc: HolonomyPair, cfg: MeasurementConfig) -> float:
    """|<psi| (W0 uc0 + W1 uc1) |psi>|^2 with the direct sum of the blocks."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (4,):
        raise ValueError("state must be a 4-dim vector")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("state must be unit norm")
    w0, w1 = w_gates(cfg)
    g = np.zeros((4, 4), dtype=complex)
    g[:2, :2] = w0 @ uc.uc0
    g[2:, 2:] = w1 @ uc.uc1
    amp = np.vdot(psi, g @ psi)
    return float(abs(amp) ** 2)


def invert_holonomy(uc0: np.ndarray) -> MeasurementConfig:
    """Closed-form read-out undoing a holonomy block on M0.

    Strips the global phase, takes the SU(2) inverse exp(-i phi n.sigma/2),
    and reads the couplings off its generator: with b = 1,

        e = (phi/2) n_z,  j13 = (phi/2) n_x,  d13 = -(phi/2) n_y.

    phi = 0 returns the zero configuration.
    """
    dec = decompose_u2(np.asarray(uc0, dtype=complex))
    half = 0.5 * dec.phi
    n_inv = -dec.axis  # axis of the inverse rotation
    cfg = MeasurementConfig(
        e=half * n_inv[2],
        j13=half * n_inv[0],
        d13=-half * n_inv[1],
        j24=0.0,
        d24=0.0,
        b=1.0,
    )
    return cfg


# ---------------------------------------------------------------------------
# derivative-free recovery

# simplex moves: reflection, expansion, contraction, shrink
_NM_ALPHA = 1.0
_NM_GAMMA = 2.0
_NM_RHO = 0.5
_NM_SIGMA = 0.5
_NM_F_TOL = 1e-10
_NM_X_TOL = 1e-8


def _nelder_mead(f, x0, step, budget):
    """Minimize f from x0; returns (x_best, f_best, evaluations).

    Stops when the objective spread across the simplex drops below 1e-10,
    when the simplex diameter drops below 1e-8, or when the evaluation
    budget runs out.
    """
    n = len(x0)
    verts = [np.array(x0, dtype=float)]
    for i in range(n):
        v = np.array(x0, dtype=float)
        v[i] += step
        verts.append(v)
    evals = 0
    fvals = []
    for v in verts:
        if evals >= budget:
            break
        fvals.append(f(v))
        evals += 1
    while len(fvals) < len(verts):
        verts.pop()
    order = np.argsort(fvals, kind="stable")
    verts = [verts[i] for i in order]
    fvals = [fvals[i] for i in order]

    while evals < budget:
        spread = fvals[-1] - fvals[0]
        diameter = max(np.linalg.norm(v - verts[0]) for v in verts[1:])
        if spread < _NM_F_TOL or diameter < _NM_X_TOL:
            break
        centroid = np.mean(verts[:-1], axis=0)
        worst = verts[-1]
        reflected = centroid + _NM_ALPHA * (centroid - worst)
        f_r = f(reflected)
        evals += 1
        if f_r < fvals[0]:
            if evals < budget:
                expanded = centroid + _NM_GAMMA * (reflected - centroid)
                f_e = f(expanded)
                evals += 1
                if f_e < f_r:
                    verts[-1], fvals[-1] = expanded, f_e
                else:
                    verts[-1], fvals[-1] = reflected, f_r
            else:
                verts[-1], fvals[-1] = reflected, f_r
        elif f_r < fvals[-2]:
            verts[-1], fvals[-1] = reflected, f_r
        else:
            if f_r < fvals[-1]:
                contracted = centroid + _NM_RHO * (reflected - centroid)
            else:
                contracted = centroid + _NM_RHO * (worst - centroid)
            if evals >= budget:
                break
            f_c = f(contracted)
            evals += 1
            if f_c < min(f_r, fvals[-1]):
                verts[-1], fvals[-1] = contracted, f_c
            else:
                # shrink every vertex toward the best
                for i in range(1, len(verts)):
                    if evals >= budget:
                        break
                    verts[i] = verts[0] + _NM_SIGMA * (verts[i] - verts[0])
                    fvals[i] = f(verts[i])
                    evals += 1
        order = np.argsort(fvals, kind="stable")
        verts = [verts[i] for i in order]
        fvals = [fvals[i] for i in order]

    return verts[0], fvals[0], evals


@dataclass(frozen=True)
class OptimizationResult:
    """Recovered configuration with its worst-case survival probability."""

    config: MeasurementConfig
    p_min: float
    iterations: int


def _probe_sufficient(reduced: np.ndarray) -> bool:
    """True when the probes' projectors span the 2x2 Hermitian space."""
    if reduced.shape[0] < 4:
        return False
    rows = []
    for psi in reduced:
        proj = np.outer(psi, np.conj(psi))
        rows.append([proj[0, 0].real, proj[1, 1].real, proj[0, 1].real, proj[0, 1].imag])
    return np.linalg.matrix_rank(np.array(rows), tol=1e-8) == 4


def _config_from_vector(x: np.ndarray, subspace: int) -> MeasurementConfig:
    e, j, d, b = (float(v) for v in x)
    if subspace == 0:
        return MeasurementConfig(e=e, j13=j, d13=d, j24=0.0, d24=0.0, b=b)
    return MeasurementConfig(e=e, j13=0.0, d13=0.0, j24=j, d24=d, b=b)


def optimize_measurement(
    uc: HolonomyPair,
    probes: ProbeSet | None = None,
    budget: int = 5000,
    restarts: int = 8,
    seed: int = 0,
) -> OptimizationResult:
    """Recover the read-out undoing one holonomy block, without derivatives.

    Runs restarts of the fixed-coefficient simplex from deterministic seed
    points (the zero configuration first, then seeded uniform draws),
    maximizing the minimum survival probability over the probes.  Restarts
    stop early once a score within 1e-10 of 1 is found; the evaluation
    budget is shared across restarts.  Raises BudgetExhausted when the
    budget is spent with the best worst-case probability still at or below
    0.999.
    """
    if probes is None:
        probes = tomographic_probes(0)
    reduced = probes.reduced()
    if not _probe_sufficient(reduced):
        raise ValueError("probe set is not tomographically sufficient (need 4 spanning states)")
    target = uc.uc0 if probes.subspace == 0 else uc.uc1
    rotated = reduced @ target.T  # rows: target @ psi_k

    def objective(x: np.ndarray) -> float:
        e, j, d, b = x
        # exp(-i b (j sx - d sy + e sz)) in closed form
        mx, my, mz = j, -d, e
        norm = math.sqrt(mx * mx + my * my + mz * mz)
        theta = b * norm
        if norm == 0.0:
            w = np.eye(2, dtype=complex)
        else:
            ax, ay, az = mx / norm, my / norm, mz / norm
            n_dot = ax * SIGMA_X + ay * SIGMA_Y + az * SIGMA_Z
            w = math.cos(theta) * np.eye(2) - 1j * math.sin(theta) * n_dot
        amps = np.einsum("ki,ij,kj->k", np.conj(reduced), w, rotated)
        return 1.0 - float(np.min(np.abs(amps) ** 2))

    rng = np.random.default_rng(seed)
    starts = [np.array([0.0, 0.0, 0.0, 1.0])]
    for _ in range(max(restarts - 1, 0)):
        point = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, size=3)
        b0 = rng.uniform(0.5, 1.5)
        starts.append(np.array([point[0], point[1], point[2], b0]))

    best_x = starts[0]
    best_f = objective(best_x)
    used = 1
    for x0 in starts:
        if used >= budget:
            break
        x, f_val, evals = _nelder_mead(objective, x0, step=0.25, budget=budget - used)
        used += evals
        if f_val < best_f:
            best_f, best_x = f_val, x
        if best_f <= 1e-10:
            break

    cfg = _config_from_vector(best_x, probes.subspace)
    # recompute through the contract path (w_gates) rather than trusting
    # the optimizer's fast exponential
    p_min = min(survival_probability(s, uc, cfg) for s in probes.states)
    if p_min <= RECOVERY_TARGET:
        raise BudgetExhausted(
            f"best worst-case survival {p_min:.6f} after {used} evaluations",
            best_config=cfg,
            best_p_min=p_min,
            evaluations=used,
        )
    return OptimizationResult(config=cfg, p_min=p_min, iterations=used)
