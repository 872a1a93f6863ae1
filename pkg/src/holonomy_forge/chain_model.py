"""Four-qubit ring with XY and z-axis Dzyaloshinskii-Moriya couplings.

Site k couples to site k+1 (cyclically, so site 4 couples back to site 1).
The couplings conserve the excitation number, and the whole construction
lives in the single-excitation sector, spanned by the ordered basis

    B = (|1000>, |0010>, |0100>, |0001>)        (qubit 1 = most significant bit)

whose first two members span the working plane M0 (excitation on an odd
site) and whose last two span M1 (excitation on an even site).  In that
ordering the ring Hamiltonian is a pure off-diagonal 2x2-block matrix,
with the block given by :func:`coupling_matrix`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LeakageDetected, NotHermitian
from .matrix_core import SIGMA_X, SIGMA_Y, dagger, is_hermitian

BASIS_LABELS = ("1000", "0010", "0100", "0001")
#: computational-basis indices of the B states, qubit 1 as the most significant bit
BASIS_INDICES = (8, 2, 4, 1)

LEAKAGE_TOL = 1e-12


def _site_operator(op: np.ndarray, site: int) -> np.ndarray:
    """Embed a single-qubit operator at a 0-indexed site of the 4-qubit register."""
    left = np.eye(2**site, dtype=complex)
    right = np.eye(2 ** (3 - site), dtype=complex)
    return np.kron(np.kron(left, op), right)


_X = [_site_operator(SIGMA_X, k) for k in range(4)]
_Y = [_site_operator(SIGMA_Y, k) for k in range(4)]

# ring bonds in coupling order: (1,2), (2,3), (3,4), (4,1), zero-indexed
_BONDS = ((0, 1), (1, 2), (2, 3), (3, 0))


@dataclass(frozen=True)
class CouplingSet:
    """Nearest-neighbour couplings of the ring.

    j  = (J12, J23, J34, J41), the XY exchange strengths
    dz = (D12, D23, D34, D41), the z-axis Dzyaloshinskii-Moriya strengths
    """

    j: tuple
    dz: tuple

    def __post_init__(self):
        j = tuple(float(x) for x in self.j)
        dz = tuple(float(x) for x in self.dz)
        if len(j) != 4 or len(dz) != 4:
            raise ValueError("CouplingSet needs exactly 4 XY and 4 DM couplings")
        if not all(np.isfinite(j)) or not all(np.isfinite(dz)):
            raise ValueError("couplings must be finite")
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "dz", dz)


def build_full_hamiltonian(c: CouplingSet) -> np.ndarray:
    """16-dim coupling operator of the ring, envelope factor excluded.

    Sum over bonds of J*(sx sx + sy sy)/2 + D*(sx sy - sy sx)/2.  Scaled so
    that its restriction to B is exactly [[0, T], [T†, 0]] with T from
    :func:`coupling_matrix`; a pulse of area a then evolves the register by
    exp(-i (a/2) H), which is what the evolution engine applies.
    """
    h = np.zeros((16, 16), dtype=complex)
    for bond, (a, b) in enumerate(_BONDS):
        rxy = 0.5 * (_X[a] @ _X[b] + _Y[a] @ _Y[b])
        rdm = 0.5 * (_X[a] @ _Y[b] - _Y[a] @ _X[b])
        h += c.j[bond] * rxy + c.dz[bond] * rdm
    return h


def coupling_matrix(c: CouplingSet) -> np.ndarray:
    """The 2x2 block T coupling M0 to M1.

    Row order (|1000>, |0010>), column order (|0100>, |0001>).
    """
    j12, j23, j34, j41 = c.j
    d12, d23, d34, d41 = c.dz
    return np.array(
        [
            [j12 - 1j * d12, j41 + 1j * d41],
            [j23 + 1j * d23, j34 - 1j * d34],
        ],
        dtype=complex,
    )


def basis_embedding() -> np.ndarray:
    """16x4 isometry whose columns are the B states."""
    q = np.zeros((16, 4), dtype=complex)
    for col, idx in enumerate(BASIS_INDICES):
        q[idx, col] = 1.0
    return q


def project_to_block(h16: np.ndarray, tol: float = LEAKAGE_TOL) -> np.ndarray:
    """Restrict a Hermitian 16-dim operator to the B basis.

    Raises LeakageDetected when h16 maps span(B) outside span(B) by more
    than tol (largest singular value of the leaking part).
    """
    h16 = np.asarray(h16, dtype=complex)
    if h16.shape != (16, 16):
        raise ValueError(f"expected a 16x16 matrix, got shape {h16.shape}")
    if not is_hermitian(h16):
        raise NotHermitian("project_to_block requires a Hermitian operator")
    q = basis_embedding()
    h4 = dagger(q) @ h16 @ q
    residual = h16 @ q - q @ h4
    leak = float(np.linalg.svd(residual, compute_uv=False)[0])
    if leak > tol:
        raise LeakageDetected(f"operator leaks out of the single-excitation basis: {leak:.3e}")
    return h4


def excitation_leakage(u16: np.ndarray) -> float:
    """Largest singular value of (1 - P) u16 P, P projecting onto span(B)."""
    u16 = np.asarray(u16, dtype=complex)
    q = basis_embedding()
    inside = u16 @ q
    residual = inside - q @ (dagger(q) @ inside)
    return float(np.linalg.svd(residual, compute_uv=False)[0])


def subspace_projector(q_index: int) -> np.ndarray:
    """4x4 projector onto M0 (q_index=0) or M1 (q_index=1), in B coordinates."""
    if q_index not in (0, 1):
        raise ValueError("subspace index must be 0 or 1")
    p = np.zeros((4, 4), dtype=complex)
    base = 2 * q_index
    p[base, base] = 1.0
    p[base + 1, base + 1] = 1.0
    return p
