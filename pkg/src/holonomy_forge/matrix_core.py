"""Dense complex linear algebra on small operators.

Everything works on plain complex128 numpy arrays.  The canonical-form
logic lives in :func:`svd2` (singular value decomposition of a 2x2 block)
and :func:`decompose_u2` (global phase + rotation split of a U(2) matrix);
both pin deterministic conventions so that downstream geometry and reports
are byte-for-byte reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian, NotUnitary, SingularCoupling

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

#: default elementwise tolerance for the unitarity / hermiticity predicates
DEFAULT_TOL = 1e-10

# relative gap below which two singular values are treated as degenerate
DEGENERACY_RTOL = 1e-12


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(m).T


def is_unitary(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True when max |m† m - 1| <= tol elementwise."""
    m = np.asarray(m, dtype=complex)
    dev = dagger(m) @ m - np.eye(m.shape[0])
    return bool(np.max(np.abs(dev)) <= tol)


def is_hermitian(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True when max |m - m†| <= tol elementwise."""
    m = np.asarray(m, dtype=complex)
    return bool(np.max(np.abs(m - dagger(m))) <= tol)


@dataclass(frozen=True)
class SvdTriple:
    """Factors of t = u @ diag(s) @ v† with s sorted descending."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.u @ np.diag(self.s) @ dagger(self.v)


def svd2(t: np.ndarray) -> SvdTriple:
    """Canonical singular value decomposition of a 2x2 complex matrix.

    The decomposition is made deterministic by construction rather than by
    post-hoc fixup:

    * eigen-decompose t† t and order the eigenpairs by descending
      eigenvalue, keeping the original order for (near-)degenerate pairs;
    * rotate each right-singular vector's phase so its largest-magnitude
      component is real and positive (ties broken by lowest index);
    * recover u as t @ v @ diag(1/s).

    Raises SingularCoupling when min(s) < 1e-12 * max(s).
    """
    t = np.asarray(t, dtype=complex)
    if t.shape != (2, 2):
        raise ValueError(f"svd2 expects a 2x2 matrix, got shape {t.shape}")
    gram = dagger(t) @ t
    w, vecs = np.linalg.eigh(gram)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    vecs = vecs[:, order]
    s = np.sqrt(np.clip(w.real, 0.0, None))
    if s[0] == 0.0 or s[1] < 1e-12 * s[0]:
        raise SingularCoupling(
            f"coupling block is numerically singular: singular values {s[0]:.3e}, {s[1]:.3e}"
        )
    vecs = vecs.copy()
    for k in range(2):
        idx = int(np.argmax(np.abs(vecs[:, k])))  # argmax takes the lowest index on ties
        pivot = vecs[idx, k]
        vecs[:, k] = vecs[:, k] * (np.conj(pivot) / abs(pivot))
    u = t @ vecs @ np.diag(1.0 / s)
    return SvdTriple(u=u, s=s, v=vecs)


@dataclass(frozen=True)
class U2Decomposition:
    """Angles of m = exp(-i chi) * (cos(phi/2) 1 - i sin(phi/2) axis.sigma)."""

    chi: float
    phi: float
    axis: np.ndarray

    def matrix(self) -> np.ndarray:
        """Rebuild the U(2) matrix from the stored angles."""
        n_dot_sigma = (
            self.axis[0] * SIGMA_X + self.axis[1] * SIGMA_Y + self.axis[2] * SIGMA_Z
        )
        rot = math.cos(self.phi / 2) * IDENTITY_2 - 1j * math.sin(self.phi / 2) * n_dot_sigma
        return np.exp(-1j * self.chi) * rot


def _wrap_angle(a: float) -> float:
    """Map an angle to the principal interval (-pi, pi]."""
    return math.atan2(math.sin(a), math.cos(a))


def decompose_u2(m: np.ndarray, tol: float = DEFAULT_TOL) -> U2Decomposition:
    """Split a U(2) matrix into a global phase and an SU(2) rotation.

    Branch conventions:

    * chi = -arg(det m)/2, shifted by pi if needed so that the trace of
      exp(i chi) m is real and non-negative; this forces phi into [0, pi];
    * phi = 0 returns the axis (0, 0, 1);
    * phi = pi (trace-zero ambiguity) picks the branch whose axis has a
      positive first nonzero component.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"decompose_u2 expects a 2x2 matrix, got shape {m.shape}")
    if not is_unitary(m, tol):
        raise NotUnitary("decompose_u2 requires a unitary input")
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    chi = -0.5 * float(np.angle(det))
    su = np.exp(1j * chi) * m
    tr = su[0, 0] + su[1, 1]
    if tr.real < 0.0:
        chi += math.pi
        su = -su
        tr = -tr
    cos_half = min(tr.real / 2.0, 1.0)
    # sin(phi/2) * axis, read off the anti-Hermitian part entry by entry
    scaled_axis = np.array(
        [
            -0.5 * (su[0, 1] + su[1, 0]).imag,
            0.5 * (su[1, 0] - su[0, 1]).real,
            0.5 * (su[1, 1].imag - su[0, 0].imag),
        ]
    )
    sin_half = float(np.linalg.norm(scaled_axis))
    phi = 2.0 * math.atan2(sin_half, cos_half)
    if sin_half <= 1e-12:
        axis = np.array([0.0, 0.0, 1.0])
    else:
        axis = scaled_axis / sin_half
    if abs(cos_half) <= 1e-12:
        # trace-zero tie: a unit vector has a component of at least 1/sqrt(3),
        # so scanning with a loose threshold is safe
        for comp in axis:
            if abs(comp) > 1e-9:
                if comp < 0.0:
                    axis = -axis
                    chi += math.pi
                break
    return U2Decomposition(chi=_wrap_angle(chi), phi=float(phi), axis=axis)


def exp_hermitian(h: np.ndarray, a: float, tol: float = DEFAULT_TOL) -> np.ndarray:
    """exp(-i a h) for Hermitian h, via eigendecomposition."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol):
        raise NotHermitian("exp_hermitian requires a Hermitian generator")
    w, q = np.linalg.eigh(h)
    return (q * np.exp(-1j * a * w)) @ dagger(q)
