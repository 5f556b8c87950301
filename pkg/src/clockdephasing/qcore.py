"""Dense complex linear algebra and density-matrix utilities.

Density matrices are plain ``numpy`` arrays of shape ``(d, d)``; most helpers
also accept a leading batch axis ``(..., d, d)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Exactness tolerance for Hermiticity / trace / positivity checks.
TOL = 1e-10
# Reconstruction tolerance for the eigendecomposition.
RECON_TOL = 1e-9
# Largest matrix handled by the Jacobi solver.
MAX_DIM = 64
MAX_SWEEPS = 100


class ConvergenceError(ArithmeticError):
    """Raised when the Jacobi iteration does not converge."""


@dataclass(frozen=True)
class SpectralHamiltonian:
    """Hermitian generator stored as ascending energies and eigenvector columns."""

    energies: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self):
        energies = np.asarray(self.energies, dtype=float).copy()
        vecs = np.asarray(self.eigenvectors, dtype=complex).copy()
        if vecs.shape != (energies.size, energies.size):
            raise ValueError(
                f"eigenvectors shape {vecs.shape} does not match {energies.size} energies"
            )
        gram = vecs.conj().T @ vecs
        if np.abs(gram - np.eye(energies.size)).max() > TOL:
            raise ValueError("eigenvectors are not orthonormal")
        energies.setflags(write=False)
        vecs.setflags(write=False)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "eigenvectors", vecs)

    @property
    def dim(self) -> int:
        return self.energies.size

    def matrix(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.energies) @ v.conj().T

    def gaps(self) -> np.ndarray:
        """Matrix of energy differences ``E_m - E_n``."""
        return self.energies[:, None] - self.energies[None, :]

    def unitary(self, t: float) -> np.ndarray:
        v = self.eigenvectors
        return (v * np.exp(-1j * self.energies * t)) @ v.conj().T


def is_hermitian(a, atol: float = TOL) -> bool:
    a = np.asarray(a)
    return a.ndim >= 2 and a.shape[-1] == a.shape[-2] and bool(
        np.abs(a - np.swapaxes(a.conj(), -1, -2)).max(initial=0.0) <= atol
    )


def _jacobi_rotation(app: float, aqq: float, apq: complex):
    """2x2 unitary zeroing ``apq`` of ``[[app, apq], [conj(apq), aqq]]``."""
    mag = abs(apq)
    phase = apq / mag
    theta = (aqq - app) / (2.0 * mag)
    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.hypot(theta, 1.0))
    c = 1.0 / np.hypot(t, 1.0)
    s = t * c
    # phase diag(1, conj(phase)) makes the pivot real, then a real rotation.
    dq = np.conj(phase)
    return np.array([[c, s], [-s * dq, c * dq]], dtype=complex)


def hermitian_eigendecomposition(h) -> SpectralHamiltonian:
    """Diagonalize a Hermitian matrix with cyclic complex Jacobi rotations.

    Eigenvalues are returned in ascending order. Each eigenvector has its
    largest-magnitude component made real and positive, so the output is
    deterministic up to the choice of basis inside degenerate eigenspaces.

    Raises
    ------
    ValueError
        If ``h`` is not square, is larger than ``MAX_DIM``, or is not
        Hermitian to ``1e-8``.
    ConvergenceError
        If the off-diagonal mass does not vanish within ``MAX_SWEEPS`` sweeps.
    """
    a = np.array(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    d = a.shape[0]
    if d > MAX_DIM:
        raise ValueError(f"dimension {d} exceeds the supported maximum {MAX_DIM}")
    if not is_hermitian(a, 1e-8):
        raise ValueError("matrix is not Hermitian")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(d, dtype=complex)

    scale = max(np.abs(a).max(), np.finfo(float).tiny)
    for _ in range(MAX_SWEEPS):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= 1e-15 * scale * d:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                r = _jacobi_rotation(a[p, p].real, a[q, q].real, apq)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ r
                a[idx, :] = r.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ r
    else:
        raise ConvergenceError(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")

    energies = np.diag(a).real
    order = np.argsort(energies, kind="stable")
    energies = energies[order]
    v = v[:, order]
    for k in range(d):
        j = int(np.argmax(np.abs(v[:, k])))
        v[:, k] *= np.conj(v[j, k]) / abs(v[j, k])
        v[j, k] = v[j, k].real
    return SpectralHamiltonian(energies, v)


def check_density_matrix(rho, atol: float = TOL) -> np.ndarray:
    """Return ``rho`` as a complex array, raising ``ValueError`` if it is not a state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim < 2 or rho.shape[-1] != rho.shape[-2]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if not is_hermitian(rho, atol):
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho, axis1=-2, axis2=-1)
    if np.abs(tr - 1.0).max() > atol:
        raise ValueError(f"density matrix trace deviates from 1: {tr}")
    if np.linalg.eigvalsh(rho).min() < -atol:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def is_density_matrix(rho, atol: float = TOL) -> bool:
    try:
        check_density_matrix(rho, atol)
    except ValueError:
        return False
    return True


def evolve_unitary(rho, h: SpectralHamiltonian, t: float) -> np.ndarray:
    """Return ``exp(-iHt) rho exp(iHt)``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-1] != h.dim or rho.shape[-2] != h.dim:
        raise ValueError(f"state dimension {rho.shape[-1]} != generator dimension {h.dim}")
    u = h.unitary(t)
    return u @ rho @ u.conj().T


def haar_random_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a Haar-random unit vector in ``C^dim``."""
    return haar_random_states(dim, None, rng)


def haar_random_states(dim: int, size, rng: np.random.Generator) -> np.ndarray:
    """Batch version of :func:`haar_random_state`; ``size=None`` gives one vector."""
    if dim < 1:
        raise ValueError("dim must be at least 1")
    shape = (dim,) if size is None else (size, dim)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def pure_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return psi[..., :, None] * psi[..., None, :].conj()


def partial_trace(rho, dims, keep) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    ``dims`` lists the subsystem dimensions in tensor-product order; kept
    subsystems appear in the output in their original order.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = [int(x) for x in dims]
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"dims {dims} inconsistent with matrix shape {rho.shape}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    t = rho.reshape(dims + dims)
    row = list(range(n))
    col = [i if i not in keep else n + i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    reduced = np.einsum(t, row + col, out)
    d_keep = int(np.prod([dims[k] for k in keep]))
    return reduced.reshape(d_keep, d_keep)


def trace_distance(a, b) -> float:
    """Half the trace norm of ``a - b``."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    diff = 0.5 * (diff + diff.conj().T)
    eig = hermitian_eigendecomposition(diff).energies
    return float(min(1.0, 0.5 * np.abs(eig).sum()))


def ket(bits: str) -> np.ndarray:
    """Computational-basis ket from a string such as ``"10"`` (qubit 0 leftmost)."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v
