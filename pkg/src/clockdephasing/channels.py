"""Dephasing channels induced by an imperfect timer on a controlled unitary.

The canonical representation is spectral: in the eigenbasis of the generator
the channel multiplies element ``(m, n)`` by
``exp(-i (E_m - E_n) tau) * phi0(E_m - E_n)``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .qcore import TOL, SpectralHamiltonian, evolve_unitary, hermitian_eigendecomposition
from .ticks import TickDistribution

PAULI_Z = np.diag([1.0, -1.0]).astype(complex)


@dataclass(frozen=True)
class DephasedGateChannel:
    generator: SpectralHamiltonian
    tau: float
    filter: np.ndarray
    kraus: tuple | None = None

    def __post_init__(self):
        f = np.asarray(self.filter, dtype=complex)
        d = self.generator.dim
        if f.shape != (d, d):
            raise ValueError(f"filter shape {f.shape} does not match dimension {d}")
        if np.abs(np.diag(f) - 1.0).max() > 0:
            raise ValueError("filter diagonal must be exactly 1")
        if np.abs(f).max() > 1.0 + TOL:
            raise ValueError("filter entries must have magnitude <= 1")
        if np.abs(f - f.conj().T).max() > TOL:
            raise ValueError("filter must be conjugate-symmetric")
        f = f.copy()
        f.setflags(write=False)
        object.__setattr__(self, "filter", f)
        if self.kraus is not None:
            ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
            check_kraus(ks, d)
            object.__setattr__(self, "kraus", ks)

    @property
    def dim(self) -> int:
        return self.generator.dim

    def multiplier(self) -> np.ndarray:
        """Full Hadamard multiplier in the eigenbasis (unitary phase times filter)."""
        return np.exp(-1j * self.generator.gaps() * self.tau) * self.filter

    def ideal_unitary(self) -> np.ndarray:
        return self.generator.unitary(self.tau)

    def __call__(self, rho):
        return apply_channel(self, rho)

    def noise_only(self, rho):
        """Apply the channel followed by the inverse ideal unitary."""
        u = self.ideal_unitary()
        return u.conj().T @ apply_channel(self, rho) @ u

    def choi(self) -> np.ndarray:
        return choi_matrix(self, self.dim)

    def to_json(self) -> dict:
        return {
            "energies": self.generator.energies.tolist(),
            "eigenvectors": _encode_complex(self.generator.eigenvectors),
            "tau": self.tau,
            "filter": _encode_complex(self.filter),
        }

    @classmethod
    def from_json(cls, data: dict) -> "DephasedGateChannel":
        try:
            gen = SpectralHamiltonian(
                np.asarray(data["energies"], dtype=float), _decode_complex(data["eigenvectors"])
            )
            return cls(gen, float(data["tau"]), _decode_complex(data["filter"]))
        except (KeyError, TypeError, IndexError) as exc:
            raise ValueError(f"malformed channel dump: {exc}") from exc


def _encode_complex(a) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in a]


def _decode_complex(rows) -> np.ndarray:
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise ValueError("expected rows of [real, imag] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def dumps_channel(ch: DephasedGateChannel) -> str:
    return json.dumps(ch.to_json(), indent=2)


def loads_channel(text: str) -> DephasedGateChannel:
    return DephasedGateChannel.from_json(json.loads(text))


def build_channel(h, dist: TickDistribution) -> DephasedGateChannel:
    """Channel enacted by running generator ``h`` for a tick drawn from ``dist``."""
    if not isinstance(h, SpectralHamiltonian):
        h = hermitian_eigendecomposition(h)
    gaps = h.gaps()
    f = np.asarray(dist.characteristic(gaps), dtype=complex)
    # equal energies are never filtered
    f = np.where(gaps == 0, 1.0 + 0j, f)
    f = 0.5 * (f + f.conj().T)
    np.fill_diagonal(f, 1.0)
    return DephasedGateChannel(h, float(dist.mean), f)


def apply_channel(ch: DephasedGateChannel, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape[-1] != ch.dim or rho.shape[-2] != ch.dim:
        raise ValueError(f"state dimension {rho.shape[-1]} != channel dimension {ch.dim}")
    v = ch.generator.eigenvectors
    vh = v.conj().T
    return v @ ((vh @ rho @ v) * ch.multiplier()) @ vh


def check_kraus(kraus, d: int, atol: float = TOL) -> None:
    total = np.zeros((d, d), dtype=complex)
    for k in kraus:
        k = np.asarray(k, dtype=complex)
        if k.shape != (d, d):
            raise ValueError(f"Kraus operator shape {k.shape} != ({d}, {d})")
        total += k.conj().T @ k
    err = np.abs(total - np.eye(d)).max()
    if err > atol:
        raise ValueError(f"Kraus set is not complete (deviation {err:.3g})")


def apply_kraus(kraus, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    return sum(k @ rho @ k.conj().T for k in kraus)


def choi_matrix(channel, d: int) -> np.ndarray:
    """Choi matrix ``sum_ij |i><j| (x) E(|i><j|)`` of any linear map on ``d x d`` matrices."""
    units = np.zeros((d * d, d, d), dtype=complex)
    units[np.arange(d * d), np.repeat(np.arange(d), d), np.tile(np.arange(d), d)] = 1.0
    images = np.asarray(channel(units))
    choi = np.zeros((d * d, d * d), dtype=complex)
    for idx in range(d * d):
        i, j = divmod(idx, d)
        choi[i * d:(i + 1) * d, j * d:(j + 1) * d] = images[idx]
    return choi


def is_cptp(channel, d: int, atol: float = 1e-9) -> bool:
    """Numerical CPTP check: Choi matrix PSD and partial trace equal to identity."""
    choi = choi_matrix(channel, d)
    if np.abs(choi - choi.conj().T).max() > atol:
        return False
    if np.linalg.eigvalsh(choi).min() < -atol:
        return False
    blocks = choi.reshape(d, d, d, d)
    # tracing the output factor must give the identity on the input
    tp = np.einsum("iaja->ij", blocks)
    return bool(np.abs(tp - np.eye(d)).max() <= atol)


def _dephasing_weights(gamma: float) -> tuple[float, float]:
    if gamma < 0 or math.isnan(gamma):
        raise ValueError(f"dephasing magnitude must be nonnegative, got {gamma}")
    e = math.exp(-gamma)
    return math.sqrt((1.0 + e) / 2.0), math.sqrt((1.0 - e) / 2.0)


def _projector_kraus(gamma: float, proj) -> tuple[np.ndarray, np.ndarray]:
    a, b = _dephasing_weights(gamma)
    d = proj.shape[0]
    eye = np.eye(d, dtype=complex)
    return a * eye, b * (eye - 2.0 * proj)


def qubit_dephasing_kraus(gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """Kraus pair shrinking qubit coherences by ``exp(-gamma)``."""
    a, b = _dephasing_weights(gamma)
    return a * np.eye(2, dtype=complex), b * PAULI_Z.copy()


BELL_PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
BELL_PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2)
ONE_MINUS = np.array([0, 0, 1, -1], dtype=complex) / math.sqrt(2)


def cnot_generator() -> np.ndarray:
    """``|1-><1-|``; running it for time pi enacts CNOT."""
    return np.outer(ONE_MINUS, ONE_MINUS.conj())


def swap_generator() -> np.ndarray:
    """``|Psi-><Psi-|``; running it for time pi enacts SWAP."""
    return np.outer(BELL_PSI_MINUS, BELL_PSI_MINUS.conj())


def cnot_dephasing_kraus(gamma: float) -> tuple[np.ndarray, np.ndarray]:
    return _projector_kraus(gamma, cnot_generator())


def swap_dephasing_kraus(gamma: float) -> tuple[np.ndarray, np.ndarray]:
    return _projector_kraus(gamma, swap_generator())


def qubit_generator(omega: float = 1.0) -> np.ndarray:
    return np.diag([0.0, omega]).astype(complex)


def monte_carlo_average(
    h,
    dist: TickDistribution,
    rho,
    samples: int,
    rng: np.random.Generator,
    chunk: int = 1 << 16,
) -> np.ndarray:
    """Average ``exp(-iHt) rho exp(iHt)`` over ``samples`` tick times drawn from ``dist``."""
    if samples < 1:
        raise ValueError("need at least one sample")
    if not isinstance(h, SpectralHamiltonian):
        h = hermitian_eigendecomposition(h)
    rho = np.asarray(rho, dtype=complex)
    v = h.eigenvectors
    acc = np.zeros((h.dim, h.dim), dtype=complex)
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        t = np.atleast_1d(dist.sample(rng, m))
        ph = np.exp(-1j * np.outer(t, h.energies))
        acc += ph.T @ ph.conj()
        done += m
    avg = acc / samples
    return v @ ((v.conj().T @ rho @ v) * avg) @ v.conj().T


def monte_carlo_average_sharded(
    h, dist: TickDistribution, rho, samples: int, seed: int, shards: int
) -> np.ndarray:
    """Shard ``samples`` across independent streams spawned from ``seed``.

    Shards are reduced in a fixed order, so the result depends only on
    ``(seed, shards, samples)``.
    """
    if shards < 1:
        raise ValueError("shards must be positive")
    streams = np.random.SeedSequence(seed).spawn(shards)
    sizes = [samples // shards + (i < samples % shards) for i in range(shards)]
    total = np.zeros_like(np.asarray(rho, dtype=complex))
    for ss, m in zip(streams, sizes):
        if m:
            total += m * monte_carlo_average(h, dist, rho, m, np.random.default_rng(ss))
    return total / samples


def unitary_reference(h, dist: TickDistribution, rho) -> np.ndarray:
    """Ideal output when the timer always ticks at its mean."""
    if not isinstance(h, SpectralHamiltonian):
        h = hermitian_eigendecomposition(h)
    return evolve_unitary(rho, h, dist.mean)
