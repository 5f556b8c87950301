"""Fidelity and unitarity of timing-induced dephasing, and clock budgets."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .channels import check_kraus
from .qcore import haar_random_states

METHODS = ("closed_form", "kraus_trace", "haar_monte_carlo")


@dataclass(frozen=True)
class FidelityReport:
    value: float
    method: str
    standard_error: float | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if (self.standard_error is not None) != (self.method == "haar_monte_carlo"):
            raise ValueError("standard_error is reported only for Monte Carlo estimates")
        if not -1e-12 <= self.value <= 1 + 1e-12:
            raise ValueError(f"fidelity {self.value} outside [0, 1]")

    def within(self, expected: float, n_se: float = 3.0) -> bool:
        return abs(self.value - expected) <= n_se * (self.standard_error or 0.0)


@dataclass(frozen=True)
class CircuitNoiseProfile:
    n: int
    layer_counts: tuple
    accuracy: float

    def __post_init__(self):
        counts = tuple(int(c) for c in self.layer_counts)
        if any(c < 0 or 2 * c > self.n for c in counts):
            raise ValueError("each layer needs 0 <= 2*l_t <= n")
        if not self.accuracy > 0:
            raise ValueError("accuracy must be positive")
        object.__setattr__(self, "layer_counts", counts)

    @property
    def total_cnots(self) -> int:
        return sum(self.layer_counts)

    def bound(self) -> float:
        return circuit_fidelity_bound(self.n, self.total_cnots, self.accuracy)


def _complete(kraus, d: int):
    kraus = [np.asarray(k, dtype=complex) for k in kraus]
    check_kraus(kraus, d, atol=1e-8)
    return kraus


def average_gate_fidelity_from_kraus(kraus, d: int) -> FidelityReport:
    """Haar-averaged fidelity of a noise channel to the identity, via Kraus traces."""
    kraus = _complete(kraus, d)
    s = sum(abs(np.trace(k)) ** 2 for k in kraus)
    return FidelityReport(float((s + d) / (d * d + d)), "kraus_trace")


def single_gate_fidelity(theta: float, accuracy: float) -> float:
    """``(2 + exp(-theta^2 / 2N)) / 3`` for a qubit gate of pulse area ``theta``."""
    if not accuracy > 0:
        raise ValueError("accuracy must be positive")
    return (2.0 + math.exp(-theta * theta / (2.0 * accuracy))) / 3.0


def gamma_from_pulse(theta: float, accuracy: float) -> float:
    if not accuracy > 0:
        raise ValueError("accuracy must be positive")
    return theta * theta / (2.0 * accuracy)


def cnot_subspace_fidelity(gamma: float) -> float:
    _check_gamma(gamma)
    return (2.0 + math.exp(-gamma)) / 3.0


def cnot_fullspace_fidelity(gamma: float) -> float:
    """``(7 + 3 exp(-gamma)) / 10``: ill-timed CNOT averaged over both qubits."""
    _check_gamma(gamma)
    return (7.0 + 3.0 * math.exp(-gamma)) / 10.0


def _check_gamma(gamma):
    if gamma < 0 or math.isnan(gamma):
        raise ValueError(f"gamma must be nonnegative, got {gamma}")


def kraus_weight_purity(kraus, d: int) -> float:
    """``sum_i (||K_i||_2^2 / d)^2`` evaluated by explicit traces.

    This is the quantity the circuit bound is built from. It depends on the
    Kraus representation, not only on the channel.
    """
    kraus = _complete(kraus, d)
    return float(sum((np.trace(k.conj().T @ k).real / d) ** 2 for k in kraus))


def unitarity_from_kraus(kraus, d: int) -> float:
    ups2 = kraus_weight_purity(kraus, d)
    return (d * d * ups2 - 1.0) / (d * d - 1.0)


def _half_weight_log(accuracy: float) -> float:
    """``log((1 + exp(-pi^2/N)) / 2)`` accurate for large ``N``."""
    if math.isinf(accuracy):
        return 0.0
    return math.log1p(0.5 * math.expm1(-math.pi ** 2 / accuracy))


def circuit_unitarity_gamma(n_cnots: int, accuracy: float) -> float:
    """Closed-form ``((1 + exp(-pi^2/N)) / 2) ** L`` for ``L`` ill-timed CNOTs."""
    if n_cnots < 0:
        raise ValueError("CNOT count must be nonnegative")
    if not accuracy > 0:
        raise ValueError("accuracy must be positive")
    return math.exp(n_cnots * _half_weight_log(accuracy))


def circuit_fidelity_bound(n: int, n_cnots: int, accuracy: float) -> float:
    """Fidelity ceiling ``(2^n sqrt(Y) + 1) / (2^n + 1)`` with ``Y`` the circuit weight purity.

    This is not a valid upper bound in general: a single ill-timed CNOT on two
    qubits has exact average fidelity ``(7 + 3 exp(-gamma)) / 10``, which is
    above this value whenever ``0 < gamma < 1.19`` (accuracy above about 4.15).
    Compare against
    :func:`clockdephasing.circuit.exact_average_fidelity` before relying on it.
    """
    if n < 1:
        raise ValueError("need at least one qubit")
    ups = math.sqrt(circuit_unitarity_gamma(n_cnots, accuracy))
    d = 2.0 ** n
    return (d * ups + 1.0) / (d + 1.0)


def bound_from_unitarity(ups2: float, n: int) -> float:
    d = 2.0 ** n
    return (d * math.sqrt(ups2) + 1.0) / (d + 1.0)


def required_accuracy(n: int, n_cnots: int, threshold: float = 0.5) -> float:
    """Smallest clock accuracy for which the circuit bound reaches ``threshold``."""
    if n_cnots < 1:
        raise ValueError("a circuit without CNOTs meets any threshold")
    d = 2.0 ** n
    floor = (d * 2.0 ** (-n_cnots / 2.0) + 1.0) / (d + 1.0)
    if not floor < threshold < 1.0:
        raise ValueError(
            f"threshold {threshold} outside the achievable range ({floor:.6g}, 1)"
        )

    def gap(log_n):
        return circuit_fidelity_bound(n, n_cnots, math.exp(log_n)) - threshold

    lo, hi = 0.0, 1.0
    while gap(lo) > 0:
        lo -= 8.0
    while gap(hi) < 0:
        hi += 8.0
    return math.exp(brentq(gap, lo, hi, xtol=1e-12, rtol=1e-14, maxiter=500))


def asymptotic_required_accuracy(n_cnots: int, threshold: float = 0.5) -> float:
    """Large-``n``, large-``N`` approximation ``L pi^2 / (4 log(1/F))``; cross-check only."""
    return n_cnots * math.pi ** 2 / (4.0 * math.log(1.0 / threshold))


def timing_uncertainty(tau: float, accuracy: float) -> float:
    """Standard deviation of tick times, ``tau / sqrt(N)``."""
    if tau <= 0 or not accuracy > 0:
        raise ValueError("tau and accuracy must be positive")
    return tau / math.sqrt(accuracy)


def entropy_accuracy_bound(entropy_per_tick: float) -> float:
    """Largest accuracy a thermal clock can reach producing this entropy per tick."""
    if entropy_per_tick < 0:
        raise ValueError("entropy production cannot be negative")
    return entropy_per_tick / 2.0


def required_entropy(accuracy: float) -> float:
    if accuracy < 0:
        raise ValueError("accuracy must be nonnegative")
    return 2.0 * accuracy


def haar_average_fidelity(
    channel,
    target,
    d: int,
    samples: int,
    rng: np.random.Generator,
    chunk: int = 4096,
) -> FidelityReport:
    """Monte Carlo estimate of ``E_psi <psi|U^dag E(psi) U|psi>`` over Haar inputs.

    ``channel`` maps a batch of density matrices ``(S, d, d)`` to outputs of
    the same shape; ``target`` is the ideal unitary (``None`` for identity).
    """
    if samples < 2:
        raise ValueError("need at least two samples for a standard error")
    u = np.eye(d, dtype=complex) if target is None else np.asarray(target, dtype=complex)
    values = np.empty(samples)
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        psi = haar_random_states(d, m, rng)
        rho = psi[:, :, None] * psi[:, None, :].conj()
        out = np.asarray(channel(rho))
        phi = psi @ u.T
        values[done:done + m] = np.einsum("si,sij,sj->s", phi.conj(), out, phi).real
        done += m
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(samples))
    return FidelityReport(min(max(mean, 0.0), 1.0), "haar_monte_carlo", se)
