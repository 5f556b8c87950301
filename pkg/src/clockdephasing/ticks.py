"""Tick distributions of control timers.

Every distribution exposes its first two moments, a sampler and the
mean-centered characteristic function ``phi0(omega) = E[exp(-i omega (T - tau))]``.
Only ``|phi0|`` and the mean phase ``exp(-i omega tau)`` enter the channels
built from it.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np


class TickDistribution:
    """Base class. Subclasses implement ``moments``, ``characteristic`` and ``sample``."""

    def moments(self) -> tuple[float, float]:
        raise NotImplementedError

    def characteristic(self, omega):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    @property
    def mean(self) -> float:
        return self.moments()[0]

    @property
    def variance(self) -> float:
        return self.moments()[1]

    def accuracy(self) -> float:
        """``tau**2 / sigma**2``; infinite for a noiseless timer."""
        tau, var = self.moments()
        if tau <= 0:
            raise ValueError(f"accuracy needs a positive mean tick time, got {tau}")
        if var == 0:
            return math.inf
        return tau * tau / var

    def dephasing_rate(self, omega):
        """``-log|phi0(omega)|``; ``inf`` where the characteristic function vanishes."""
        mag = np.abs(self.characteristic(omega))
        with np.errstate(divide="ignore"):
            gamma = -np.log(np.minimum(mag, 1.0))
        return gamma + 0.0 if np.ndim(gamma) else float(gamma) + 0.0


@dataclass(frozen=True)
class Dirac(TickDistribution):
    """Perfect timer ticking exactly at ``tau``."""

    tau: float

    def moments(self):
        return float(self.tau), 0.0

    def characteristic(self, omega):
        return np.ones_like(np.asarray(omega, dtype=float), dtype=complex)[()]

    def sample(self, rng, size=None):
        if size is None:
            return float(self.tau)
        return np.full(size, float(self.tau))


@dataclass(frozen=True)
class Gaussian(TickDistribution):
    tau: float
    sigma: float

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")

    @classmethod
    def from_accuracy(cls, tau: float, accuracy: float) -> "Gaussian":
        if accuracy <= 0:
            raise ValueError("accuracy must be positive")
        return cls(tau, 0.0 if math.isinf(accuracy) else tau / math.sqrt(accuracy))

    def moments(self):
        return float(self.tau), float(self.sigma) ** 2

    def characteristic(self, omega):
        omega = np.asarray(omega, dtype=float)
        return np.exp(-0.5 * (self.sigma * omega) ** 2).astype(complex)[()]

    def dephasing_rate(self, omega):
        omega = np.asarray(omega, dtype=float)
        return (0.5 * (self.sigma * omega) ** 2)[()]

    def sample(self, rng, size=None):
        # no truncation: negative tick times are kept
        return rng.normal(self.tau, self.sigma, size)


@dataclass(frozen=True)
class Exponential(TickDistribution):
    """Exponential waiting time with mean ``tau``."""

    tau: float

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")

    def moments(self):
        return float(self.tau), float(self.tau) ** 2

    def characteristic(self, omega):
        x = np.asarray(omega, dtype=float) * self.tau
        return (np.exp(1j * x) / (1.0 + 1j * x))[()]

    def sample(self, rng, size=None):
        return rng.exponential(self.tau, size)


@dataclass(frozen=True)
class Comb(TickDistribution):
    """``n`` equally likely ticks at ``k / (n eps)``, ``k = 0..n-1``."""

    n: int
    eps: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        if self.eps <= 0:
            raise ValueError("eps must be positive")

    def atoms(self) -> np.ndarray:
        return np.arange(self.n) / (self.n * self.eps)

    def moments(self):
        n, eps = self.n, self.eps
        return (n - 1) / (2 * n * eps), (n * n - 1) / (12 * n * n * eps * eps)

    def characteristic(self, omega):
        return _dirichlet_ratio(self.n, np.asarray(omega, dtype=float) / self.eps).astype(
            complex
        )[()]

    def sample(self, rng, size=None):
        k = rng.integers(0, self.n, size)
        return k / (self.n * self.eps)


@dataclass(frozen=True)
class Empirical(TickDistribution):
    """Discrete distribution on explicit tick times."""

    times: tuple
    weights: tuple = field(default=None)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).ravel()
        if t.size == 0:
            raise ValueError("empirical distribution needs at least one atom")
        w = (
            np.full(t.size, 1.0 / t.size)
            if self.weights is None
            else np.asarray(self.weights, dtype=float).ravel()
        )
        if w.shape != t.shape:
            raise ValueError("times and weights must have equal length")
        if (w < 0).any() or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "times", tuple(t.tolist()))
        object.__setattr__(self, "weights", tuple(w.tolist()))

    def moments(self):
        t = np.asarray(self.times)
        w = np.asarray(self.weights)
        mean = float(w @ t)
        return mean, float(w @ (t - mean) ** 2)

    def characteristic(self, omega):
        t = np.asarray(self.times)
        w = np.asarray(self.weights)
        omega = np.asarray(omega, dtype=float)
        shifted = t - self.mean
        return (np.exp(-1j * omega[..., None] * shifted) @ w)[()]

    def sample(self, rng, size=None):
        return rng.choice(np.asarray(self.times), size=size, p=np.asarray(self.weights))


def _dirichlet_ratio(n: int, a):
    """``sin(a/2) / (n sin(a/(2n)))`` with removable singularities filled in."""
    x = 0.5 * np.asarray(a, dtype=float) / n
    k = np.round(x / np.pi)
    delta = x - k * np.pi
    near = np.abs(delta) < 1e-6
    sign = np.where((k * (n - 1)) % 2 == 0, 1.0, -1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.sin(n * x) / (n * np.sin(x))
    limit = sign * (1.0 - (n * n - 1) * delta * delta / 6.0)
    return np.where(near, limit, ratio)


def comb_characteristic_closed_form(n: int, eps: float, omega):
    """Uncentered characteristic function of :class:`Comb`.

    Includes the mean phase ``exp(-i (omega/eps)(1/2 - 1/(2n)))``.
    """
    if n < 1 or eps <= 0:
        raise ValueError("need n >= 1 and eps > 0")
    a = np.asarray(omega, dtype=float) / eps
    phase = np.exp(-1j * a * (0.5 - 0.5 / n))
    return (phase * _dirichlet_ratio(n, a))[()]


def moments(dist: TickDistribution) -> tuple[float, float]:
    return dist.moments()


def accuracy(dist: TickDistribution) -> float:
    return dist.accuracy()


def centered_characteristic(dist: TickDistribution, omega):
    return dist.characteristic(omega)


def dephasing_rate(dist: TickDistribution, omega):
    return dist.dephasing_rate(omega)


def sample(dist: TickDistribution, rng: np.random.Generator, size=None):
    return dist.sample(rng, size)


def load_empirical_csv(path) -> Empirical:
    """Read ``time_seconds,weight`` rows; an optional header line is skipped.

    Weights summing to within ``1e-6`` of one are renormalized, anything
    further off is rejected.
    """
    times, weights = [], []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or not "".join(row).strip():
                continue
            try:
                t, w = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if i == 0:
                    continue
                raise ValueError(f"{path}: malformed row {i + 1}: {row!r}")
            times.append(t)
            weights.append(w)
    w = np.asarray(weights, dtype=float)
    total = w.sum()
    if not times or abs(total - 1.0) > 1e-6:
        raise ValueError(f"{path}: weights sum to {total}, expected 1")
    return Empirical(tuple(times), tuple((w / total).tolist()))
