"""Algorithmic cooling of a qubit with ill-timed SWAPs against a virtual qubit."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import apply_kraus, swap_dephasing_kraus
from .qcore import partial_trace
from .ticks import Gaussian, TickDistribution

SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def swap_error_probability(accuracy: float) -> float:
    """Chance that the virtual-qubit population fails to swap, ``(1 - exp(-pi^2/2N)) / 2``."""
    if not accuracy > 0:
        raise ValueError("accuracy must be positive")
    if math.isinf(accuracy):
        return 0.0
    return -0.5 * math.expm1(-math.pi ** 2 / (2.0 * accuracy))


def error_probability_from_sigma(sigma: float, tau: float = math.pi) -> float:
    """Same as :func:`swap_error_probability` with the timer given as ``(sigma, tau)``."""
    if sigma < 0 or tau <= 0:
        raise ValueError("need sigma >= 0 and tau > 0")
    if math.isinf(sigma):
        return 0.5
    # pi^2 / 2N written in sigma to avoid overflow of tau^2 / sigma^2
    return -0.5 * math.expm1(-0.5 * (math.pi * sigma / tau) ** 2)


@dataclass(frozen=True)
class ThermalQubit:
    beta: float
    omega: float

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError("gap must be positive")
        if self.beta < 0:
            raise ValueError("inverse temperature must be nonnegative")

    @property
    def z(self) -> float:
        return math.tanh(self.beta * self.omega)

    @property
    def ground_population(self) -> float:
        return 0.5 * (1.0 + self.z)

    def density_matrix(self) -> np.ndarray:
        r = self.ground_population
        return np.diag([r, 1.0 - r]).astype(complex)


def thermal_qubit(beta: float, omega: float) -> ThermalQubit:
    return ThermalQubit(beta, omega)


def _populations(r: float) -> np.ndarray:
    return np.diag([r, 1.0 - r]).astype(complex)


@dataclass(frozen=True)
class CoolingConfig:
    """Cooling parameters.

    The timer is given either as a clock ``accuracy`` or as ``sigma`` (with
    mean pulse area ``tau``, default pi); ``sigma=inf`` is the worst case.
    """

    r_s: float
    r_v: float
    p_v: float
    accuracy: float | None = None
    sigma: float | None = None
    tau: float = math.pi
    h: float = 0.1

    def __post_init__(self):
        if not 1.0 >= self.r_v >= self.r_s >= 0.0:
            raise ValueError("need 1 >= r_v >= r_s >= 0")
        if not 0.0 < self.p_v < 1.0:
            raise ValueError("virtual-qubit occupation must lie in (0, 1)")
        if (self.accuracy is None) == (self.sigma is None):
            raise ValueError("give exactly one of accuracy or sigma")
        if self.h <= 0:
            raise ValueError("finite-difference step must be positive")
        # validates the timer parameters
        self.p

    @property
    def p(self) -> float:
        if self.accuracy is not None:
            return swap_error_probability(self.accuracy)
        return error_probability_from_sigma(self.sigma, self.tau)

    @property
    def effective_p_v(self) -> float:
        return self.p_v * (1.0 - self.p)

    @property
    def contraction(self) -> float:
        """Per-step factor ``1 - P_v (1 - p)`` on the distance to ``r_v``."""
        return 1.0 - self.effective_p_v

    @property
    def z_s(self) -> float:
        return 2.0 * self.r_s - 1.0

    @property
    def z_v(self) -> float:
        return 2.0 * self.r_v - 1.0

    @property
    def beta_s(self) -> float:
        """Inverse temperature of the system in units of its gap."""
        return math.atanh(self.z_s) if self.z_s < 1 else math.inf

    @property
    def beta_v(self) -> float:
        return math.atanh(self.z_v) if self.z_v < 1 else math.inf

    def replace(self, **changes) -> "CoolingConfig":
        fields = dict(
            r_s=self.r_s, r_v=self.r_v, p_v=self.p_v, accuracy=self.accuracy,
            sigma=self.sigma, tau=self.tau, h=self.h,
        )
        if "sigma" in changes:
            fields["accuracy"] = None
        if "accuracy" in changes:
            fields["sigma"] = None
        fields.update(changes)
        return CoolingConfig(**fields)

    @classmethod
    def from_json(cls, data: dict) -> "CoolingConfig":
        known = {"r_s", "r_v", "p_v", "accuracy", "sigma", "tau", "h"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown cooling config keys: {sorted(extra)}")
        kwargs = {k: (float(v) if v is not None else None) for k, v in data.items()}
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ValueError(f"malformed cooling config: {exc}") from exc

    def to_json(self) -> dict:
        out = {"r_s": self.r_s, "r_v": self.r_v, "p_v": self.p_v, "tau": self.tau, "h": self.h}
        if self.accuracy is not None:
            out["accuracy"] = self.accuracy
        else:
            out["sigma"] = self.sigma
        return out


def ground_population_after_n(config: CoolingConfig, n) -> float:
    """Ground population after ``n`` SWAP attempts; ``n`` may be real."""
    if np.any(np.asarray(n) < 0):
        raise ValueError("step count must be nonnegative")
    q = config.contraction
    return config.r_v - (config.r_v - config.r_s) * np.power(q, n)


def trajectory(config: CoolingConfig, n_max: int) -> np.ndarray:
    """Ground populations for ``n = 0..n_max`` by iterating the one-step map."""
    out = np.empty(n_max + 1)
    r = config.r_s
    pt = config.effective_p_v
    for k in range(n_max + 1):
        out[k] = r
        r = pt * config.r_v + (1.0 - pt) * r
    return out


def cooling_rate(config: CoolingConfig, n, h: float | None = None):
    """Central-difference cooling rate at (real) step ``n`` with step ``h``."""
    h = config.h if h is None else h
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    q = config.contraction
    n = np.asarray(n, dtype=float)
    rate = (config.r_s - config.r_v) / h * (np.power(q, h) - 1.0) * np.power(q, n - h / 2.0)
    return rate[()]


def cooling_step_full_sim(
    system: ThermalQubit | float,
    z_v: float,
    p_v: float,
    dist: TickDistribution,
) -> float:
    """One cooling step simulated on the explicit two-qubit state.

    The system qubit and the virtual qubit (populations ``(1 +/- z_v)/2``) go
    through an ideal SWAP followed by the timing-dephasing channel of the SWAP
    generator; with weight ``1 - p_v`` the machine is outside the virtual
    subspace and the system is left alone. Returns the new ground population.
    """
    if abs(dist.mean - math.pi) > 1e-9 * math.pi:
        raise ValueError("SWAP timer must have mean pulse area pi")
    if not 0.0 < p_v <= 1.0:
        raise ValueError("p_v must lie in (0, 1]")
    if not -1.0 <= z_v <= 1.0:
        raise ValueError("z_v must lie in [-1, 1]")
    r_s = system.ground_population if isinstance(system, ThermalQubit) else float(system)
    rho_s = _populations(r_s)
    rho_v = _populations(0.5 * (1.0 + z_v))
    joint = np.kron(rho_s, rho_v)
    # SWAP generator has unit gap
    gamma = float(dist.dephasing_rate(1.0))
    swapped = apply_kraus(swap_dephasing_kraus(gamma), SWAP @ joint @ SWAP.conj().T)
    reduced = p_v * partial_trace(swapped, [2, 2], [0]) + (1.0 - p_v) * rho_s
    return float(reduced[0, 0].real)


def gaussian_swap_timer(accuracy: float) -> TickDistribution:
    return Gaussian.from_accuracy(math.pi, accuracy)


def swaps_to_target(config: CoolingConfig, r_target: float) -> int:
    """Fewest SWAP attempts bringing the ground population to at least ``r_target``."""
    if r_target >= config.r_v:
        raise ValueError("target at or beyond r_v is only reached asymptotically")
    if r_target <= config.r_s:
        return 0
    q = config.contraction
    if q == 0.0:
        return 1
    ratio = (config.r_v - r_target) / (config.r_v - config.r_s)
    n = max(0, math.ceil(math.log(ratio) / math.log(q)))
    # guard against rounding in the logarithms
    while n > 0 and ground_population_after_n(config, n - 1) >= r_target:
        n -= 1
    while ground_population_after_n(config, n) < r_target:
        n += 1
    return n


def rate_rows(config: CoolingConfig, sigmas, n_values):
    """Rows ``(sigma, n, rate)`` for a family of timers sharing ``config``."""
    rows = []
    for s in sigmas:
        cfg = config.replace(sigma=float(s))
        for n in n_values:
            rows.append((float(s), float(n), float(cooling_rate(cfg, n))))
    return rows
