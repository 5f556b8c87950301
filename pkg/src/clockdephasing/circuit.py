"""Layered CNOT circuits under independent per-gate timing noise.

Qubit 0 is the most significant bit of the computational-basis index.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .channels import cnot_dephasing_kraus
from .metrics import FidelityReport, haar_average_fidelity, required_accuracy, circuit_fidelity_bound
from .qcore import TOL

MAX_IDEAL_QUBITS = 10
MAX_SIM_QUBITS = 6

CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


@dataclass(frozen=True)
class CircuitSpec:
    n: int
    layers: tuple = field(default=())

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("n must be a positive integer")
        layers = []
        for t, layer in enumerate(self.layers):
            gates = []
            seen = set()
            for pair in layer:
                c, tg = (int(x) for x in pair)
                if not (0 <= c < self.n and 0 <= tg < self.n) or c == tg:
                    raise ValueError(f"layer {t}: invalid CNOT ({c}, {tg}) on {self.n} qubits")
                if c in seen or tg in seen:
                    raise ValueError(f"layer {t}: qubit reused within a layer")
                seen.update((c, tg))
                gates.append((c, tg))
            layers.append(tuple(gates))
        object.__setattr__(self, "layers", tuple(layers))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def layer_counts(self) -> list[int]:
        return [len(layer) for layer in self.layers]

    @property
    def total_cnots(self) -> int:
        return sum(self.layer_counts)

    def gates(self):
        for layer in self.layers:
            yield from layer

    def to_json(self) -> dict:
        return {"n": self.n, "layers": [[list(g) for g in layer] for layer in self.layers]}

    @classmethod
    def from_json(cls, data: dict) -> "CircuitSpec":
        try:
            return cls(int(data["n"]), tuple(tuple(tuple(g) for g in layer) for layer in data["layers"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed circuit spec: {exc}") from exc

    @classmethod
    def load(cls, path) -> "CircuitSpec":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class SimulationResult:
    rho_out: np.ndarray
    per_layer_trace_check: list


def random_circuit(n: int, n_layers: int, rng: np.random.Generator, max_per_layer=None) -> CircuitSpec:
    """Uniformly pick disjoint ordered qubit pairs for each layer."""
    cap = n // 2 if max_per_layer is None else min(max_per_layer, n // 2)
    layers = []
    for _ in range(n_layers):
        k = int(rng.integers(1, cap + 1))
        qubits = rng.permutation(n)[: 2 * k]
        layers.append(tuple((int(qubits[2 * i]), int(qubits[2 * i + 1])) for i in range(k)))
    return CircuitSpec(n, tuple(layers))


def embed_two_qubit(op, n: int, q0: int, q1: int) -> np.ndarray:
    """Lift a 4x4 operator acting on ``(q0, q1)`` to the full ``2**n`` space."""
    op = np.asarray(op, dtype=complex).reshape(2, 2, 2, 2)
    rest = [q for q in range(n) if q not in (q0, q1)]
    full = np.tensordot(op, np.eye(2 ** len(rest)).reshape([2] * (2 * len(rest))), axes=0)
    # axis order: out q0, out q1, in q0, in q1, out rest..., in rest...
    k = len(rest)
    out_axes = [0, 1] + [4 + i for i in range(k)]
    in_axes = [2, 3] + [4 + k + i for i in range(k)]
    order = [q0, q1] + rest
    perm = [None] * n
    for pos, q in enumerate(order):
        perm[q] = pos
    full = full.transpose([out_axes[p] for p in perm] + [in_axes[p] for p in perm])
    return full.reshape(2 ** n, 2 ** n)


def cnot_matrix(n: int, control: int, target: int) -> np.ndarray:
    return embed_two_qubit(CNOT, n, control, target)


def ideal_circuit_unitary(spec: CircuitSpec) -> np.ndarray:
    if spec.n > MAX_IDEAL_QUBITS:
        raise ValueError(f"ideal unitary limited to {MAX_IDEAL_QUBITS} qubits")
    u = np.eye(2 ** spec.n, dtype=complex)
    for c, t in spec.gates():
        u = cnot_matrix(spec.n, c, t) @ u
    return u


def gate_gamma(accuracy: float) -> float:
    """Per-gate dephasing for a Gaussian timer of mean pulse area pi."""
    if not accuracy > 0:
        raise ValueError("accuracy must be positive")
    return 0.0 if math.isinf(accuracy) else math.pi ** 2 / (2.0 * accuracy)


def noisy_gate_operators(n: int, control: int, target: int, accuracy: float):
    """Ideal CNOT and the embedded dephasing Kraus pair for one gate."""
    u = cnot_matrix(n, control, target)
    k1, k2 = cnot_dephasing_kraus(gate_gamma(accuracy))
    return u, (embed_two_qubit(k1, n, control, target), embed_two_qubit(k2, n, control, target))


def _noisy_layer(spec: CircuitSpec, layer, accuracy):
    return [noisy_gate_operators(spec.n, c, t, accuracy) for c, t in layer]


def _apply_gate(rho, u, kraus):
    rho = u @ rho @ u.conj().T
    return sum(k @ rho @ k.conj().T for k in kraus)


def _check_sim(spec: CircuitSpec, accuracy: float):
    if spec.n > MAX_SIM_QUBITS:
        raise ValueError(f"density-matrix simulation limited to {MAX_SIM_QUBITS} qubits")
    if not accuracy > 0:
        raise ValueError("accuracy must be positive")


def circuit_kraus_operators(spec: CircuitSpec, accuracy: float) -> list:
    """All ``2**L`` Kraus operators of the noisy circuit, ideal CNOTs included."""
    _check_sim(spec, accuracy)
    gates = [noisy_gate_operators(spec.n, c, t, accuracy) for c, t in spec.gates()]
    d = 2 ** spec.n
    ops = []
    for choice in itertools.product((0, 1), repeat=len(gates)):
        m = np.eye(d, dtype=complex)
        for (u, kraus), a in zip(gates, choice):
            m = kraus[a] @ u @ m
        ops.append(m)
    return ops


def circuit_channel(spec: CircuitSpec, accuracy: float):
    """Return a function applying the noisy circuit to (batches of) density matrices."""
    _check_sim(spec, accuracy)
    ops = [_noisy_layer(spec, layer, accuracy) for layer in spec.layers]

    def apply(rho):
        out = np.asarray(rho, dtype=complex)
        for layer in ops:
            for u, kraus in layer:
                out = _apply_gate(out, u, kraus)
        return out

    return apply


def simulate_noisy_circuit(spec: CircuitSpec, accuracy: float, rho_in) -> SimulationResult:
    _check_sim(spec, accuracy)
    rho = np.asarray(rho_in, dtype=complex)
    if rho.shape != (2 ** spec.n, 2 ** spec.n):
        raise ValueError(f"input state shape {rho.shape} does not match {spec.n} qubits")
    checks = []
    for layer in spec.layers:
        for u, kraus in _noisy_layer(spec, layer, accuracy):
            rho = _apply_gate(rho, u, kraus)
        tr = float(np.trace(rho).real)
        if abs(tr - 1.0) > TOL:
            raise RuntimeError(f"trace drifted to {tr}")
        checks.append(tr)
    return SimulationResult(rho, checks)


def empirical_average_fidelity(
    spec: CircuitSpec, accuracy: float, samples: int, rng: np.random.Generator
) -> FidelityReport:
    """Haar-averaged fidelity of the noisy circuit to its ideal unitary."""
    _check_sim(spec, accuracy)
    if samples < 100:
        raise ValueError("need at least 100 samples")
    if not spec.total_cnots:
        return FidelityReport(1.0, "haar_monte_carlo", 0.0)
    return haar_average_fidelity(
        circuit_channel(spec, accuracy),
        ideal_circuit_unitary(spec),
        2 ** spec.n,
        samples,
        rng,
        chunk=max(64, 2 ** 16 // 4 ** spec.n),
    )


def exact_average_fidelity(spec: CircuitSpec, accuracy: float) -> float:
    """Exact average gate fidelity from the trace of the superoperator of ``U^dag E``.

    Pushes all ``d^2`` matrix units through the circuit; small ``n`` only.
    """
    _check_sim(spec, accuracy)
    d = 2 ** spec.n
    u = ideal_circuit_unitary(spec)
    ch = circuit_channel(spec, accuracy)
    units = np.zeros((d * d, d, d), dtype=complex)
    units[np.arange(d * d), np.repeat(np.arange(d), d), np.tile(np.arange(d), d)] = 1.0
    out = u.conj().T @ ch(units) @ u
    # tr(S) = sum_ij <i|E(|i><j|)|j>
    tr_s = out[np.arange(d * d), np.repeat(np.arange(d), d), np.tile(np.arange(d), d)].sum()
    return float(((tr_s.real) + d) / (d * d + d))


def bound_check(report: FidelityReport, spec: CircuitSpec, accuracy: float, n_se: float = 3.0) -> dict:
    bound = circuit_fidelity_bound(spec.n, spec.total_cnots, accuracy)
    se = report.standard_error or 0.0
    return {
        "estimate": report.value,
        "standard_error": se,
        "bound": bound,
        "pass": bool(report.value <= bound + n_se * se + 1e-12),
    }


DEFAULT_LAYER_SIZES = (1, 5, 25, 100)


def bound_and_budget_curves(
    layer_sizes=DEFAULT_LAYER_SIZES,
    accuracies=(1e3, 1e4, 3.6e4, 1e5),
    max_cnots: int = 20000,
    threshold: float = 0.5,
    n: int = 20,
    cnot_step: int | None = None,
    depths=None,
):
    """Rows for the bound-vs-gate-count curves and the accuracy budget curves.

    Returns ``(bound_rows, budget_rows)`` with rows ``(L, N, bound)`` and
    ``(m, l_t, required_N)``. Depths too shallow for the threshold to be
    reachable at any accuracy are left out of the budget rows.
    """
    step = cnot_step or max(1, max_cnots // 200)
    bound_rows = [
        (L, float(acc), circuit_fidelity_bound(n, L, acc))
        for acc in accuracies
        for L in range(0, max_cnots + 1, step)
    ]
    if depths is None:
        depths = np.unique(np.round(np.logspace(0, 6, 25)).astype(int)).tolist()
    budget_rows = []
    for lt in layer_sizes:
        for m in depths:
            try:
                budget_rows.append((int(m), int(lt), required_accuracy(n, int(m) * int(lt), threshold)))
            except ValueError:
                # the bound never falls to the threshold with this few CNOTs
                continue
    return bound_rows, budget_rows
