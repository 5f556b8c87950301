import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clockdephasing import circuit
from clockdephasing.channels import build_channel, cnot_generator
from clockdephasing.circuit import (
    CNOT,
    CircuitSpec,
    bound_check,
    circuit_kraus_operators,
    empirical_average_fidelity,
    exact_average_fidelity,
    bound_and_budget_curves,
    gate_gamma,
    ideal_circuit_unitary,
    random_circuit,
    simulate_noisy_circuit,
)
from clockdephasing.metrics import (
    average_gate_fidelity_from_kraus,
    cnot_fullspace_fidelity,
    required_accuracy,
    circuit_fidelity_bound,
)
from clockdephasing.qcore import is_density_matrix, ket, pure_density, trace_distance
from clockdephasing.ticks import Gaussian

from conftest import random_density


def kron_all(*ops):
    out = np.eye(1)
    for op in ops:
        out = np.kron(out, op)
    return out


def test_spec_validation():
    with pytest.raises(ValueError):
        CircuitSpec(3, (((0, 1), (1, 2)),))
    with pytest.raises(ValueError):
        CircuitSpec(2, (((0, 2),),))
    with pytest.raises(ValueError):
        CircuitSpec(2, (((1, 1),),))
    with pytest.raises(ValueError):
        CircuitSpec(0)
    spec = CircuitSpec(3, (((0, 1),), ((1, 2),), ((0, 1),)))
    assert spec.depth == 3 and spec.total_cnots == 3 and spec.layer_counts == [1, 1, 1]


def test_spec_json(tmp_path):
    spec = CircuitSpec(4, (((0, 1), (2, 3)), ((3, 0),)))
    p = tmp_path / "c.json"
    p.write_text(json.dumps(spec.to_json()))
    assert CircuitSpec.load(p) == spec
    with pytest.raises(ValueError):
        CircuitSpec.from_json({"layers": []})


def test_ideal_unitary_examples():
    assert np.array_equal(ideal_circuit_unitary(CircuitSpec(3)), np.eye(8))
    assert np.array_equal(ideal_circuit_unitary(CircuitSpec(2, (((0, 1),),))), CNOT)
    twice = CircuitSpec(2, (((0, 1),), ((0, 1),)))
    assert np.abs(ideal_circuit_unitary(twice) - np.eye(4)).max() == 0
    with pytest.raises(ValueError):
        ideal_circuit_unitary(CircuitSpec(11))


def test_embedding_against_kron():
    # CNOT with control 2 and target 0 on three qubits, built from projectors
    x = np.array([[0, 1], [1, 0]])
    p0, p1 = np.diag([1, 0]), np.diag([0, 1])
    expected = kron_all(np.eye(2), np.eye(2), p0) + kron_all(x, np.eye(2), p1)
    assert np.array_equal(circuit.cnot_matrix(3, 2, 0), expected)
    expected = kron_all(p0, np.eye(2), np.eye(2)) + kron_all(p1, np.eye(2), x)
    assert np.array_equal(circuit.cnot_matrix(3, 0, 2), expected)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), n=st.integers(2, 6), depth=st.integers(0, 6))
def test_ideal_is_unitary(seed, n, depth):
    spec = random_circuit(n, depth, np.random.default_rng(seed))
    u = ideal_circuit_unitary(spec)
    assert np.abs(u.conj().T @ u - np.eye(2 ** n)).max() < 1e-10
    # CNOT circuits are permutation matrices
    assert np.all(np.isin(u, [0, 1])) and np.all(u.sum(axis=0) == 1)


def test_random_circuit_shape(rng):
    spec = random_circuit(6, 50, rng)
    assert spec.depth == 50
    assert all(1 <= c <= 3 for c in spec.layer_counts)
    assert random_circuit(6, 10, rng, max_per_layer=1).layer_counts == [1] * 10


def test_gate_gamma():
    assert gate_gamma(math.pi ** 2 / 2) == pytest.approx(1.0)
    assert gate_gamma(math.inf) == 0.0
    with pytest.raises(ValueError):
        gate_gamma(0)


def test_perfect_clock_is_ideal(rng):
    spec = random_circuit(4, 6, rng)
    rho = random_density(16, rng)
    u = ideal_circuit_unitary(spec)
    out = simulate_noisy_circuit(spec, math.inf, rho).rho_out
    assert np.abs(out - u @ rho @ u.conj().T).max() < 1e-12


def test_untouched_block_passes_through():
    spec = CircuitSpec(2, (((0, 1),),))
    for bits in ("00", "01"):
        out = simulate_noisy_circuit(spec, 0.3, pure_density(ket(bits))).rho_out
        assert np.abs(out - pure_density(ket(bits))).max() < 1e-15


@pytest.mark.parametrize("acc", [0.3, 5.0, 1e4])
def test_basis_flip_partially_fails(acc):
    # |10> is an equal superposition of |1+> and |1->, so the flip is only
    # completed with probability (1 + exp(-Gamma)) / 2
    spec = CircuitSpec(2, (((0, 1),),))
    out = simulate_noisy_circuit(spec, acc, pure_density(ket("10"))).rho_out
    e = math.exp(-gate_gamma(acc))
    expected = np.diag([0, 0, (1 - e) / 2, (1 + e) / 2])
    assert np.abs(out - expected).max() < 1e-15
    ch = build_channel(cnot_generator(), Gaussian.from_accuracy(math.pi, acc))
    assert np.abs(out - ch(pure_density(ket("10")))).max() < 1e-12


def test_single_cnot_matches_channel_oracle():
    acc = math.pi ** 2 / 2
    psi = (ket("00") + ket("10")) / math.sqrt(2)
    out = simulate_noisy_circuit(CircuitSpec(2, (((0, 1),),)), acc, pure_density(psi)).rho_out
    ch = build_channel(cnot_generator(), Gaussian.from_accuracy(math.pi, acc))
    expected = ch(pure_density(psi))
    assert np.abs(out - expected).max() < 1e-12
    # |00><11| couples the untouched block to |1+> and |1->; only the |1-> half dephases
    assert abs(out[0, 3]) == pytest.approx(0.25 * (1 + math.exp(-1)), abs=1e-14)


def test_intra_layer_order_irrelevant(rng):
    a = CircuitSpec(6, (((0, 1), (2, 3), (4, 5)), ((5, 0), (1, 2))))
    b = CircuitSpec(6, (((4, 5), (0, 1), (2, 3)), ((1, 2), (5, 0))))
    rho = random_density(64, rng)
    ra = simulate_noisy_circuit(a, 7.0, rho).rho_out
    rb = simulate_noisy_circuit(b, 7.0, rho).rho_out
    assert trace_distance(ra, rb) < 1e-12


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), acc=st.floats(0.1, 1e4))
def test_simulation_output_valid(seed, acc):
    rng = np.random.default_rng(seed)
    spec = random_circuit(3, 4, rng)
    res = simulate_noisy_circuit(spec, acc, random_density(8, rng))
    assert is_density_matrix(res.rho_out)
    assert len(res.per_layer_trace_check) == 4
    assert all(abs(t - 1) < 1e-10 for t in res.per_layer_trace_check)


def test_simulation_limits(rng):
    with pytest.raises(ValueError):
        simulate_noisy_circuit(CircuitSpec(7), 1.0, np.eye(128) / 128)
    with pytest.raises(ValueError):
        simulate_noisy_circuit(CircuitSpec(2), 1.0, np.eye(8) / 8)
    with pytest.raises(ValueError):
        simulate_noisy_circuit(CircuitSpec(2), 0.0, np.eye(4) / 4)


def test_kraus_enumeration_matches_simulation(rng):
    spec = random_circuit(3, 3, rng)
    rho = random_density(8, rng)
    ops = circuit_kraus_operators(spec, 4.0)
    assert len(ops) == 2 ** spec.total_cnots
    out = sum(k @ rho @ k.conj().T for k in ops)
    assert np.abs(out - simulate_noisy_circuit(spec, 4.0, rho).rho_out).max() < 1e-13


@pytest.mark.parametrize("acc", [1.0, 10.0, 100.0])
def test_exact_fidelity_single_cnot(acc):
    spec = CircuitSpec(2, (((1, 0),),))
    assert exact_average_fidelity(spec, acc) == pytest.approx(cnot_fullspace_fidelity(gate_gamma(acc)), abs=1e-14)


def test_exact_fidelity_matches_kraus_trace(rng):
    spec = random_circuit(3, 4, rng)
    u = ideal_circuit_unitary(spec)
    noise = [u.conj().T @ k for k in circuit_kraus_operators(spec, 12.0)]
    ref = average_gate_fidelity_from_kraus(noise, 8).value
    assert exact_average_fidelity(spec, 12.0) == pytest.approx(ref, abs=1e-13)


def test_empirical_fidelity_empty():
    r = empirical_average_fidelity(CircuitSpec(3), 10.0, 100, np.random.default_rng(0))
    assert r.value == 1.0 and r.standard_error == 0.0


def test_empirical_fidelity_needs_samples(rng):
    with pytest.raises(ValueError):
        empirical_average_fidelity(CircuitSpec(2, (((0, 1),),)), 10.0, 99, rng)


@pytest.mark.parametrize("n,depth,acc", [(2, 1, 10.0), (4, 8, 50.0), (3, 5, 3.0)])
def test_empirical_fidelity_tracks_exact(n, depth, acc, rng):
    spec = random_circuit(n, depth, rng) if depth > 1 else CircuitSpec(2, (((0, 1),),))
    r = empirical_average_fidelity(spec, acc, 10_000, rng)
    assert abs(r.value - exact_average_fidelity(spec, acc)) < 3 * r.standard_error


def test_single_cnot_exact_fidelity_exceeds_circuit_bound():
    # characterization: the closed-form fidelity of one ill-timed CNOT on two qubits
    # is above the weight-purity bound, so bound dominance does not hold here
    acc = 10.0
    exact = exact_average_fidelity(CircuitSpec(2, (((0, 1),),)), acc)
    assert exact == pytest.approx(0.8831489, abs=1e-6)
    assert circuit_fidelity_bound(2, 1, acc) == pytest.approx(0.8627716, abs=1e-6)
    assert exact > circuit_fidelity_bound(2, 1, acc)


def test_bound_check_report(rng):
    spec = CircuitSpec(2, (((0, 1),),))
    r = empirical_average_fidelity(spec, 1e6, 200, rng)
    out = bound_check(r, spec, 1e6)
    assert set(out) == {"estimate", "standard_error", "bound", "pass"}
    assert out["bound"] == circuit_fidelity_bound(2, 1, 1e6)
    assert out["pass"] == (out["estimate"] <= out["bound"] + 3 * out["standard_error"] + 1e-12)


def test_bound_and_budget_curves():
    bound_rows, budget_rows = bound_and_budget_curves(
        layer_sizes=(1, 4), accuracies=(1e3, 1e4), max_cnots=1000, cnot_step=100, depths=[100, 400, 10_000]
    )
    assert {r[0] for r in bound_rows if r[2] == 1.0} == {0}
    for acc in (1e3, 1e4):
        rows = [r for r in bound_rows if r[1] == acc]
        assert rows[0][2] == 1.0
        assert all(a[2] > b[2] for a, b in zip(rows, rows[1:]))
    table = {(m, lt): n for m, lt, n in budget_rows}
    assert table[(10_000, 1)] == pytest.approx(required_accuracy(20, 10_000))
    assert 3.4e4 < table[(10_000, 1)] < 3.7e4
    # N depends on L = m * l_t only
    assert table[(100, 4)] == pytest.approx(table[(400, 1)], rel=1e-12)
    assert table[(400, 4)] / table[(100, 4)] == pytest.approx(table[(400, 4)] / table[(400, 1)], rel=1e-12)


def test_single_cnot_bound_crossover():
    # the closed-form fidelity exceeds the ceiling below gamma ~ 1.19 and not above it
    assert exact_average_fidelity(CircuitSpec(2, (((0, 1),),)), 4.2) > circuit_fidelity_bound(2, 1, 4.2)
    assert exact_average_fidelity(CircuitSpec(2, (((0, 1),),)), 4.1) < circuit_fidelity_bound(2, 1, 4.1)


def test_budget_curves_skip_unreachable_depths():
    _, budget_rows = bound_and_budget_curves(layer_sizes=(1,), accuracies=(), depths=[1, 2, 10])
    # one or two CNOTs cannot pull the 20-qubit ceiling down to 0.5
    assert [r[0] for r in budget_rows] == [10]
