"""Oracle comparisons run by ``clockdephasing validate``.

Each suite returns a list of check records ``{"name", "value", "limit", "pass"}``
where ``value <= limit`` is required. Everything is driven by one seed, so a
report is a deterministic function of ``(suite, seed, mc_samples)``.
"""
from __future__ import annotations

import math

import numpy as np

from . import channels, circuit, cooling, metrics, qcore, ticks

SUITES = ("channels", "fidelity", "unitarity", "cooling")


def _check(name, value, limit):
    value = float(value)
    return {"name": name, "value": value, "limit": float(limit), "pass": bool(value <= limit)}


def random_hermitian(d: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * 0.5 * (a + a.conj().T)


def random_density_matrix(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def channels_suite(rng, mc_samples=200_000):
    out = []
    for case in range(6):
        d = 2 if case % 2 == 0 else 4
        h = qcore.hermitian_eigendecomposition(random_hermitian(d, rng))
        dist = ticks.Gaussian(float(rng.uniform(0.5, 3.0)), float(rng.uniform(0.1, 1.0)))
        rho = random_density_matrix(d, rng)
        exact = channels.apply_channel(channels.build_channel(h, dist), rho)
        mc = channels.monte_carlo_average(h, dist, rho, mc_samples, rng)
        out.append(_check(f"mc_vs_filter_case{case}_d{d}", qcore.trace_distance(exact, mc), 0.01))

    gammas = (0.1, 0.5, 1.0, 2.0)
    for gate, gen, kraus_fn in (
        ("qubit", channels.qubit_generator(1.0), channels.qubit_dephasing_kraus),
        ("cnot", channels.cnot_generator(), channels.cnot_dephasing_kraus),
        ("swap", channels.swap_generator(), channels.swap_dephasing_kraus),
    ):
        worst = 0.0
        d = gen.shape[0]
        for g in gammas:
            ch = channels.build_channel(gen, ticks.Gaussian(math.pi, math.sqrt(2 * g)))
            rho = random_density_matrix(d, rng)
            worst = max(
                worst,
                np.abs(ch.noise_only(rho) - channels.apply_kraus(kraus_fn(g), rho)).max(),
            )
            if not channels.is_cptp(ch, d):
                worst = math.inf
        out.append(_check(f"kraus_vs_filter_{gate}", worst, 1e-12))

    # at a revival every comb atom enacts the same unitary: no decoherence
    for n in (2, 3, 5):
        comb = ticks.Comb(n, 1.0 / (2 * math.pi * n))
        h = qcore.hermitian_eigendecomposition(channels.cnot_generator())
        rho = random_density_matrix(4, rng)
        atom = qcore.evolve_unitary(rho, h, comb.atoms()[1])
        dev = np.abs(channels.build_channel(h, comb)(rho) - atom).max()
        out.append(_check(f"comb_revival_unitary_n{n}", dev, 1e-12))
    return out


def fidelity_suite(rng, haar_samples=10_000):
    out = []
    worst = 0.0
    for theta in np.linspace(0.1, 2 * math.pi, 10):
        for acc in (0.5, 3.0, 10.0, 100.0, 1e4):
            closed = metrics.single_gate_fidelity(theta, acc)
            kraus = channels.qubit_dephasing_kraus(metrics.gamma_from_pulse(theta, acc))
            worst = max(worst, abs(closed - metrics.average_gate_fidelity_from_kraus(kraus, 2).value))
    out.append(_check("single_gate_closed_vs_kraus", worst, 1e-14))

    worst = 0.0
    for g in (0.0, 0.1, 1.0, 10.0):
        kr = metrics.average_gate_fidelity_from_kraus(channels.cnot_dephasing_kraus(g), 4).value
        worst = max(worst, abs(metrics.cnot_fullspace_fidelity(g) - kr))
    out.append(_check("cnot_full_closed_vs_kraus", worst, 1e-14))

    for g in (0.1, 0.5, 1.0, 2.0):
        for name, d, kraus, closed in (
            ("qubit", 2, channels.qubit_dephasing_kraus(g), (2 + math.exp(-g)) / 3),
            ("cnot", 4, channels.cnot_dephasing_kraus(g), metrics.cnot_fullspace_fidelity(g)),
        ):
            est = metrics.haar_average_fidelity(
                lambda r, k=kraus: channels.apply_kraus(k, r), None, d, haar_samples, rng
            )
            out.append(
                _check(f"haar_{name}_gamma{g}_in_se", abs(est.value - closed) / est.standard_error, 3.0)
            )
    return out


def unitarity_suite(rng):
    out = []
    worst = 0.0
    for acc in (5.0, 50.0, 500.0):
        for L in range(0, 7):
            spec = circuit.random_circuit(4, L, rng, max_per_layer=1)
            brute = metrics.kraus_weight_purity(circuit.circuit_kraus_operators(spec, acc), 2 ** spec.n)
            worst = max(worst, abs(brute - metrics.circuit_unitarity_gamma(L, acc)))
    out.append(_check("weight_purity_brute_vs_closed", worst, 1e-12))

    worst = 0.0
    for acc in (5.0, 50.0, 500.0):
        one = metrics.circuit_unitarity_gamma(1, acc)
        for L in range(7):
            worst = max(worst, abs(metrics.circuit_unitarity_gamma(L, acc) - one ** L))
    out.append(_check("weight_purity_multiplicative", worst, 1e-12))
    return out


def cooling_suite(rng):
    out = []
    worst = 0.0
    for _ in range(100):
        r_s = float(rng.uniform(0.5, 0.95))
        r_v = float(rng.uniform(r_s, 1.0))
        p_v = float(rng.uniform(0.01, 0.99))
        sigma = float(rng.uniform(0.0, 5.0))
        cfg = cooling.CoolingConfig(r_s, r_v, p_v, sigma=sigma)
        sim = cooling.cooling_step_full_sim(r_s, 2 * r_v - 1, p_v, ticks.Gaussian(math.pi, sigma))
        worst = max(worst, abs(sim - cooling.ground_population_after_n(cfg, 1)))
    out.append(_check("one_step_full_sim_vs_recurrence", worst, 1e-12))

    worst = 0.0
    for _ in range(20):
        r_s = float(rng.uniform(0.0, 0.9))
        r_v = float(rng.uniform(r_s + 0.05, 1.0))
        cfg = cooling.CoolingConfig(r_s, r_v, float(rng.uniform(0.05, 0.5)), sigma=float(rng.uniform(0, 4)))
        n = math.ceil(math.log(1e-6 / (r_v - r_s)) / math.log(cfg.contraction))
        worst = max(worst, abs(cooling.ground_population_after_n(cfg, n) - r_v) / 1e-6)
    out.append(_check("convergence_within_1e-6", worst, 1.0))

    out.append(_check("p_perfect_timer", abs(cooling.swap_error_probability(math.inf)), 0.0))
    out.append(_check("p_infinite_sigma", abs(cooling.error_probability_from_sigma(math.inf) - 0.5), 0.0))
    out.append(_check("p_vanishing_accuracy", abs(cooling.swap_error_probability(1e-12) - 0.5), 0.0))
    return out


def run(suite: str = "all", seed: int = 0, mc_samples: int = 200_000) -> dict:
    names = SUITES if suite == "all" else (suite,)
    if any(n not in SUITES for n in names):
        raise ValueError(f"unknown suite {suite!r}")
    streams = np.random.SeedSequence(seed).spawn(len(SUITES))
    rngs = {n: np.random.default_rng(s) for n, s in zip(SUITES, streams)}
    report = {"seed": seed, "suites": {}}
    for name in names:
        if name == "channels":
            checks = channels_suite(rngs[name], mc_samples)
        else:
            checks = globals()[f"{name}_suite"](rngs[name])
        report["suites"][name] = {"checks": checks, "pass": all(c["pass"] for c in checks)}
    report["pass"] = all(s["pass"] for s in report["suites"].values())
    return report
