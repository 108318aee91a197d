"""Acceptance criteria, one test each, at the stated tolerances.

Every test appends a ``[PASS]``/``[FAIL]`` line to ``ACCEPTANCE_LINES``;
conftest prints them in the terminal summary.
"""

import math

import numpy as np

from retroptics.classical import FieldState, back_propagate, propagate
from retroptics.density import count_distribution, dyad, mixture, partial_trace
from retroptics.fock import FockBasis, StateVector, fidelity, inner_product
from retroptics.harness.runner import run_scenario, sweep_values
from retroptics.harness.scenario import load_builtin
from retroptics.linopt import (
    Circuit,
    apply,
    invert,
    lift_to_dense,
    random_circuit,
    run_circuit,
    run_stages,
)
from retroptics.retrodict import (
    PENROSE_LABELS,
    DetectionRecord,
    JointState,
    couple_detectors,
    decouple_detectors,
    enumerate_histories,
    joint_fidelity,
    mixed_condition,
    odds_ratio,
    posterior,
)

from helpers import ACCEPTANCE_LINES, exact_fifty_fifty, penrose_amplitudes, penrose_circuit, random_state
from oracles import penrose_counts, penrose_psi2

PSI0 = StateVector.basis_state((1, 1, 0, 0))
SEED = 7


def check(number, summary, ok):
    line = f"[{'PASS' if ok else 'FAIL'}] AC{number} {summary}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def random_penrose(rng):
    return penrose_circuit(*rng.uniform(0.01, 0.99, 2), *rng.uniform(-math.pi, math.pi, 2))


def test_ac01_single_photon_even_split():
    report = run_scenario(load_builtin("single-photon"))
    probs = {h.label: h.probability for h in report.histories}
    err = max(abs(probs["D"] - 0.5), abs(probs["C"] - 0.5))
    check(1, f"single photon: P(D)={probs['D']:.12g} P(C)={probs['C']:.12g}, max err {err:.1e} <= 1e-12", err <= 1e-12)


def test_ac02_seven_history_structure():
    rng = np.random.default_rng(SEED)
    worst, counts = 0.0, set()
    for _ in range(20):
        circuit = random_penrose(rng)
        psi2 = run_circuit(circuit, PSI0)
        expected = penrose_psi2(*penrose_amplitudes(circuit))
        counts.add(len(psi2))
        for occ in set(expected) | set(psi2.amplitudes):
            worst = max(worst, abs(abs(psi2.amplitude(occ)) ** 2 - abs(expected.get(occ, 0)) ** 2))
    ok = counts == {7} and worst <= 1e-12
    check(2, f"two-photon output: history counts {sorted(counts)}, max |amp|^2 err {worst:.1e} over 20 sets", ok)


def test_ac03_hom_bunching():
    out = apply(exact_fifty_fifty(), StateVector.basis_state((1, 1)))
    coincidence = abs(out.amplitude((1, 1))) ** 2
    bunched = [abs(out.amplitude(o)) ** 2 for o in ((2, 0), (0, 2))]
    err = max(abs(p - 0.5) for p in bunched)
    ok = coincidence < 1e-24 and err <= 1e-12
    check(3, f"HOM: coincidence {coincidence:.1e} < 1e-24, bunched max err {err:.1e} <= 1e-12", ok)


def test_ac04_count_distribution():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(50):
        circuit = random_penrose(rng)
        sim = count_distribution(run_circuit(circuit, PSI0), 0)
        worst = max(worst, float(np.max(np.abs(sim - penrose_counts(*penrose_amplitudes(circuit))))))
    p0, p1, p2 = count_distribution(run_circuit(penrose_circuit(), PSI0), 0)
    # at the defaults every deviation from (1/2, 1/2, 0) is bounded by (|r_A|^2 + |t_B|^2)/2
    bound = (0.01 + 0.04) / 2
    near = abs(p0 - 0.5) <= bound and abs(p1 - 0.5) <= bound and p2 <= bound
    ok = worst <= 1e-12 and near
    check(
        4,
        f"counts at D1: closed-form max err {worst:.1e} <= 1e-12; defaults P0={p0:.4g} P1={p1:.4g} P2={p2:.4g} "
        f"within {bound} of (1/2, 1/2, 0)",
        ok,
    )


def test_ac05_minimal_information_posterior():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for circuit in [penrose_circuit()] + [random_penrose(rng) for _ in range(20)]:
        eps = odds_ratio(*penrose_amplitudes(circuit))
        post = posterior(enumerate_histories(run_circuit(circuit, PSI0), PENROSE_LABELS), DetectionRecord([1, None, None, None]))
        worst = max(worst, abs(post["c"] - 1 / (1 + eps)), abs(post["e"] - eps / (1 + eps)))
    eps = odds_ratio(*penrose_amplitudes(penrose_circuit()))
    w1 = run_scenario(load_builtin("penrose-fig3")).posterior["c"]
    ok = worst <= 1e-12 and abs(eps - 4.2088e-4) <= 5e-9 and abs(w1 - 0.99957930) <= 5e-9
    check(5, f"minimal-information posterior: max err {worst:.1e} <= 1e-12; eps={eps:.5g}, W1={w1:.8f}", ok)


def test_ac06_maximal_information_posterior():
    hist = enumerate_histories(run_circuit(penrose_circuit(), PSI0), PENROSE_LABELS)
    post = posterior(hist, DetectionRecord([1, 0, 0, 1]))
    ok = post.as_dict() == {"c": 1.0}
    check(6, f"maximal-information posterior: {post.as_dict()} is exactly {{c: 1}}", ok)


def test_ac07_partial_information_mixture():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for circuit in [penrose_circuit()] + [random_penrose(rng) for _ in range(10)]:
        t_a, r_a, t_b, r_b = penrose_amplitudes(circuit)
        psi1 = run_stages(circuit, PSI0)[2]
        got = mixed_condition(psi1, [DetectionRecord([None, None, 0, 1]), DetectionRecord([None, None, 1, 0])])
        eps = odds_ratio(t_a, r_a, t_b, r_b)
        w1 = 1 / (1 + eps)
        first = StateVector(2, {(1, 0): t_a * r_b / abs(t_a * r_b)})
        second = StateVector(2, {(0, 1): r_a * t_b / abs(r_a * t_b)})
        expected = mixture([(w1, first), (1 - w1, second)], got.basis)
        worst = max(worst, float(np.max(np.abs(got.matrix - expected.matrix))))
    check(7, f"partial-information mixture: max |rho - weighted conditioned dyads| {worst:.1e} <= 1e-12", worst <= 1e-12)


def test_ac08_reversibility():
    circuit = penrose_circuit()
    psi2 = run_circuit(circuit, PSI0)
    f_circuit = fidelity(run_circuit(invert(circuit), psi2), PSI0)
    ground = JointState.ground(psi2, range(4))
    f_detectors = joint_fidelity(decouple_detectors(couple_detectors(ground)), ground)
    ok = f_circuit >= 1 - 1e-12 and f_detectors >= 1 - 1e-12
    check(8, f"reversibility: inverse circuit fidelity {f_circuit:.16f}, detector round trip {f_detectors:.16f}", ok)


def test_ac09_classical_resolution():
    intensity = 1.0
    circuit = Circuit(2, (exact_fifty_fifty(),))
    forward = propagate(FieldState.from_intensities([intensity, 0]), circuit)
    complete = back_propagate(forward, circuit).intensities()
    incomplete = back_propagate(forward.keep([0]), circuit).intensities()
    err = max(
        float(np.max(np.abs(forward.intensities() - [0.5, 0.5]))),
        float(np.max(np.abs(complete - [1.0, 0.0]))),
        float(np.max(np.abs(incomplete - [0.25, 0.25]))),
    )
    check(
        9,
        f"classical: forward {forward.intensities().round(12).tolist()}, complete {complete.round(12).tolist()}, "
        f"incomplete {incomplete.round(12).tolist()}, max err {err:.1e}",
        err <= 1e-12,
    )


def test_ac10_oracle_equivalence():
    worst = 0.0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        modes = int(rng.integers(2, 5))
        photons = int(rng.integers(0, 3))
        circuit = random_circuit(modes, int(rng.integers(1, 7)), rng)
        basis = FockBasis(modes, photons)
        state = random_state(rng, modes, photons)
        dense = lift_to_dense(circuit, basis) @ state.to_dense(basis)
        worst = max(worst, float(np.max(np.abs(dense - run_circuit(circuit, state).to_dense(basis)))))
    check(10, f"sparse vs dense on 100 random circuits: max deviation {worst:.1e} < 1e-12", worst < 1e-12)


def test_ac11_invariant_suite():
    rng = np.random.default_rng(SEED)
    norm_err = trace_err = post_err = sym_err = 0.0
    conserved = True
    for _ in range(50):
        modes = int(rng.integers(2, 5))
        photons = int(rng.integers(1, 3))
        state = random_state(rng, modes, photons)
        out = run_circuit(random_circuit(modes, 5, rng), state)
        norm_err = max(norm_err, abs(out.norm() - 1))
        conserved &= out.photon_numbers() == {photons}

        keep = sorted(rng.choice(modes, size=int(rng.integers(1, modes + 1)), replace=False).tolist())
        trace_err = max(trace_err, abs(partial_trace(dyad(out), keep).trace() - 1))

        hist = enumerate_histories(out)
        pick = hist[int(rng.integers(len(hist)))].outcome
        record = DetectionRecord.from_observed(modes, {m: pick[m] for m in keep})
        post = posterior(hist, record)
        post_err = max(post_err, abs(post.total() - 1))

        other = random_state(rng, modes, photons)
        sym_err = max(sym_err, abs(abs(inner_product(out, other)) ** 2 - abs(inner_product(other, out)) ** 2))
    ok = norm_err < 1e-12 and conserved and trace_err < 1e-12 and post_err < 1e-12 and sym_err < 1e-14
    check(
        11,
        f"invariants: norm {norm_err:.1e}, photon number {'kept' if conserved else 'BROKEN'}, "
        f"partial-trace trace {trace_err:.1e}, posterior sum {post_err:.1e}, overlap symmetry {sym_err:.1e}",
        ok,
    )


def test_ac05_odds_ratio_sweep_and_limit():
    # W1 = 1/(1+eps) along the sweep grid, and the epsilon -> 0 limit
    results = sweep_values(load_builtin("penrose-fig3"), "epsilon", [1e-1, 1e-2, 1e-4, 1e-8])
    errs = [abs(r.posterior["c"] - 1 / (1 + eps)) for eps, r in results]
    limit = abs(results[-1][1].posterior["c"] - 1)
    ok = max(errs) <= 1e-12 and limit <= 1e-7
    check(5, f"epsilon sweep: max W1 err {max(errs):.1e}; |W1 - 1| at eps=1e-8 is {limit:.1e} <= 1e-7", ok)
