# src/services/verification_suite.py
"""
Acceptance checks for the whole toolkit, grouped into named suites.

Each check returns a CheckResult; `run_suite("all")` is what `cli_lattice.py
check` executes, and any failing check makes the CLI exit with status 1.
"""
import time
from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from src.services.chm import (builtin_pair, check_hadamard, dephase, f4_family,
                              fourier, hadamard_equivalent, kicked_potts_integrable,
                              named_hadamard, sinkhorn_symmetric)
from src.services.entanglement import (RainbowSpec, growth_check, initial_state,
                                       predicted_rainbow, rainbow_pairs,
                                       rainbow_protocol, reduced_density_sites,
                                       schmidt_spectrum)
from src.services.integrability import (charge_report, glider,
                                        glider_translation_check,
                                        parafermion_matrix, reference_q6_matrix,
                                        soliton_swap_check, ybe_check, ybe_gate,
                                        ybe_scan)
from src.services.statevector import (CircuitSpec, apply_floquet,
                                      conjugate_pauli, equal_up_to_phase,
                                      fidelity, floquet, product_state)
from src.services.symplectic_ca import (AutomatonClass, CaConfig, evolve,
                                        glider_solutions, light_cone_radius,
                                        product_state_step, recurrence_time,
                                        seed_row, single_x_wedge, step)
from src.services.weyl import (SymplecticString, cat_realisation,
                               string_matrix, x_matrix, z_matrix)
from src.utils.errors import ConvergenceError, NumericalError
from src.utils.logger import setup_logger

logger = setup_logger("verification_suite")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0


def _timed(name: str, body: Callable[[], tuple]) -> CheckResult:
    start_time = time.time()
    try:
        passed, detail = body()
    except Exception as e:
        logger.error(f"Check {name} failed: {str(e)}")
        passed, detail = False, f"{type(e).__name__}: {e}"
    elapsed = round(time.time() - start_time, 2)
    level = logger.info if passed else logger.warning
    level(f"{'PASS' if passed else 'FAIL'} {name} ({elapsed}s): {detail}")
    return CheckResult(name=name, passed=bool(passed), detail=detail, elapsed=elapsed)


def check_hadamard_identities() -> CheckResult:
    def body():
        matrices = {f"F{q}": fourier(q) for q in range(2, 9)}
        matrices.update({"K2": named_hadamard("K2"), "K3": named_hadamard("K3"),
                         "F2xF2": named_hadamard("F2xF2")})
        for a in np.linspace(0, 2 * np.pi, 10, endpoint=False):
            matrices[f"F4(a={a:.3f})"] = f4_family(a)
        bad = [name for name, M in matrices.items() if not check_hadamard(M, 1e-12).is_hadamard]
        dephase_ok = (np.max(np.abs(dephase(named_hadamard("K2")) - fourier(2))) < 1e-12
                      and np.max(np.abs(dephase(named_hadamard("K3")) - fourier(3))) < 1e-12)
        if bad:
            return False, f"not Hadamard: {', '.join(bad)}"
        return dephase_ok, f"{len(matrices)} matrices, dephase(K2)=F2 and dephase(K3)=F3: {dephase_ok}"
    return _timed("hadamard_identities", body)


def _ca_unitary(config: CaConfig) -> np.ndarray:
    F = fourier(config.q)
    u_H = F if config.horizontal == "F" else F.conj().T
    u_V = cat_realisation(config.q, config.alpha, config.delta)
    return floquet(CircuitSpec(config.q, config.N, u_H, u_V))


def check_ca_oracle(seeds: int = 50) -> CheckResult:
    def body():
        compared = 0
        for q in (2, 3):
            # odd shears at odd q are not Clifford; draw even parameters there
            params = range(q) if q == 2 else (0, 2)
            for N in (4, 5):
                unitaries = {}
                for seed in range(seeds):
                    rng = np.random.default_rng(seed)
                    alpha, delta = (int(v) for v in rng.choice(list(params), 2))
                    variant = str(rng.choice(["F", "Fdagger"]))
                    config = CaConfig(q, N, alpha, delta, variant)
                    key = (alpha, delta, variant)
                    if key not in unitaries:
                        unitaries[key] = _ca_unitary(config)
                    U = unitaries[key]
                    s = SymplecticString(q, rng.integers(0, q, N), rng.integers(0, q, N))
                    T = int(rng.integers(1, 4))
                    grid = evolve(config, s.A, s.B, T)
                    current = s
                    for t in range(1, T + 1):
                        current, _ = conjugate_pauli(U, current)
                        compared += 1
                        if current != grid.string_at(t):
                            return False, (f"mismatch q={q} N={N} seed={seed} t={t}: "
                                           f"{current} vs {grid.string_at(t)}")
        return True, f"{compared} exponent rows match exact conjugation"
    return _timed("ca_statevector_oracle", body)


def check_classification() -> CheckResult:
    def body():
        gliders_checked = 0
        for q in (2, 3):
            for alpha in range(q):
                delta = (-alpha) % q
                for N in (4, 6):
                    for variant in ("Fdagger", "F"):
                        config = CaConfig(q, N, alpha, delta, variant)
                        if config.automaton_class is not AutomatonClass.GLIDER:
                            return False, f"{config} misclassified"
                        gens = glider_solutions(config, 0)
                        for direction, shift in (("right", 1), ("left", -1)):
                            for s in gens[direction][1:]:
                                expected = s.shift(shift)
                                if variant == "F":
                                    expected = expected.power(-1)
                                A, B = step(config, s.A, s.B)
                                if SymplecticString(q, A, B) != expected:
                                    return False, f"{direction} glider not translated for {config}"
                                if recurrence_time(config, s.A, s.B) != N:
                                    return False, f"recurrence != N for {config}"
                                gliders_checked += 1

        T = 6
        for q, alpha, delta in ((2, 1, 0), (3, 1, 0), (3, 2, 0)):
            config = CaConfig(q, 2 * T + 1, alpha, delta)
            if config.automaton_class is not AutomatonClass.FRACTAL:
                return False, f"{config} misclassified"
            grid = evolve(config, *seed_row(config), T)
            radius = light_cone_radius(grid, config.N // 2)
            if not np.array_equal(radius, np.arange(T + 1)):
                return False, f"light cone not filled for {config}: {radius.tolist()}"
            if grid == single_x_wedge(q, T):
                return False, f"fractal configuration {config} matched the glider wedge"
        return True, f"{gliders_checked} glider generators translate; fractal seeds fill the cone"
    return _timed("fractal_glider_classification", body)


def check_wedge() -> CheckResult:
    def body():
        T, N = 12, 32
        for q in (2, 3, 5):
            config = CaConfig(q, N, 0, 0, "Fdagger")
            grid = evolve(config, *seed_row(config, "X", N // 2), T)
            if not grid == single_x_wedge(q, T, N):
                return False, f"wedge mismatch at q={q}"
        return True, "evolve equals the closed form for q=2,3,5"
    return _timed("checkerboard_wedge", body)


def check_entanglement_growth() -> CheckResult:
    def body():
        q, N, T = 2, 8, 3
        errors = {}
        for initial, weights in (("Zprod", None), ("Xprod", None),
                                 ("weighted", [np.sqrt(0.9), np.sqrt(0.1)])):
            profile = growth_check(q, N, T, initial, weights)
            errors[initial] = profile.max_error()
        if max(errors.values()) > 1e-8:
            return False, f"max errors {errors}"

        F = fourier(q)
        spec = CircuitSpec(q, N, F, F, boundary="open")
        for initial in ("Zprod", "Xprod"):
            state = apply_floquet(spec, initial_state(q, N, initial), T)
            p = schmidt_spectrum(state, N // 2)
            p = p[p > 1e-12]
            if np.max(np.abs(p - p[0])) > 1e-8:
                return False, f"{initial} Schmidt spectrum is not flat"
        return True, "closed forms hold; " + ", ".join(f"{k} {v:.1e}" for k, v in errors.items())
    return _timed("entanglement_growth", body)


def check_rainbow() -> CheckResult:
    def body():
        cases = [(2, 2, fourier(2)), (2, 3, fourier(2)),
                 (3, 2, kicked_potts_integrable(1)[0]), (4, 2, f4_family(0.3))]
        worst = 1.0
        for q, N, u_H in cases:
            spec = RainbowSpec(q, N, u_H)
            final = rainbow_protocol(spec)
            value = fidelity(predicted_rainbow(spec), final)
            worst = min(worst, value)
            if value < 1 - 1e-8:
                return False, f"fidelity {value:.10f} at q={q} N={N}"
            for left, right in rainbow_pairs(N):
                for site in (left, right):
                    rho = reduced_density_sites(final, [site])
                    if np.max(np.abs(rho - np.eye(q) / q)) > 1e-8:
                        return False, f"site {site} not maximally mixed at q={q} N={N}"
        return True, f"{len(cases)} protocols, worst fidelity {worst:.12f}"
    return _timed("rainbow_protocol", body)


def check_solitons_and_gliders() -> CheckResult:
    def body():
        names = ["f2", "f3", "f4", "f5", "f6", "k2", "k3", "f2xf2", "f4a:0.3", "cat:3:2:2"]
        for name in names:
            u_H, _ = builtin_pair(name)
            if not soliton_swap_check(u_H, u_H.conj().T):
                return False, f"soliton swap fails for {name}"
        u_H, u_V = kicked_potts_integrable(1)
        if not soliton_swap_check(u_H, u_V):
            return False, "soliton swap fails for the kicked Potts pair"

        spec = CircuitSpec(3, 4, u_H, u_V)
        for direction in ("plus", "minus"):
            g = glider(u_H, direction, 1)
            if not glider_translation_check(spec, g):
                return False, f"{direction} glider does not translate"
            if np.max(np.abs(g.matrix @ g.matrix - 3 * g.matrix)) > 1e-9:
                return False, f"{direction} glider violates G^2 = qG"

        q = 3
        Z, X = z_matrix(q), x_matrix(q)
        expected = sum(np.kron(np.linalg.matrix_power(Z, n), np.linalg.matrix_power(X.conj().T, n))
                       for n in range(q))
        decomposition = np.max(np.abs(glider(fourier(q).conj().T).matrix - expected))
        if decomposition > 1e-10:
            return False, f"Fourier decomposition off by {decomposition:.2e}"
        return True, f"{len(names) + 1} pairs swap, gliders translate, decomposition {decomposition:.1e}"
    return _timed("solitons_and_gliders", body)


def check_conserved_charges() -> CheckResult:
    def body():
        u_H, u_V = kicked_potts_integrable(1)
        rows = charge_report(CircuitSpec(3, 5, u_H, u_V), kmax=2)
        worst = max(r['commutator'] for r in rows)
        return worst < 1e-8, f"{len(rows)} charges, max commutator {worst:.2e}"
    return _timed("conserved_charges", body)


def check_yang_baxter(jobs: int = 1) -> CheckResult:
    def body():
        gates = {f"F{q}": fourier(q) for q in (2, 3, 5)}
        for a in np.linspace(0.2, 1.4, 5):
            gates[f"F4(a={a:.2f})"] = f4_family(a)
        for name, u in gates.items():
            passed, residual = ybe_check(ybe_gate(u))
            if not passed:
                return False, f"{name} fails with residual {residual:.2e}"

        for q in (2, 3, 4, 5):
            rows = ybe_scan(q, range(10), jobs=jobs)
            converged = [r for r in rows if r['status'] == 'success']
            if len(converged) < len(rows) or not all(r['pass'] for r in converged):
                return False, f"q={q}: {sum(r['pass'] for r in converged)}/{len(converged)} converged seeds pass"

        _, residual = ybe_check(ybe_gate(reference_q6_matrix()))
        if residual <= 1e-2:
            return False, f"reference q=6 matrix braids (residual {residual:.2e})"
        rows = [r for r in ybe_scan(6, range(20), jobs=jobs) if r['status'] == 'success']
        failures = [r for r in rows if r['residual'] > 1e-2]
        if not failures:
            return False, "every q=6 seed satisfied the braid relation"
        return True, (f"q<6 gates braid; reference q=6 residual {residual:.2e}; "
                      f"q=6 failure rate {len(failures)}/{len(rows)}")
    return _timed("yang_baxter", body)


def check_sinkhorn(seeds: int = 20) -> CheckResult:
    def body():
        summary = []
        for q in range(2, 8):
            converged = 0
            for seed in range(seeds):
                try:
                    M = sinkhorn_symmetric(q, seed=seed)
                except (ConvergenceError, NumericalError):
                    continue
                report = check_hadamard(M, 1e-8)
                if not (report.is_hadamard and report.is_symmetric):
                    return False, f"q={q} seed={seed} output is not a symmetric CHM"
                if q == 2 and not hadamard_equivalent(M, fourier(2)):
                    return False, f"q=2 seed={seed} not equivalent to F2"
                converged += 1
            summary.append(f"q={q}: {converged}/{seeds}")
            if converged < seeds:
                return False, "; ".join(summary)
        return True, "; ".join(summary)
    return _timed("sinkhorn_generator", body)


def check_product_state_ca() -> CheckResult:
    def body():
        q, N = 3, 4
        F = fourier(q)
        spec = CircuitSpec(q, N, F, F)
        checked = 0
        for z_parity in (0, 1):
            bases = ["Z" if x % 2 == z_parity else "X" for x in range(N)]
            for flat in range(q ** N):
                labels = np.array(np.unravel_index(flat, (q,) * N))
                evolved = apply_floquet(spec, product_state(q, labels, bases), 1)
                new_labels, new_parity = product_state_step(q, labels, z_parity)
                new_bases = ["Z" if x % 2 == new_parity else "X" for x in range(N)]
                target = product_state(q, new_labels, new_bases)
                if not equal_up_to_phase(evolved.amplitudes, target.amplitudes, 1e-10):
                    return False, f"labels {labels.tolist()} parity {z_parity} mismatch"
                checked += 1
        return True, f"{checked} alternating product states map exactly"
    return _timed("product_state_ca", body)


def check_parafermions() -> CheckResult:
    def body():
        q, N = 3, 3
        omega = np.exp(2j * np.pi / q)
        psi = {(f, j): parafermion_matrix(q, N, j, f) for f in ("X", "Z") for j in range(N)}

        def expected_exponent(f1, j, f2, k):
            if f1 == f2 == "X":
                return int(np.sign(j - k))
            if f1 == f2 == "Z":
                return int(np.sign(k - j))
            return -1 if f1 == "X" else 1

        worst = 0.0
        for (f1, j), P1 in psi.items():
            for (f2, k), P2 in psi.items():
                if (f1, j) == (f2, k):
                    continue
                m = expected_exponent(f1, j, f2, k)
                worst = max(worst, float(np.max(np.abs(P1 @ P2 - omega ** m * P2 @ P1))))
            worst = max(worst, float(np.max(np.abs(np.linalg.matrix_power(P1, q) - np.eye(q ** N)))))

        for j in range(N - 1):
            local = SymplecticString.single_site(q, N, j, 0, -1).compose(
                SymplecticString.single_site(q, N, j + 1, 1, 0))
            bond = np.linalg.inv(psi[("Z", j)]) @ psi[("Z", j + 1)]
            worst = max(worst, float(np.max(np.abs(bond - string_matrix(local)))))
        return worst < 1e-10, f"max relation residual {worst:.2e}"
    return _timed("parafermion_algebra", body)


SUITES: Dict[str, List[Callable[[], CheckResult]]] = {
    "chm": [check_hadamard_identities, check_sinkhorn],
    "ca": [check_ca_oracle, check_classification, check_wedge, check_product_state_ca],
    "entanglement": [check_entanglement_growth, check_rainbow],
    "integrability": [check_solitons_and_gliders, check_conserved_charges,
                      check_yang_baxter, check_parafermions],
}
SUITES["all"] = [check_hadamard_identities, check_ca_oracle, check_classification,
                 check_wedge, check_entanglement_growth, check_rainbow,
                 check_solitons_and_gliders, check_conserved_charges,
                 check_yang_baxter, check_sinkhorn, check_product_state_ca,
                 check_parafermions]


PARALLEL_CHECKS = {check_yang_baxter}


def run_suite(name: str = "all", jobs: int = 1) -> List[CheckResult]:
    """Run every check of a suite in order and log a summary; jobs feeds the seed scans."""
    if name not in SUITES:
        raise ValueError(f"❌ Unknown suite '{name}'\n✅ Supported: {', '.join(SUITES)}")
    start_time = time.time()
    results = [check(jobs=jobs) if check in PARALLEL_CHECKS else check()
               for check in SUITES[name]]
    passed = sum(r.passed for r in results)
    logger.info(f"Suite {name}: {passed}/{len(results)} passed in {time.time() - start_time:.2f}s")
    return results
