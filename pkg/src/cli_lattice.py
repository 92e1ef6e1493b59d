#!/usr/bin/env python3
"""
Command-line front end for the Hadamard lattice toolkit.

Sub-commands: fractal, rainbow, ybe-scan, entropy, charges, check.
Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource error.
"""
import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import argparse
from pathlib import Path

from tabulate import tabulate

from src.services.artifact_io import ArtifactWriter, resolve_pair
from src.services.entanglement import RainbowSpec, growth_check, rainbow_report
from src.services.integrability import charge_report, ybe_scan
from src.services.statevector import CircuitSpec
from src.services.symplectic_ca import CaConfig, evolve, seed_row
from src.services.verification_suite import SUITES, run_suite
from src.utils.errors import ConfigError, LatticeError, ResourceError
from src.utils.lattice_config import build_run_config, get_output_directory
from src.utils.logger import set_log_level, setup_logger

logger = setup_logger("cli_lattice")

EXIT_OK, EXIT_FAILURE, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="key=value config file; flags override its values")
    parser.add_argument("--log-level", dest="log_level",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging level")
    parser.add_argument("--jobs", type=int, help="Parallel workers for seed scans")
    parser.add_argument("--seed", type=int, help="First seed for random constructions")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Space-time dual Hadamard lattice toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    fractal = sub.add_parser("fractal", help="Evolve a single-site seed with the Clifford automaton")
    fractal.add_argument("--q", type=int, help="Local dimension (default 2)")
    fractal.add_argument("--alpha", type=int, help="Cat parameter alpha (default 1)")
    fractal.add_argument("--delta", type=int, help="Cat parameter delta (default 0)")
    fractal.add_argument("--variant", choices=["F", "Fdagger"], help="Horizontal coupling (default Fdagger)")
    fractal.add_argument("--steps", type=int, help="Number of Floquet steps (default 32)")
    fractal.add_argument("--width", type=int, help="Ring size N (default 2*steps+1)")
    fractal.add_argument("--seed-kind", dest="seed_kind", choices=["X", "Z"], help="Seed operator (default X)")
    fractal.add_argument("--grid", choices=["b", "a", "both"], help="Which exponent grid to write (default b)")
    fractal.add_argument("--out", help="Output path (default outputs/fractals/...)")
    fractal.add_argument("--format", choices=["csv", "pgm", "text"], help="Force output format")
    _add_common(fractal)

    rainbow = sub.add_parser("rainbow", help="Run the rainbow-state protocol")
    rainbow.add_argument("--q", type=int, help="Local dimension (default 2)")
    rainbow.add_argument("--n", type=int, help="Half-chain length (default 2)")
    rainbow.add_argument("--uh", help="builtin:<name> or matrix file (default builtin:f<q>)")
    rainbow.add_argument("--report", action="store_true", default=None, help="Print per-pair fidelities")
    _add_common(rainbow)

    ybe = sub.add_parser("ybe-scan", help="Yang-Baxter scan over Sinkhorn-generated Hadamards")
    ybe.add_argument("--q", type=int, help="Local dimension (default 4)")
    ybe.add_argument("--seeds", type=int, help="Number of seeds (default 10)")
    ybe.add_argument("--tol", type=float, help="Residual tolerance (default 1e-8)")
    ybe.add_argument("--max-iter", dest="max_iter", type=int, help="Sinkhorn iteration cap")
    ybe.add_argument("--out", help="CSV path (default outputs/reports/ybe_q<q>.csv)")
    _add_common(ybe)

    entropy = sub.add_parser("entropy", help="Half-chain entanglement growth")
    entropy.add_argument("--q", type=int, help="Local dimension (default 2)")
    entropy.add_argument("--n", type=int, help="Chain length (default 8)")
    entropy.add_argument("--steps", type=int, help="Floquet steps (default 3)")
    entropy.add_argument("--initial", choices=["Zprod", "Xprod", "weighted"], help="Initial state (default Zprod)")
    entropy.add_argument("--weights", help="Comma-separated single-site amplitudes for 'weighted'")
    entropy.add_argument("--renyi", type=float, help="Renyi index (default 1)")
    entropy.add_argument("--base", choices=["nats", "dits"], help="Entropy unit (default nats)")
    entropy.add_argument("--out", help="CSV path for t,entropy")
    _add_common(entropy)

    charges = sub.add_parser("charges", help="Commutators of conserved charges with the Floquet unitary")
    charges.add_argument("--q", type=int, help="Local dimension (default 3)")
    charges.add_argument("--n", type=int, help="Ring size (default 5)")
    charges.add_argument("--uh", help="builtin:<name> or matrix file (default builtin:k3potts at q=3)")
    charges.add_argument("--kmax", type=int, help="Largest charge index (default 2)")
    _add_common(charges)

    check = sub.add_parser("check", help="Run the acceptance suite")
    check.add_argument("--suite", choices=sorted(SUITES), help="Suite name (default all)")
    _add_common(check)
    return parser


def cmd_fractal(config) -> int:
    q = config.get("q", 2)
    steps = config.get("steps", 32)
    ca = CaConfig(q, config.get("width", 2 * steps + 1), config.get("alpha", 1),
                  config.get("delta", 0), config.get("variant", "Fdagger"))
    grid = evolve(ca, *seed_row(ca, config.get("seed_kind", "X")), steps)

    fmt = config.options.get("format")
    out = config.output or os.path.join(
        get_output_directory("fractals"),
        f"fractal_q{q}_a{ca.alpha}_d{ca.delta}_{ca.horizontal}.{fmt or 'pgm'}")
    fields = ["b", "a"] if config.get("grid") == "both" else [config.get("grid", "b")]

    writer = ArtifactWriter()
    print(f"🔄 Evolving q={q} alpha={ca.alpha} delta={ca.delta} ({ca.automaton_class.value}) "
          f"for {steps} steps on N={ca.N}")
    for field_name in fields:
        path = out if field_name == fields[0] else str(Path(out).with_stem(Path(out).stem + "_a"))
        stats = writer.write_grid(grid, path, fmt=fmt, field_name=field_name)
        print(f"✅ {field_name}-grid written: {stats['output_file']}")
    return EXIT_OK


def cmd_rainbow(config) -> int:
    q = config.get("q", 2)
    u_H, _ = resolve_pair(config.get("uh", f"builtin:f{q}"))
    report = rainbow_report(RainbowSpec(q, config.get("n", 2), u_H))

    print(f"\n🌈 Rainbow protocol q={report['q']} N={report['N']}")
    print(f"Fidelity:            {report['fidelity']:.12f}")
    print(f"Half-chain entropy:  {report['half_chain_entropy']:.10f} "
          f"(expected {report['expected_entropy']:.10f})")
    if config.get("report"):
        rows = [[j + 1, float(value)] for j, value in enumerate(report['pair_fidelities'])]
        print(tabulate(rows, headers=["pair", "fidelity"], tablefmt="github", floatfmt=".12f"))
    ok = min(report['pair_fidelities'] + [report['fidelity']]) >= 1 - 1e-8
    print("✅ Rainbow state reproduced" if ok else "❌ Rainbow state not reproduced")
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_ybe_scan(config) -> int:
    q = config.get("q", 4)
    first = config.get("seed", 0)
    seeds = range(first, first + config.get("seeds", 10))
    rows = ybe_scan(q, seeds, tol=config.get("tol"), max_iter=config.get("max_iter"),
                    jobs=config.get("jobs", 1), progress=True)
    out = config.output or os.path.join(get_output_directory("reports"), f"ybe_q{q}.csv")
    ArtifactWriter().write_ybe_csv(rows, out)

    table = [[r['seed'], float(r['residual']), "" if r['pass'] is None else r['pass'], r['status']] for r in rows]
    print(tabulate(table, headers=["seed", "residual", "pass", "status"], tablefmt="github", floatfmt=".3e"))
    converged = [r for r in rows if r['status'] == 'success']
    print(f"\n📊 {sum(bool(r['pass']) for r in converged)}/{len(converged)} converged seeds satisfy the braid relation "
          f"at q={q} ({len(rows) - len(converged)} of {len(rows)} did not converge)")
    print(f"📁 Report: {out}")
    return EXIT_OK


def _parse_weights(raw):
    if raw is None:
        return None
    if isinstance(raw, (int, float)):
        return [float(raw)]
    return [float(tok) for tok in str(raw).split(",") if tok.strip()]


def cmd_entropy(config) -> int:
    q = config.get("q", 2)
    base = config.get("base", "nats")
    profile = growth_check(q, config.get("n", 8), config.get("steps", 3),
                           config.get("initial", "Zprod"), _parse_weights(config.get("weights")),
                           renyi_index=config.get("renyi", 1.0),
                           log_base=q if base == "dits" else None)

    rows = [[t, float(v) + 0.0, float(e) + 0.0] for t, v, e in zip(profile.times, profile.values, profile.expected)]
    print(tabulate(rows, headers=["t", f"entropy ({base})", "expected"], tablefmt="github", floatfmt=".10f"))
    for warning in profile.warnings:
        print(f"⚠️  {warning}")
    if config.output:
        stats = ArtifactWriter().write_profile_csv(profile, config.output)
        print(f"📁 Profile: {stats['output_file']}")
    return EXIT_OK


def cmd_charges(config) -> int:
    q = config.get("q", 3)
    default = "builtin:k3potts" if q == 3 else f"builtin:f{q}"
    u_H, u_V = resolve_pair(config.get("uh", default))
    spec = CircuitSpec(q, config.get("n", 5), u_H, u_V)
    rows = charge_report(spec, config.get("kmax", 2))

    print(tabulate([[r['charge'], float(r['commutator'])] for r in rows],
                   headers=["charge", "max |[Q, U]|"], tablefmt="github", floatfmt=".3e"))
    ok = all(r['commutator'] < 1e-8 for r in rows)
    print("✅ All charges conserved" if ok else "❌ Some charges do not commute with the Floquet unitary")
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_check(config) -> int:
    results = run_suite(config.get("suite", "all"), jobs=config.get("jobs", 1))
    print(tabulate([[r.name, "✅" if r.passed else "❌", r.elapsed, r.detail] for r in results],
                   headers=["check", "pass", "seconds", "detail"], tablefmt="github"))
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"\n❌ {len(failed)} of {len(results)} checks failed: {', '.join(failed)}")
        return EXIT_FAILURE
    print(f"\n🎉 All {len(results)} checks passed")
    return EXIT_OK


COMMANDS = {
    "fractal": cmd_fractal,
    "rainbow": cmd_rainbow,
    "ybe-scan": cmd_ybe_scan,
    "entropy": cmd_entropy,
    "charges": cmd_charges,
    "check": cmd_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    options = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        config = build_run_config(args.command, options, args.config)
        if config.get("log_level"):
            set_log_level(config.get("log_level"))
        return COMMANDS[args.command](config)
    except ResourceError as e:
        print(f"{e}\n💾 Required: {e.required_bytes} bytes (cap {e.cap})")
        return EXIT_RESOURCE
    except ConfigError as e:
        print(f"❌ Usage error: {e}")
        return EXIT_USAGE
    except LatticeError as e:
        logger.error(f"Command {args.command} failed: {str(e)}")
        print(f"❌ {e}")
        return e.exit_code
    except ValueError as e:
        print(f"❌ Usage error: {e}")
        return EXIT_USAGE
    except OSError as e:
        print(f"❌ I/O error on {getattr(e, 'filename', None) or 'output'}: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
