#!/usr/bin/env python3
"""
Regenerate every figure and report
This script writes fractal grids, entropy profiles, Yang-Baxter scans and
reference matrices to the outputs/ directory
"""
import os
import sys
import time

# Add project root to path
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.services.artifact_io import ArtifactWriter, write_matrix
from src.services.chm import sinkhorn_symmetric
from src.services.entanglement import growth_check
from src.services.integrability import reference_q6_matrix, ybe_scan
from src.services.symplectic_ca import CaConfig, evolve, seed_row, single_x_wedge
from src.utils.lattice_config import OUTPUT_DIR, get_output_directory

FRACTALS = {
    "fractal_q2": {"q": 2, "alpha": 1, "delta": 0, "steps": 64},
    "fractal_q3": {"q": 3, "alpha": 1, "delta": 0, "steps": 81},
    "glider_q3": {"q": 3, "alpha": 1, "delta": 2, "steps": 32},
}

PROFILES = {
    "entropy_zprod_q2": {"q": 2, "N": 8, "T": 3, "initial": "Zprod"},
    "entropy_xprod_q2": {"q": 2, "N": 8, "T": 3, "initial": "Xprod"},
    "entropy_weighted_q2": {"q": 2, "N": 8, "T": 3, "initial": "weighted", "weights": [0.9 ** 0.5, 0.1 ** 0.5]},
    "entropy_xprod_q3": {"q": 3, "N": 8, "T": 2, "initial": "Xprod"},
}

YBE_SCANS = {q: 20 if q == 6 else 10 for q in range(2, 7)}


def run_job(label, job):
    """Run a single job and report its duration"""
    print(f"📥 Generating: {label}")
    try:
        start_time = time.time()
        path = job()
        print(f"✅ {label} -> {path} in {time.time() - start_time:.1f}s")
        return True
    except Exception as e:
        print(f"❌ Failed to generate {label}: {str(e)}")
        return False


def fractal_job(name, params, writer):
    def job():
        config = CaConfig(params["q"], 2 * params["steps"] + 1, params["alpha"], params["delta"])
        grid = evolve(config, *seed_row(config), params["steps"])
        path = os.path.join(get_output_directory("fractals"), f"{name}.pgm")
        writer.write_grid(grid, path)
        writer.write_grid(grid, path.replace(".pgm", ".csv"))
        return path
    return job


def wedge_job(writer):
    def job():
        path = os.path.join(get_output_directory("fractals"), "wedge_q3.csv")
        writer.write_grid(single_x_wedge(3, 12, 32), path)
        return path
    return job


def profile_job(name, params, writer):
    def job():
        profile = growth_check(params["q"], params["N"], params["T"], params["initial"],
                               params.get("weights"))
        path = os.path.join(get_output_directory("reports"), f"{name}.csv")
        writer.write_profile_csv(profile, path)
        return path
    return job


def ybe_job(q, seeds, writer):
    def job():
        path = os.path.join(get_output_directory("reports"), f"ybe_q{q}.csv")
        writer.write_ybe_csv(ybe_scan(q, range(seeds)), path)
        return path
    return job


def matrix_job():
    def job():
        directory = get_output_directory("matrices")
        write_matrix(reference_q6_matrix(), os.path.join(directory, "reference_q6.txt"))
        for q in range(2, 8):
            write_matrix(sinkhorn_symmetric(q, seed=0), os.path.join(directory, f"sinkhorn_q{q}.txt"))
        return directory
    return job


def main():
    """Main generation function"""
    print("🚀 Hadamard Lattice Figure Generator")
    print(f"📁 Saving to: {OUTPUT_DIR}")
    writer = ArtifactWriter()

    jobs = [(name, fractal_job(name, params, writer)) for name, params in FRACTALS.items()]
    jobs.append(("wedge_q3", wedge_job(writer)))
    jobs += [(name, profile_job(name, params, writer)) for name, params in PROFILES.items()]
    jobs += [(f"ybe_q{q}", ybe_job(q, seeds, writer)) for q, seeds in YBE_SCANS.items()]
    jobs.append(("matrices", matrix_job()))

    succeeded = 0
    for index, (label, job) in enumerate(jobs, 1):
        print(f"\n[{index}/{len(jobs)}] {label}")
        succeeded += run_job(label, job)

    print(f"\n✅ Generation Complete! {succeeded}/{len(jobs)} artifacts saved to: {OUTPUT_DIR}")
    return 0 if succeeded == len(jobs) else 1


if __name__ == "__main__":
    sys.exit(main())
