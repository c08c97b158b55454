#!/usr/bin/env python3
"""End-to-end checks of the geostop command line tool.

Driven by ctest with GEOSTOP_BIN pointing at the built binary and
GEOSTOP_CONFIGS at the repository's example configs.
"""

import json
import os
import subprocess
import sys
import tempfile

BIN = os.environ["GEOSTOP_BIN"]
CONFIGS = os.environ["GEOSTOP_CONFIGS"]

failures = []


def check(name, cond, detail=""):
    status = "ok" if cond else "FAIL"
    print(f"{status:4s} {name} {detail}")
    if not cond:
        failures.append(name)


def run(*args, expect=0):
    proc = subprocess.run([BIN, *args], capture_output=True, text=True)
    if expect is not None and proc.returncode != expect:
        print(f"  command: {' '.join(args)}")
        print(f"  stdout: {proc.stdout[-500:]}")
        print(f"  stderr: {proc.stderr[-500:]}")
    return proc


def stripped(path):
    with open(path) as f:
        doc = json.load(f)
    del doc["manifest"]["created_utc"]
    del doc["manifest"]["wall_time_sec"]
    return doc


def main():
    tmp = tempfile.mkdtemp(prefix="geostop_cli_")
    a1 = os.path.join(CONFIGS, "a1_hazard_iid.json")

    # determinism: same config and seed give byte-identical payloads
    r1, r2 = os.path.join(tmp, "r1.json"), os.path.join(tmp, "r2.json")
    csv1 = os.path.join(tmp, "h1.csv")
    p = run("simulate-hazard", a1, "--trials", "5000", "--seed", "7", "--out", r1,
            "--csv", csv1)
    check("simulate-hazard exits 0", p.returncode == 0)
    p = run("simulate-hazard", a1, "--trials", "5000", "--seed", "7", "--out", r2)
    check("rerun exits 0", p.returncode == 0)
    d1, d2 = stripped(r1), stripped(r2)
    check("reports identical modulo timestamps", d1 == d2)
    check("manifest carries the config hash", len(d1["manifest"]["config_hash"]) == 16)
    check("geometric family with rho 1/2", abs(d1["experiment"]["target_param"] - 0.5) < 1e-12)
    check("bounds attached from the config section", "bounds" in d1
          and d1["bounds"]["note"] == "bound shape, constant not certified")

    # csv: header and column sum
    with open(csv1) as f:
        lines = f.read().strip().splitlines()
    check("csv header", lines[0] == "k,count,empirical_prob,target_prob")
    total = sum(float(line.split(",")[2]) for line in lines[1:])
    cens = d1["experiment"]["censored_fraction"]
    check("csv empirical probabilities sum to 1 - censored",
          abs(total - (1.0 - cens)) < 1e-9, f"sum={total}")

    # config errors exit 1 and aggregate
    bad = os.path.join(tmp, "bad.json")
    with open(bad, "w") as f:
        json.dump({
            "model": {"variant": "iid", "uniform": 4},
            "schedule": {"kind": "linear_multiples", "coeffs": [2, 2]},
            "targets": {"hazard": ["0", "1"], "count": ["1"]},
        }, f)
    p = run("simulate-hazard", bad, expect=1)
    check("invalid config exits 1", p.returncode == 1)
    check("error names the broken hypotheses",
          "strictly increasing" in p.stderr and "disjoint" in p.stderr)

    # strict censoring violations exit 2
    strict_cfg = os.path.join(tmp, "strict.json")
    with open(strict_cfg, "w") as f:
        json.dump({
            "model": {"variant": "iid", "weights": [0.02, 0.98]},
            "schedule": {"kind": "linear_multiples", "coeffs": [1]},
            "targets": {"hazard": ["0"], "count": ["1"]},
            "trials": 500, "seed": 1, "step_cap": 20,
            "bootstrap": {"resamples": 0},
        }, f)
    p = run("simulate-hazard", strict_cfg, "--strict", expect=2)
    check("strict mode exits 2 on censoring violations", p.returncode == 2)
    p = run("simulate-hazard", strict_cfg, expect=0)
    check("non-strict run warns but exits 0", p.returncode == 0 and "censored" in p.stdout)

    # poisson runs
    pois = os.path.join(CONFIGS, "a3_poisson_iid.json")
    rp = os.path.join(tmp, "rp.json")
    p = run("simulate-poisson", pois, "--trials", "2000", "--seed", "3", "--out", rp)
    check("simulate-poisson exits 0", p.returncode == 0)
    dp = stripped(rp)
    check("poisson family with lambda 1", abs(dp["experiment"]["target_param"] - 1.0) < 1e-12)

    # bounds evaluation
    p = run("bounds", a1)
    check("bounds exits 0", p.returncode == 0)
    bdoc = json.loads(p.stdout)
    check("bounds reports the uncertified-constant note",
          bdoc["note"] == "bound shape, constant not certified")
    check("bounds picks the (M, R) schedule", bdoc["M"] == 231 and bdoc["R"] == 1)

    # word statistics
    p = run("word-stats", "--a", "100", "--b", "200")
    w = json.loads(p.stdout)
    check("word-stats values", w == {"pi_a": 3, "pi_b": 3, "pi_ab": 3, "kappa": 3})

    # gauss measure and a small simulation
    p = run("gauss", "measure", "--digits", "1")
    m = json.loads(p.stdout)
    check("gauss measure of [1]", abs(m["measure"] - 0.4150374992788438) < 1e-12)
    rg = os.path.join(tmp, "rg.json")
    p = run("gauss", "simulate", "--a", "1", "--b", "2", "--trials", "500", "--seed", "2",
            "--precision-bits", "128", "--max-digits", "32", "--out", rg)
    check("gauss simulate exits 0", p.returncode == 0)
    dg = stripped(rg)
    # rho = G[1]/(G[1] + G[2]) = log(4/3)/log(3/2)
    import math
    rho = math.log(4.0 / 3.0) / math.log(1.5)
    check("gauss rho matches the measure ratio",
          abs(dg["experiment"]["target_param"] - rho) < 1e-12)

    # brute-force oracle suites
    p = run("oracle", "--quick")
    check("oracle suite exits 0", p.returncode == 0 and "PASS" in p.stdout)

    print(f"\n{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
