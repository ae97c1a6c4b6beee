"""
The same pipeline from the shell
================================

Everything the library does is reachable without writing Python: `simulate`
writes a sample path to CSV, `fit` reads a CSV and writes a directory of
artifacts (fitted model JSON, coefficient table, selection diagnostics),
and `psc` tabulates the squared partial coherence per pair.  This script
drives the command-line interface through subprocess and peeks at the
artifacts it produces — exactly what a shell user would see.

Run with:  python3 demos/06_command_line_workflow.py
"""

from __future__ import annotations

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import svarfit

def run(*args: str) -> str:
    """Run one CLI invocation, echo it, and return its stdout."""
    cmd = [sys.executable, "-m", "svarfit", *args]
    print(f"\n$ svarfit {' '.join(args)}")
    result = subprocess.run(cmd, capture_output=True, text=True, check=True)
    return result.stdout

workdir = Path(tempfile.mkdtemp(prefix="svarfit-demo-"))
print(f"working in {workdir}")

# ----------------------------------------------------------------------------
# 1. Write a model file and simulate from it
# ----------------------------------------------------------------------------
# Model files are plain JSON; any model built in Python serializes with
# to_dict.  The simulate subcommand turns one into a CSV sample path named
# data.csv inside --out-dir.

model_file = workdir / "model.json"
model_file.write_text(json.dumps(svarfit.benchmark_model(1.0).to_dict()))

run("simulate", str(model_file), "--T", "300", "--seed", "11",
    "--out-dir", str(workdir))
data_file = workdir / "data.csv"
lines = data_file.read_text().splitlines()
print(f"wrote {len(lines)} lines; first data row: {lines[2][:52]}...")

# ----------------------------------------------------------------------------
# 2. Fit the two-stage model and inspect the artifacts
# ----------------------------------------------------------------------------

fit_dir = workdir / "fit"
run("fit", str(data_file), "--out-dir", str(fit_dir))

print("artifacts:")
for path in sorted(fit_dir.iterdir()):
    print(f"    {path.name}")

report = json.loads((fit_dir / "report.json").read_text())
print(f"\nselected lag order: {report['p_star']}, "
      f"support size: {report['m_star']}")

coeff_rows = [ln for ln in (fit_dir / "coefficients.csv").read_text().splitlines()
              if not ln.startswith("#") and not ln.startswith("lag")]
lagged = [ln for ln in coeff_rows if ln.split(",")[0] != "0"]
print(f"coefficients.csv: {len(coeff_rows)} rows, {len(lagged)} at lag >= 1 "
      f"(lag 0 rows carry the noise covariance)")

# ----------------------------------------------------------------------------
# 3. Tabulate partial coherence straight from the data file
# ----------------------------------------------------------------------------

psc_dir = workdir / "psc"
run("psc", str(data_file), "--out-dir", str(psc_dir))
header, first = (psc_dir / "psc.csv").read_text().splitlines()[1:3]
print(f"columns:   {header}")
print(f"first row: {first}")

# ----------------------------------------------------------------------------
# 4. Reproduce a benchmark row without leaving the shell
# ----------------------------------------------------------------------------
# bench runs a replicated study; a JSON settings file overrides any study
# field, and records.jsonl keeps every replication for post-hoc analysis.

settings = workdir / "settings.json"
settings.write_text(json.dumps({"methods": ["two_stage"]}))

bench_dir = workdir / "bench"
run("bench", "--preset", "table1-delta1", "--reps", "5", "--seed", "1",
    "--config", str(settings), "--out-dir", str(bench_dir))
for line in (bench_dir / "metrics.csv").read_text().splitlines():
    if not line.startswith("#"):
        print(f"    {line}")
n_records = len((bench_dir / "records.jsonl").read_text().splitlines())
print(f"records.jsonl holds {n_records} per-replication records")

print("\ndone; artifacts left in", workdir)
