"""Command-line interface.

Subcommands:

* ``fit data.csv``      two-stage sparse VAR fit; writes report.json,
                        bic_stage1.csv, bic_stage2.csv, psc_summary.csv,
                        coefficients.csv
* ``simulate model.json --T n``  draw a sample path; writes data.csv
* ``bench [study.json]``         simulation study; writes metrics.csv,
                                 records.jsonl
* ``psc [data.csv] [--model m]`` squared partial coherence per pair and
                                 frequency; writes psc.csv

Every command accepts ``--config`` (JSON settings, unknown keys rejected),
``--seed``, ``--out-dir`` and ``--threads``. Exit codes: 0 success, 2 invalid
input, 3 numerical failure; errors go to stderr as one-line JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io
from .exceptions import InputError, ModelDomainError, NumericalError, SvarError
from .series import MultiSeries
from .spectral import estimate_spectrum, model_spectrum, psc_from_inverse
from .study import (PRESETS, StudyConfig, preset_study, run_study)
from .two_stage import TwoStageConfig, fit_svar
from .var import VarModel, simulate

_FIT_KEYS = {"p_range", "m_range", "spans", "ridge", "mle_tol", "mle_max_iter", "presample"}
_SIM_KEYS = {"T", "burn_in", "seed"}
_BENCH_KEYS = {"preset", "generator", "T", "replications", "seed", "methods",
               "two_stage", "lasso_p_range", "n_folds", "n_lambda",
               "lambda_min_ratio", "burn_in", "label", "delta_sq"}
_PSC_KEYS = {"spans", "ridge", "n_freq"}


def _check_keys(doc: dict, allowed: set, where: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise InputError(f"unknown {where} config keys: {sorted(unknown)}; "
                         f"allowed: {sorted(allowed)}")


def _load_config(path) -> dict:
    if path is None:
        return {}
    doc = io.read_json(path)
    if not isinstance(doc, dict):
        raise InputError(f"{path}: config must be a JSON object")
    return doc


def _tuple_or_none(value):
    return None if value is None else tuple(value)


def _two_stage_config(doc: dict) -> TwoStageConfig:
    _check_keys(doc, _FIT_KEYS, "fit")
    kwargs = dict(doc)
    for key in ("p_range", "m_range", "spans"):
        if key in kwargs:
            kwargs[key] = _tuple_or_none(kwargs[key])
    return TwoStageConfig(**kwargs)


def cmd_fit(args) -> int:
    config = _two_stage_config(_load_config(args.config))
    values = io.read_matrix_csv(args.data)
    report = fit_svar(MultiSeries(values), config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    echo = io.config_comment({"command": "fit", "input": str(args.data),
                              "config": config.to_dict()})

    io.write_json(out / "report.json", report.to_dict())
    s1 = report.stage1
    rows = [(p, M, s1.bic_surface[a, b])
            for a, p in enumerate(s1.p_range)
            for b, M in enumerate(s1.m_range)]
    io.write_csv(out / "bic_stage1.csv", ["p", "M", "bic"], rows, [echo])
    s2 = report.stage2
    io.write_csv(out / "bic_stage2.csv", ["m", "bic"],
                 list(enumerate(s2.bic_curve.tolist())), [echo])
    if s1.ranking is not None:
        pair_rows = [(i, j, s) for (i, j), s in zip(s1.ranking.pairs, s1.ranking.scores)]
    else:
        pair_rows = []
    io.write_csv(out / "psc_summary.csv", ["i", "j", "s_hat"], pair_rows, [echo])
    io.write_coefficients_csv(out / "coefficients.csv", report.model, [echo])
    print(f"fitted sparse VAR(p*={report.p_star}, m*={report.m_star}) "
          f"from {values.shape[0]} observations; outputs in {out}")
    return 0


def cmd_simulate(args) -> int:
    doc = _load_config(args.config)
    _check_keys(doc, _SIM_KEYS, "simulate")
    T = args.T if args.T is not None else doc.get("T")
    if T is None:
        raise InputError("simulate needs --T (or 'T' in the config)")
    burn_in = args.burn_in if args.burn_in is not None else doc.get("burn_in", 500)
    seed = args.seed if args.seed is not None else doc.get("seed", 0)
    model = io.load_model(args.model)
    series = simulate(model, int(T), burn_in=int(burn_in), seed=int(seed))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    echo = io.config_comment({"command": "simulate", "model": str(args.model),
                              "T": int(T), "burn_in": int(burn_in), "seed": int(seed)})
    io.write_matrix_csv(out / "data.csv", series.values, comments=[echo])
    print(f"wrote {T} observations of {model.dimension} series to {out / 'data.csv'}")
    return 0


def _study_config(doc: dict, args) -> StudyConfig:
    _check_keys(doc, _BENCH_KEYS, "bench")
    doc = dict(doc)
    if args.preset:
        doc.setdefault("preset", args.preset)
    if args.reps is not None:
        doc["replications"] = args.reps
    if args.seed is not None:
        doc["seed"] = args.seed

    preset = doc.pop("preset", None)
    two_stage = _two_stage_config(doc.pop("two_stage", {}) or {})
    if preset is not None:
        base = preset_study(preset)
        config = StudyConfig(
            generator=base.generator,
            T=int(doc.get("T", base.T)),
            replications=int(doc.get("replications", base.replications)),
            seed=int(doc.get("seed", base.seed)),
            methods=tuple(doc.get("methods", base.methods)),
            two_stage=two_stage,
            label=str(doc.get("label", base.label)),
            delta_sq=base.delta_sq,
        )
    else:
        if "generator" not in doc:
            raise InputError("bench config needs a 'preset' name or a 'generator' model")
        config = StudyConfig(
            generator=VarModel.from_dict(doc["generator"]),
            T=int(doc.get("T", 100)),
            replications=int(doc.get("replications", 500)),
            seed=int(doc.get("seed", 0)),
            methods=tuple(doc.get("methods", ("two_stage",))),
            two_stage=two_stage,
            label=str(doc.get("label", "custom")),
            delta_sq=doc.get("delta_sq"),
        )
    for key in ("lasso_p_range", "n_folds", "n_lambda", "lambda_min_ratio", "burn_in"):
        if key in doc:
            value = doc[key]
            setattr(config, key, tuple(value) if key == "lasso_p_range" else type(getattr(config, key))(value))
    return config


def cmd_bench(args) -> int:
    doc = _load_config(args.config if args.config else args.study)
    if args.study and args.config:
        raise InputError("pass the study document either positionally or via --config, not both")
    config = _study_config(doc, args)
    table = run_study(config, threads=max(1, args.threads))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    echo = io.config_comment({"command": "bench", "config": config.to_dict()})
    io.write_csv(out / "metrics.csv",
                 ["method", "delta_sq", "p_hat", "m_hat", "bias_sq", "variance", "mse"],
                 table.row_tuples(), [echo])
    io.write_jsonl(out / "records.jsonl", table.records)
    for row in table.rows.values():
        note = f" ({row.n_failed} failed)" if row.n_failed else ""
        print(f"{row.method}: p_hat={row.p_hat_mean:.3f} m_hat={row.m_hat_mean:.3f} "
              f"mse={row.mse:.3f}{note}")
    return 0


def cmd_psc(args) -> int:
    doc = _load_config(args.config)
    _check_keys(doc, _PSC_KEYS, "psc")
    spans = _tuple_or_none(doc.get("spans"))
    ridge = doc.get("ridge", "auto")
    if args.data is None and args.model is None:
        raise InputError("psc needs a data CSV, a model JSON, or both")

    notes = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        columns = ["omega", "i", "j"]
        psc_data = None
        if args.data is not None:
            series = MultiSeries(io.read_matrix_csv(args.data)).centered()
            estimate = estimate_spectrum(series, spans)
            freqs, values = estimate.half_grid()
            psc_data = np.abs(psc_from_inverse(values, freqs, ridge=ridge).values) ** 2
            spectrum_values, spectrum_freqs = values, freqs
            columns.append("psc_sq_nonparametric")
        else:
            n_freq = int(doc.get("n_freq", 128))
            freqs = np.pi * np.arange(1, n_freq + 1) / n_freq
        psc_model = None
        if args.model is not None:
            model = io.load_model(args.model)
            values_model = model_spectrum(model, freqs)
            psc_model = np.abs(psc_from_inverse(values_model, freqs, ridge=ridge).values) ** 2
            if args.data is None:
                spectrum_values, spectrum_freqs = values_model, freqs
            columns.append("psc_sq_model")
    for warning in caught:
        notes.append(str(warning.message))
        print(f"note: {warning.message}", file=sys.stderr)

    K = (psc_data if psc_data is not None else psc_model).shape[1]
    rows = []
    for idx, omega in enumerate(freqs):
        for i in range(K):
            for j in range(i + 1, K):
                row = [omega, i, j]
                if psc_data is not None:
                    row.append(psc_data[idx, i, j])
                if psc_model is not None:
                    row.append(psc_model[idx, i, j])
                rows.append(row)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    echo = io.config_comment({"command": "psc",
                              "data": None if args.data is None else str(args.data),
                              "model": None if args.model is None else str(args.model),
                              "config": doc})
    comments = [echo] + [f"note: {n}" for n in notes]
    io.write_csv(out / "psc.csv", columns, rows, comments)
    if args.spectrum_out:
        spec_rows = []
        for idx, omega in enumerate(spectrum_freqs):
            for i in range(K):
                for j in range(K):
                    value = spectrum_values[idx, i, j]
                    spec_rows.append((omega, i, j, value.real, value.imag))
        io.write_csv(args.spectrum_out, ["frequency", "i", "j", "re", "im"],
                     spec_rows, comments)
    print(f"wrote squared partial coherence for {K * (K - 1) // 2} pairs at "
          f"{len(freqs)} frequencies to {out / 'psc.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON settings document")
    common.add_argument("--seed", type=int, default=None, help="random seed")
    common.add_argument("--out-dir", default=".", help="output directory")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for replication runs")

    parser = argparse.ArgumentParser(
        prog="svarfit",
        description="Sparse VAR fitting via spectral screening, BIC refinement, "
                    "and penalised baselines.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", parents=[common],
                           help="two-stage sparse VAR fit of a CSV data matrix")
    p_fit.add_argument("data", help="T x K numeric CSV (optional header)")
    p_fit.set_defaults(func=cmd_fit)

    p_sim = sub.add_parser("simulate", parents=[common],
                           help="simulate a sample path from a model JSON")
    p_sim.add_argument("model", help="model JSON document")
    p_sim.add_argument("--T", type=int, default=None, help="observations to keep")
    p_sim.add_argument("--burn-in", type=int, default=None, help="discarded warm-up steps")
    p_sim.set_defaults(func=cmd_simulate)

    p_bench = sub.add_parser("bench", parents=[common],
                             help="run a simulation study (preset or custom)")
    p_bench.add_argument("study", nargs="?", help="study JSON document")
    p_bench.add_argument("--preset", choices=sorted(PRESETS),
                         help="built-in benchmark study")
    p_bench.add_argument("--reps", type=int, default=None, help="replication count")
    p_bench.set_defaults(func=cmd_bench)

    p_psc = sub.add_parser("psc", parents=[common],
                           help="squared partial coherence per pair and frequency")
    p_psc.add_argument("data", nargs="?", help="T x K numeric CSV")
    p_psc.add_argument("--model", help="model JSON for the parametric curve")
    p_psc.add_argument("--spectrum-out", help="also dump the raw spectral matrices here")
    p_psc.set_defaults(func=cmd_psc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ModelDomainError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2
    except (NumericalError, np.linalg.LinAlgError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 3
    except SvarError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
