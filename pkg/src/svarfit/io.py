"""CSV / JSON / JSON-lines readers and writers for every artifact.

Conventions, fixed so that every emitted file round-trips losslessly and
identical inputs produce byte-identical outputs:

* comma separator, '.' decimal point, '\\n' line endings;
* floats rendered with ``repr`` (shortest string that round-trips);
* leading '# ' comment lines carry metadata, including a ``# config:``
  line with the canonical JSON of the producing configuration;
* an optional header row is auto-detected on read (any non-numeric cell).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .exceptions import InputError
from .var import VarModel


def format_value(value) -> str:
    """Canonical cell rendering: shortest round-trip for floats."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def config_comment(config: dict) -> str:
    """Canonical one-line JSON echo of a configuration document."""
    return "config: " + json.dumps(config, sort_keys=True, separators=(",", ":"))


def write_csv(path, header, rows, comments=()) -> None:
    """Write a CSV with '# ' comment lines, a header row, and data rows."""
    path = Path(path)
    with path.open("w", newline="\n") as handle:
        for comment in comments:
            handle.write(f"# {comment}\n")
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(format_value(v) for v in row) + "\n")


def read_csv(path):
    """Read a CSV written by this package (or any plain numeric CSV).

    Returns ``(comments, header, cells)`` where ``header`` is None when the
    first non-comment row is fully numeric and ``cells`` is a list of string
    rows. Raises on ragged rows, naming the offending file line.
    """
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    comments, header, cells = [], None, []
    width = None
    with path.open() as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            if line.lstrip().startswith("#"):
                comments.append(line.lstrip()[1:].strip())
                continue
            row = [cell.strip() for cell in line.split(",")]
            if width is None:
                width = len(row)
                if any(not _is_number(cell) for cell in row):
                    header = row
                    continue
            elif len(row) != width:
                raise InputError(
                    f"{path}: line {lineno} has {len(row)} cells, expected {width}")
            cells.append((lineno, row))
    return comments, header, cells


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def parse_numeric(path, cells, dtype=float) -> np.ndarray:
    """Convert read_csv cells to an array, naming row/column on failure."""
    out = []
    for lineno, row in cells:
        parsed = []
        for col, cell in enumerate(row, start=1):
            try:
                parsed.append(dtype(cell))
            except ValueError as exc:
                raise InputError(
                    f"{path}: line {lineno}, column {col}: could not parse {cell!r}"
                ) from exc
        out.append(parsed)
    return np.asarray(out, dtype=dtype)


def read_matrix_csv(path) -> np.ndarray:
    """Load a T x K numeric data matrix (optional header allowed)."""
    _, _, cells = read_csv(path)
    if not cells:
        raise InputError(f"{path}: no data rows")
    return parse_numeric(path, cells)


def write_matrix_csv(path, values: np.ndarray, names=None, comments=()) -> None:
    values = np.asarray(values)
    if names is None:
        names = [f"y{j + 1}" for j in range(values.shape[1])]
    write_csv(path, names, values.tolist(), comments)


def write_json(path, doc: dict) -> None:
    with Path(path).open("w") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)
        handle.write("\n")


def read_json(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    try:
        with path.open() as handle:
            return json.load(handle)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def write_jsonl(path, records) -> None:
    with Path(path).open("w") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True, separators=(",", ":")))
            handle.write("\n")


def save_model(path, model: VarModel) -> None:
    write_json(path, model.to_dict())


def load_model(path) -> VarModel:
    return VarModel.from_dict(read_json(path))


def write_coefficients_csv(path, model: VarModel, comments=()) -> None:
    """Sparse (lag, row, col, value) listing of a fitted model.

    Lag 0 rows carry the noise covariance; lags >= 1 list only non-zero
    coefficients. The intercept is echoed in a '# mu:' comment line, so the
    file reconstructs the full model.
    """
    rows = []
    K = model.dimension
    for i in range(K):
        for j in range(K):
            rows.append((0, i, j, model.sigma[i, j]))
    for k in range(1, model.order + 1):
        for i in range(K):
            for j in range(K):
                value = model.coeffs[k - 1, i, j]
                if value != 0.0:
                    rows.append((k, i, j, value))
    all_comments = list(comments)
    all_comments.append("mu: " + json.dumps(model.mu.tolist()))
    all_comments.append(f"order: {model.order}")
    all_comments.append(f"dimension: {K}")
    write_csv(path, ["lag", "row", "col", "value"], rows, all_comments)


def read_coefficients_csv(path) -> VarModel:
    """Inverse of write_coefficients_csv."""
    comments, _, cells = read_csv(path)
    data = parse_numeric(path, cells)
    meta = {}
    for comment in comments:
        key, _, rest = comment.partition(":")
        meta[key.strip()] = rest.strip()
    try:
        order = int(meta["order"])
        K = int(meta["dimension"])
        mu = np.asarray(json.loads(meta["mu"]), dtype=float)
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: missing or malformed model metadata comments") from exc
    sigma = np.zeros((K, K))
    coeffs = np.zeros((order, K, K))
    for lag, i, j, value in data:
        lag, i, j = int(lag), int(i), int(j)
        if lag == 0:
            sigma[i, j] = value
        elif 1 <= lag <= order:
            coeffs[lag - 1, i, j] = value
        else:
            raise InputError(f"{path}: lag {lag} outside the declared order {order}")
    return VarModel(coeffs, sigma, mu)
