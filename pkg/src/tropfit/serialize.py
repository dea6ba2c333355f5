"""File formats: points CSV, subset-coordinate / matrix / curve JSON, reports.

JSON uses the literal string "-inf" for the tropical bottom; points CSV never
contains it (torus points are finite).  CSV numbers carry 12 significant
digits.  All writers go through an atomic temp-file-plus-rename so partially
written outputs are never observed, and JSON is serialized with sorted keys
so identical inputs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import NEG_INF
from .curves import TropPoly2
from .errors import ParseError
from .fitting import FitResult, Sample
from .linalg import PluckerVector, TropMatrix
from .montecarlo import McReport
from .spaces import HyperplaneNormal, StiefelSpace
from .subsets import parse_key_1based, subsets_colex

NUM_FMT = "%.12g"


def format_number(x: float) -> str:
    return NUM_FMT % x


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tropfit-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ---- numbers with "-inf" ------------------------------------------------------------


def _num_to_json(x: float):
    return "-inf" if x == NEG_INF else float(x)


def _num_from_json(v, where: str) -> float:
    if v == "-inf":
        return NEG_INF
    if isinstance(v, (int, float)) and np.isfinite(v):
        return float(v)
    raise ParseError(f"{where}: expected a finite number or \"-inf\", got {v!r}")


# ---- points CSV ---------------------------------------------------------------------


def load_points_csv(path: str) -> Sample:
    """Read a points file: one point per row, optional single header row.

    Rows must be rectangular with d >= 2 finite values; points are
    canonicalized on load.
    """
    rows: List[List[float]] = []
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            raw = [r for r in reader if r and any(cell.strip() for cell in r)]
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not raw:
        raise ParseError(f"{path}: no data rows")

    start = 0
    try:
        [float(cell) for cell in raw[0]]
    except ValueError:
        start = 1  # header row
    if start >= len(raw):
        raise ParseError(f"{path}: no data rows after header")

    width = len(raw[start])
    for lineno, row in enumerate(raw[start:], start=start + 1):
        if len(row) != width:
            raise ParseError(f"{path}: row {lineno} has {len(row)} cells, expected {width}")
        try:
            vals = [float(cell) for cell in row]
        except ValueError as exc:
            raise ParseError(f"{path}: row {lineno}: {exc}") from exc
        if not all(np.isfinite(v) for v in vals):
            raise ParseError(f"{path}: row {lineno}: points must be finite")
        rows.append(vals)
    return Sample.from_rows(np.asarray(rows))


def projection_csv(inputs: np.ndarray, projections: np.ndarray, distances: np.ndarray,
                   residuals: np.ndarray) -> str:
    """CSV with input coords, projection coords, distance, residual per row."""
    d = inputs.shape[1]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [f"in_{j+1}" for j in range(d)] + [f"proj_{j+1}" for j in range(d)] + ["distance", "residual"]
    writer.writerow(header)
    for x, w, dist, res in zip(inputs, projections, distances, residuals):
        writer.writerow([format_number(v) for v in x]
                        + [format_number(v) for v in w]
                        + [format_number(dist), format_number(res)])
    return buf.getvalue()


# ---- subset coordinates / matrices --------------------------------------------------


def plucker_to_json_dict(p: PluckerVector) -> Dict:
    return p.to_json_dict()


def plucker_from_json_dict(obj: Dict, where: str = "plucker JSON") -> PluckerVector:
    try:
        d = int(obj["d"])
        m = int(obj["m"])
        coords = obj["coords"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{where}: need keys d, m, coords") from exc
    if not isinstance(coords, dict):
        raise ParseError(f"{where}: coords must be an object")
    subs = subsets_colex(d, m) if 1 <= m < d else None
    if subs is None:
        raise ParseError(f"{where}: need 1 <= m < d, got m={m}, d={d}")
    values = np.full(subs.shape[0], np.nan)
    seen = 0
    index = {tuple(int(v) for v in row): i for i, row in enumerate(subs)}
    for key, val in coords.items():
        try:
            subset = parse_key_1based(str(key), d, m)
        except ValueError as exc:
            raise ParseError(f"{where}: bad subset key {key!r}: {exc}") from exc
        values[index[subset]] = _num_from_json(val, f"{where}: coords[{key!r}]")
        seen += 1
    if seen != subs.shape[0] or np.any(np.isnan(values)):
        raise ParseError(f"{where}: need all {subs.shape[0]} subsets of size {m}, got {seen}")
    return PluckerVector(d=d, m=m, values=values)


def matrix_to_json_dict(A: TropMatrix) -> Dict:
    return {"rows": [[_num_to_json(v) for v in row] for row in A.entries]}


def matrix_from_json_dict(obj: Dict, where: str = "matrix JSON") -> TropMatrix:
    rows = obj.get("rows")
    if not isinstance(rows, list) or not rows:
        raise ParseError(f"{where}: need a non-empty \"rows\" list")
    parsed = [[_num_from_json(v, f"{where}: rows[{i}]") for v in row] for i, row in enumerate(rows)]
    widths = {len(r) for r in parsed}
    if len(widths) != 1:
        raise ParseError(f"{where}: ragged rows")
    try:
        return TropMatrix(np.asarray(parsed))
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def load_space_json(path: str) -> StiefelSpace:
    """A space from a coordinate-vector, generator-matrix, or fit-result JSON file."""
    obj = _load_json(path)
    if isinstance(obj, dict) and "plucker" in obj:  # fit-result payload
        obj = obj["plucker"]
    if isinstance(obj, dict) and "rows" in obj:
        return StiefelSpace.from_matrix(matrix_from_json_dict(obj, where=path))
    if isinstance(obj, dict) and "coords" in obj:
        return StiefelSpace(plucker_from_json_dict(obj, where=path))
    raise ParseError(f"{path}: expected a coords, rows, or plucker object")


# ---- curves -------------------------------------------------------------------------


def curve_to_json_dict(f: TropPoly2) -> Dict:
    return {
        "degree": f.degree,
        "wxx": _num_to_json(f.wxx),
        "wx": _num_to_json(f.wx),
        "wy": _num_to_json(f.wy),
    }


def curve_from_json_dict(obj: Dict, where: str = "curve JSON") -> TropPoly2:
    try:
        degree = int(obj["degree"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{where}: need an integer degree") from exc
    vals = {}
    for key in ("wxx", "wx", "wy"):
        if key not in obj:
            raise ParseError(f"{where}: missing {key}")
        vals[key] = _num_from_json(obj[key], f"{where}: {key}")
    try:
        return TropPoly2(degree=degree, **vals)
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def load_curve_json(path: str) -> TropPoly2:
    return curve_from_json_dict(_load_json(path), where=path)


# ---- fit results --------------------------------------------------------------------


def fit_result_to_json_dict(result: FitResult) -> Dict:
    out: Dict = {
        "objective": float(result.objective),
        "projections": [[float(v) for v in row] for row in np.atleast_2d(result.projections)],
        "distances": [float(v) for v in np.atleast_1d(result.distances)],
        "iterations": int(result.iterations),
        "restarts": int(result.restarts),
    }
    space = result.space
    if isinstance(space, HyperplaneNormal):
        out["omega"] = [float(v) for v in space.omega.coords]
    elif isinstance(space, StiefelSpace):
        out["plucker"] = plucker_to_json_dict(space.p)
    elif isinstance(space, TropPoly2):
        out["curve"] = curve_to_json_dict(space)
    else:  # Fermat-Weber point
        out["point"] = [float(v) for v in getattr(space, "coords", space)]
    return out


# ---- Monte Carlo reports ------------------------------------------------------------


def mc_report_to_json_dict(report: McReport, experiment: str, params: Dict) -> Dict:
    """Serialized report; elapsed time is deliberately omitted so identical
    seeds produce identical bytes."""
    out = {
        "experiment": experiment,
        "params": params,
        "estimate": report.estimate,
        "std_error": report.std_error,
        "n": report.n,
        "seed": report.seed,
    }
    for key, val in report.extras.items():
        out[key] = val
    return out


# ---- contour CSV --------------------------------------------------------------------


def contour_csv(axis1: np.ndarray, axis2: np.ndarray, values: np.ndarray,
                min_node: Tuple[float, float, float], min_value: float, mode: str) -> str:
    label = "omega" if mode == "hyperplane" else "z"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"{label}2\\{label}3"] + [format_number(v) for v in axis2])
    for a, row in zip(axis1, values):
        writer.writerow([format_number(a)] + [format_number(v) for v in row])
    node = ",".join(format_number(v) for v in min_node)
    buf.write(f"# minimum: {label}=({node}) value={format_number(min_value)}\n")
    return buf.getvalue()


# ---- config files -------------------------------------------------------------------


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc


def load_mc_config(path: str) -> List[Dict]:
    """Experiment rows from a JSON or TOML config (selected by extension)."""
    if path.endswith(".toml"):
        try:
            import tomllib  # Python >= 3.11
        except ImportError:
            import tomli as tomllib
        try:
            with open(path, "rb") as fh:
                obj = tomllib.load(fh)
        except OSError as exc:
            raise ParseError(f"{path}: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ParseError(f"{path}: invalid TOML: {exc}") from exc
    else:
        obj = _load_json(path)
    if isinstance(obj, dict):
        rows = obj.get("experiments")
    else:
        rows = obj
    if not isinstance(rows, list) or not all(isinstance(r, dict) for r in rows):
        raise ParseError(f"{path}: expected a list of experiment tables under \"experiments\"")
    return rows
