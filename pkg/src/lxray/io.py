"""JSON file formats for grids and sinograms, plus CSV exports.

Grid files:
    {"d": int, "r": "radius as p or p/q", "values": [{"z": [...], "v": float}]}
Sinogram files:
    {"d": int,
     "family": {"kind": "tstar"|"tstar_plane"|"free",
                "a": [...]?, "b": [...]?, "alpha": "..."?, "beta": "..."?,
                "r": "..."?},
     "rays": [{"z": [...], "dir": [...], "base": [...], "v": float}]}

Rows are sorted by z and floats use Python's shortest round-trip repr, so
identical inputs produce byte-identical files. The optional family "r"
records the data-side support radius so reconstructions can re-check the
annulus precondition without re-supplying it. Writes are atomic (temp file
plus rename).
"""

from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction

from .errors import FileFormatError
from .lattice import as_fraction
from .rays import Ray, RayKey, ray_key
from .transform import FamilyMeta, GridFunction, Sinogram

FAMILY_KINDS = ("tstar", "tstar_plane", "free")


def frac_str(x: Fraction) -> str:
    x = as_fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_frac(s) -> Fraction:
    try:
        return as_fraction(s)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise FileFormatError(f"bad rational {s!r}") from exc


def _int_vec(obj, d: int, what: str) -> tuple[int, ...]:
    if (not isinstance(obj, list) or len(obj) != d
            or not all(isinstance(c, int) and not isinstance(c, bool) for c in obj)):
        raise FileFormatError(f"{what} must be a list of {d} integers, got {obj!r}")
    return tuple(obj)


def write_json_atomic(path: str, obj) -> None:
    text = json.dumps(obj, indent=1, sort_keys=True)
    dirname = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=dirname, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc


def grid_to_obj(f: GridFunction) -> dict:
    return {
        "d": f.d,
        "r": frac_str(f.support_radius),
        "values": [{"z": list(z), "v": f.values[z]} for z in sorted(f.values)],
    }


def obj_to_grid(obj) -> GridFunction:
    if not isinstance(obj, dict):
        raise FileFormatError("grid file must be a JSON object")
    try:
        d = obj["d"]
        r = parse_frac(obj["r"])
        rows = obj["values"]
    except KeyError as exc:
        raise FileFormatError(f"grid file missing key {exc}") from exc
    if not isinstance(d, int) or d < 2:
        raise FileFormatError(f"bad dimension {d!r}")
    if not isinstance(rows, list):
        raise FileFormatError("values must be a list")
    values = {}
    for row in rows:
        if not isinstance(row, dict) or "z" not in row or "v" not in row:
            raise FileFormatError(f"bad grid row {row!r}")
        z = _int_vec(row["z"], d, "z")
        if z in values:
            raise FileFormatError(f"duplicate grid point {z}")
        if not isinstance(row["v"], (int, float)) or isinstance(row["v"], bool):
            raise FileFormatError(f"bad value {row['v']!r}")
        values[z] = float(row["v"])
    try:
        return GridFunction(d=d, support_radius=r, values=values)
    except Exception as exc:
        raise FileFormatError(str(exc)) from exc


def meta_to_obj(meta: FamilyMeta) -> dict:
    fam: dict = {"kind": meta.kind}
    if meta.a is not None:
        fam["a"] = list(meta.a)
    if meta.b is not None:
        fam["b"] = list(meta.b)
    if meta.alpha is not None:
        fam["alpha"] = frac_str(meta.alpha)
    if meta.beta is not None:
        fam["beta"] = frac_str(meta.beta)
    if meta.support_radius is not None:
        fam["r"] = frac_str(meta.support_radius)
    return fam


def obj_to_meta(obj, d: int) -> FamilyMeta:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise FileFormatError("family must be an object with a kind")
    kind = obj["kind"]
    if kind not in FAMILY_KINDS:
        raise FileFormatError(f"unknown family kind {kind!r}")
    a = _int_vec(obj["a"], d, "a") if "a" in obj else None
    b = _int_vec(obj["b"], d, "b") if "b" in obj else None
    if kind == "tstar_plane" and (a is None or b is None):
        raise FileFormatError("tstar_plane family needs both a and b")
    return FamilyMeta(
        kind=kind, a=a, b=b,
        alpha=parse_frac(obj["alpha"]) if "alpha" in obj else None,
        beta=parse_frac(obj["beta"]) if "beta" in obj else None,
        support_radius=parse_frac(obj["r"]) if "r" in obj else None,
    )


def sino_to_obj(s: Sinogram) -> dict:
    rows = []
    for z, ray in sorted(s.family):
        key = ray_key(ray)
        rows.append({
            "z": list(z),
            "dir": list(key.dir),
            "base": list(key.base),
            "v": s.entries[key],
        })
    return {"d": s.d, "family": meta_to_obj(s.meta), "rays": rows}


def obj_to_sino(obj) -> Sinogram:
    if not isinstance(obj, dict):
        raise FileFormatError("sinogram file must be a JSON object")
    try:
        d = obj["d"]
        fam_obj = obj["family"]
        rows = obj["rays"]
    except KeyError as exc:
        raise FileFormatError(f"sinogram file missing key {exc}") from exc
    if not isinstance(d, int) or d < 2:
        raise FileFormatError(f"bad dimension {d!r}")
    meta = obj_to_meta(fam_obj, d)
    if not isinstance(rows, list):
        raise FileFormatError("rays must be a list")
    entries: dict[RayKey, float] = {}
    family = []
    for row in rows:
        if not isinstance(row, dict):
            raise FileFormatError(f"bad ray row {row!r}")
        try:
            z = _int_vec(row["z"], d, "z")
            dirv = _int_vec(row["dir"], d, "dir")
            base = _int_vec(row["base"], d, "base")
            v = row["v"]
        except KeyError as exc:
            raise FileFormatError(f"ray row missing key {exc}") from exc
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise FileFormatError(f"bad value {v!r}")
        ray = Ray(base, dirv)
        key = ray_key(ray)
        if key.dir != dirv or key.base != base:
            raise FileFormatError(
                f"ray (dir={dirv}, base={base}) is not in reduced canonical form")
        if key in entries and entries[key] != float(v):
            raise FileFormatError(f"conflicting values for one line at {z}")
        entries[key] = float(v)
        family.append((z, ray))
    return Sinogram(d=d, entries=entries, meta=meta, family=tuple(family))


def grid_to_csv(f: GridFunction, path: str) -> None:
    header = ",".join(f"z{i + 1}" for i in range(f.d)) + ",v"
    lines = [header]
    for z in sorted(f.values):
        lines.append(",".join(str(c) for c in z) + f",{f.values[z]!r}")
    _write_text_atomic(path, "\n".join(lines) + "\n")


def residuals_to_csv(path: str, residuals: list[float]) -> None:
    lines = ["iteration,max_abs_residual"]
    for i, res in enumerate(residuals):
        lines.append(f"{i},{res!r}")
    _write_text_atomic(path, "\n".join(lines) + "\n")


def _write_text_atomic(path: str, text: str) -> None:
    dirname = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=dirname, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
