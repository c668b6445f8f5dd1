"""Readers and writers for configs, vectors, matrices, truth tables and images.

Complex CSV convention: each complex entry occupies two adjacent columns
(re, im). A line holding one value per entry is read as real. JSON encodes a
complex number as ``[re, im]``; plain numbers are accepted as real.
All writers go through :func:`atomic_write` (temp file, then rename).
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from latticeqc.errors import ParseError
from latticeqc.gates import BooleanFunction

FLOAT_FMT = "%.17g"


def atomic_write(path, data: bytes | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> Path:
    return atomic_write(path, dump_json(obj))


# -- config -----------------------------------------------------------------

def parse_config_text(text: str) -> dict:
    """Parse a JSON object or ``key = value`` lines (``#`` starts a comment)."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON config: {exc}") from None
        if not isinstance(data, dict):
            raise ParseError("JSON config must be an object")
        return data
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParseError(f"config line {lineno}: empty key")
        out[key] = _scalar(value)
    return out


def _scalar(value: str):
    for conv in (int, float):
        try:
            return conv(value)
        except ValueError:
            pass
    return value.strip("\"'")


def load_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text)


# -- complex arrays ---------------------------------------------------------

def _complex_entry(value) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    raise ParseError(f"cannot interpret {value!r} as a complex number")


def _csv_rows(text: str) -> list[list[float]]:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(tok) for tok in line.replace(";", ",").split(",") if tok.strip()])
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric value in {line!r}") from None
    if not rows:
        raise ParseError("file contains no numeric rows")
    return rows


def parse_matrix_csv(text: str) -> np.ndarray:
    rows = _csv_rows(text)
    n = len(rows)
    widths = {len(r) for r in rows}
    if widths == {2 * n}:
        arr = np.array(rows)
        return arr[:, 0::2] + 1j * arr[:, 1::2]
    if widths == {n}:
        return np.array(rows, dtype=np.complex128)
    raise ParseError(f"matrix CSV with {n} rows needs {n} real or {2 * n} (re, im) columns per row")


def parse_vector_csv(text: str) -> np.ndarray:
    rows = _csv_rows(text)
    if len(rows) == 1 and len(rows[0]) > 2:
        return np.array(rows[0], dtype=np.complex128)
    widths = {len(r) for r in rows}
    if widths == {1}:
        return np.array([r[0] for r in rows], dtype=np.complex128)
    if widths == {2}:
        return np.array([complex(r[0], r[1]) for r in rows])
    raise ParseError("vector CSV needs one entry per line, as 're' or 're,im'")


def _read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from None


def read_matrix(path) -> np.ndarray:
    if str(path).endswith(".json"):
        data = _read_json(path)
        if isinstance(data, dict):
            data = data.get("matrix")
        if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
            raise ParseError(f"{path}: expected a list of matrix rows")
        if len({len(r) for r in data}) != 1:
            raise ParseError(f"{path}: ragged matrix rows")
        return np.array([[_complex_entry(v) for v in row] for row in data])
    return parse_matrix_csv(_read_text(path))


def read_vector(path) -> np.ndarray:
    if str(path).endswith(".json"):
        data = _read_json(path)
        if isinstance(data, dict):
            data = data.get("vector")
        if not isinstance(data, list) or not data:
            raise ParseError(f"{path}: expected a list of vector entries")
        return np.array([_complex_entry(v) for v in data])
    return parse_vector_csv(_read_text(path))


def format_matrix_csv(m) -> str:
    m = np.asarray(m, dtype=np.complex128)
    lines = []
    for row in m:
        lines.append(",".join(f"{FLOAT_FMT % z.real},{FLOAT_FMT % z.imag}" for z in row))
    return "\n".join(lines) + "\n"


def format_vector_csv(u) -> str:
    return "".join(f"{FLOAT_FMT % z.real},{FLOAT_FMT % z.imag}\n" for z in np.asarray(u, dtype=np.complex128))


def matrix_to_json(m) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=np.complex128)]


def write_matrix(path, m) -> Path:
    if str(path).endswith(".json"):
        return write_json(path, {"matrix": matrix_to_json(m)})
    return atomic_write(path, format_matrix_csv(m))


def write_vector(path, u) -> Path:
    if str(path).endswith(".json"):
        return write_json(path, {"vector": [[float(z.real), float(z.imag)] for z in np.asarray(u, complex)]})
    return atomic_write(path, format_vector_csv(u))


def read_boolean_function(path) -> BooleanFunction:
    """Truth table from a JSON list / ``{"table": [...]}`` or a CSV / bit-string file."""
    text = _read_text(path)
    try:
        if str(path).endswith(".json"):
            data = json.loads(text)
            if isinstance(data, dict):
                data = data.get("table")
            if isinstance(data, str):
                return BooleanFunction.from_bits(data)
            return BooleanFunction(tuple(data))
        tokens = text.replace(",", " ").split()
        if len(tokens) == 1:
            return BooleanFunction.from_bits(tokens[0])
        return BooleanFunction(tuple(int(t) for t in tokens))
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise ParseError(f"invalid truth table in {path}: {exc}") from None


def write_boolean_function(path, f: BooleanFunction) -> Path:
    if str(path).endswith(".json"):
        return write_json(path, {"table": list(f.table)})
    return atomic_write(path, ",".join(str(b) for b in f.table) + "\n")


# -- images and fields ------------------------------------------------------

def pgm16_bytes(intensity: np.ndarray) -> tuple[bytes, float]:
    """Binary 16-bit PGM of a max-normalized image. Returns (data, scale)."""
    img = np.asarray(intensity, dtype=float)
    scale = float(img.max())
    norm = img / scale if scale > 0 else np.zeros_like(img)
    pixels = np.round(norm * 65535).astype(">u2")
    h, w = pixels.shape
    return f"P5\n{w} {h}\n65535\n".encode("ascii") + pixels.tobytes(), scale


def write_pgm16(path, intensity) -> float:
    data, scale = pgm16_bytes(intensity)
    atomic_write(path, data)
    return scale


def read_pgm16(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5" or parts[2] != b"65535":
        raise ParseError(f"{path}: not a 16-bit binary PGM")
    w, h = (int(v) for v in parts[1].split())
    return np.frombuffer(parts[3], dtype=">u2").reshape(h, w)


def write_field_csv(path, amplitude) -> Path:
    return atomic_write(path, format_matrix_csv(amplitude))


def write_readout(path, readout) -> Path:
    return write_json(path, readout.to_dict())


# -- manifests --------------------------------------------------------------

def manifest_timestamp() -> str:
    """UTC ISO timestamp; honours SOURCE_DATE_EPOCH for reproducible output."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = float(epoch) if epoch else time.time()
    return datetime.fromtimestamp(t, tz=timezone.utc).isoformat(timespec="seconds")


def run_manifest(command: str, argv, config: dict, outputs, version: str, image_scales=None) -> dict:
    return {
        "command": command,
        "argv": list(argv),
        "config": config,
        "timestamp": manifest_timestamp(),
        "outputs": sorted(str(p) for p in outputs),
        "image_scales": dict(sorted((image_scales or {}).items())),
        "version": version,
    }
