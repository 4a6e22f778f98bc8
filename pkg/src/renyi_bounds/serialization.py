"""State files, witness encoding and deterministic CSV output.

State files are JSON objects ``{"dims": [d_A, d_B, ...], "matrix": rows}``
where every entry is a ``[re, im]`` pair (a bare number is read as real).
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .errors import DomainError, ParseError
from .linalg import PSD_TOL, TRACE_TOL, HERM_TOL

__all__ = ["encode_matrix", "decode_matrix", "load_state", "dump_state", "format_float",
           "write_csv", "to_jsonable"]


def encode_matrix(X) -> list:
    """Row-major list of ``[re, im]`` pairs."""
    X = np.asarray(X, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in X]


def decode_matrix(rows) -> np.ndarray:
    try:
        out = []
        for row in rows:
            r = []
            for z in row:
                if isinstance(z, (list, tuple)):
                    if len(z) != 2:
                        raise ParseError("complex entries must be [re, im] pairs")
                    r.append(complex(float(z[0]), float(z[1])))
                else:
                    r.append(complex(float(z)))
            out.append(r)
        M = np.array(out, dtype=complex)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed matrix: {exc}") from None
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ParseError(f"matrix must be square, got shape {M.shape}")
    return M


def _validate_state(M, dims):
    if int(np.prod(dims)) != M.shape[0]:
        raise ParseError(f"dims {dims} do not match matrix size {M.shape[0]}")
    scale = max(1.0, float(np.abs(M).max()))
    if np.abs(M - M.conj().T).max() > HERM_TOL * scale:
        raise DomainError("state matrix is not Hermitian")
    lam = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
    if lam[0] < -PSD_TOL:
        raise DomainError(f"state matrix is not positive semidefinite (min eigenvalue {lam[0]:.3g})")
    if abs(np.trace(M).real - 1) > TRACE_TOL:
        raise DomainError(f"state trace {np.trace(M).real:.12g} differs from 1")


def load_state(path_or_obj):
    """Read and validate a state file; returns ``(matrix, dims)``."""
    if isinstance(path_or_obj, dict):
        obj = path_or_obj
    else:
        try:
            with open(path_or_obj, encoding="utf-8") as fh:
                obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON in {path_or_obj}: {exc}") from None
    if not isinstance(obj, dict) or "matrix" not in obj:
        raise ParseError("state file needs a 'matrix' field")
    M = decode_matrix(obj["matrix"])
    dims = obj.get("dims", [M.shape[0]])
    try:
        dims = tuple(int(d) for d in dims)
    except (TypeError, ValueError):
        raise ParseError("dims must be a list of integers") from None
    if any(d < 1 for d in dims):
        raise ParseError("dims must be positive")
    _validate_state(M, dims)
    return 0.5 * (M + M.conj().T), dims


def dump_state(path, matrix, dims):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump({"dims": [int(d) for d in dims], "matrix": encode_matrix(matrix)}, fh)
        fh.write("\n")


def format_float(x) -> str:
    """``%.12g`` with ``inf``/``-inf``/``nan`` sentinels."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.12g" % x


def to_jsonable(obj):
    """Convert arrays (complex as ``[re, im]`` pairs), enums and non-finite floats for JSON."""
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            if obj.ndim == 2:
                return encode_matrix(obj)
            return [to_jsonable(x) for x in obj]
        return [to_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return format_float(obj) if not math.isfinite(obj) else float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    if hasattr(obj, "value") and hasattr(obj, "name"):
        return obj.value
    return obj


def write_csv(rows, header, path=None) -> str:
    """Render rows with a fixed column order, ``%.12g`` floats and LF line endings."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
