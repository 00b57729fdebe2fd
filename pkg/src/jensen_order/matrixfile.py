"""JSON matrix files: ``{"n": n, "re": [[...]], "im": [[...]]}``.

Floats are written with ``repr`` precision (shortest round-trip form, at
most 17 significant digits), so a write/read cycle is lossless. ``im``
may be omitted on input and is then taken as zero.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class MatrixFileError(ValueError):
    pass


def matrix_to_dict(M) -> dict:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise MatrixFileError(f"expected a square matrix, got shape {M.shape}")
    return {"n": int(M.shape[0]), "re": M.real.tolist(), "im": M.imag.tolist()}


def matrix_from_dict(data: dict) -> np.ndarray:
    if not isinstance(data, dict) or "n" not in data or "re" not in data:
        raise MatrixFileError("matrix document needs fields 'n' and 're'")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MatrixFileError(f"'n' must be a positive integer, got {n!r}")

    def grid(key):
        rows = data[key]
        if not isinstance(rows, list) or len(rows) != n or any(
            not isinstance(r, list) or len(r) != n for r in rows
        ):
            raise MatrixFileError(f"'{key}' must be an {n}x{n} array")
        try:
            return np.array(rows, dtype=float)
        except (TypeError, ValueError) as exc:
            raise MatrixFileError(f"'{key}' has non-numeric entries") from exc

    re = grid("re")
    im = grid("im") if data.get("im") is not None else np.zeros((n, n))
    return re + 1j * im


def write_matrix(path, M) -> None:
    Path(path).write_text(json.dumps(matrix_to_dict(M), indent=1) + "\n")


def read_matrix(path) -> np.ndarray:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise MatrixFileError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"{path} is not valid JSON: {exc}") from exc
    return matrix_from_dict(data)
