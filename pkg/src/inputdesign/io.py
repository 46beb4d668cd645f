"""Plain-text serialisation of vectors, tables and run artifacts.

CSV layout: the first line is a header ``# name=<name> shape=<shape>``
(``shape`` is ``L`` for a vector, ``RxC`` for a matrix), optionally followed
by `` columns=<c1>,<c2>,...``.  Vectors hold one value per line, matrices
one row per line.  Floats are written with ``repr``, the shortest decimal
string that reads back to the same binary64 value; complex numbers as
``<re>+<im>j`` or ``<re>-<im>j``.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def format_number(x):
    if isinstance(x, (complex, np.complexfloating)):
        re, im = float(x.real), float(x.imag)
        sign = "-" if math.copysign(1.0, im) < 0 else "+"
        return f"{re!r}{sign}{abs(im)!r}j"
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def parse_number(s, is_complex):
    return complex(s) if is_complex else float(s)


def write_csv(path, name, data, columns=None):
    data = np.asarray(data)
    shape = str(data.shape[0]) if data.ndim == 1 else f"{data.shape[0]}x{data.shape[1]}"
    if data.ndim == 2 and data.shape[0] == 0:
        shape = f"0x{data.shape[1]}"
    header = f"# name={name} shape={shape}"
    if columns:
        header += " columns=" + ",".join(columns)
    lines = [header]
    if data.ndim == 1:
        lines.extend(format_number(v) for v in data)
    else:
        lines.extend(",".join(format_number(v) for v in row) for row in data)
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_header(line):
    if not line.startswith("# "):
        raise ValueError(f"missing CSV header line: {line!r}")
    fields = dict(item.split("=", 1) for item in line[2:].split())
    return fields


def read_csv(path):
    """Returns ``(name, array, columns)``; complex values are detected by a trailing ``j``."""
    lines = Path(path).read_text().splitlines()
    header = _parse_header(lines[0])
    body = [ln for ln in lines[1:] if ln.strip()]
    shape = [int(s) for s in header["shape"].split("x")]
    columns = header["columns"].split(",") if "columns" in header else None
    is_complex = any(tok.endswith("j") for ln in body for tok in ln.split(","))
    dtype = complex if is_complex else float
    if len(shape) == 1:
        data = np.array([parse_number(ln, is_complex) for ln in body], dtype=dtype)
    else:
        rows = [[parse_number(t, is_complex) for t in ln.split(",")] for ln in body]
        data = np.array(rows, dtype=dtype).reshape(shape)
    if list(data.shape) != shape:
        raise ValueError(f"{path}: header shape {shape} does not match data {data.shape}")
    return header["name"], data, columns


@dataclass
class RunArtifact:
    """Result of a design run, optionally with generated inputs.

    Stored as ``design.json`` (scalars and config) next to ``r_star.csv``,
    ``w_star.csv`` and, when present, ``inputs.csv`` and ``membership.csv``.
    """

    config: dict
    r_star: np.ndarray
    w_star: np.ndarray
    objective: float
    certificate: float
    iterations: int
    converged: bool = True
    inputs: np.ndarray = None
    membership: np.ndarray = None  # rows: l1, scaled, residual, pass
    extra: dict = field(default_factory=dict)

    MEMBERSHIP_COLUMNS = ("l1", "scaled", "residual", "pass")

    def save(self, out_dir):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        meta = {
            "config": self.config,
            "objective": float(self.objective),
            "certificate": float(self.certificate),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "r_star": "r_star.csv",
            "w_star": "w_star.csv",
        }
        meta.update(self.extra)
        write_csv(out / "r_star.csv", "r_star", self.r_star)
        write_csv(out / "w_star.csv", "w_star", self.w_star)
        if self.inputs is not None:
            write_csv(out / "inputs.csv", "inputs", np.asarray(self.inputs).reshape(-1, len(self.w_star)))
            meta["inputs"] = "inputs.csv"
        if self.membership is not None:
            write_csv(
                out / "membership.csv",
                "membership",
                np.asarray(self.membership).reshape(-1, 4),
                columns=self.MEMBERSHIP_COLUMNS,
            )
            meta["membership"] = "membership.csv"
        (out / "design.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        return out / "design.json"

    @classmethod
    def load(cls, path):
        path = Path(path)
        if path.is_dir():
            path = path / "design.json"
        meta = json.loads(path.read_text())
        base = path.parent
        known = {"config", "objective", "certificate", "iterations", "converged",
                 "r_star", "w_star", "inputs", "membership"}
        art = cls(
            config=meta["config"],
            r_star=read_csv(base / meta["r_star"])[1],
            w_star=read_csv(base / meta["w_star"])[1],
            objective=meta["objective"],
            certificate=meta["certificate"],
            iterations=meta["iterations"],
            converged=meta.get("converged", True),
            extra={k: v for k, v in meta.items() if k not in known},
        )
        if "inputs" in meta:
            art.inputs = read_csv(base / meta["inputs"])[1]
        if "membership" in meta:
            art.membership = read_csv(base / meta["membership"])[1]
        return art
