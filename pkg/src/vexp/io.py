"""Serialization: CSV panels, JSON model files, newline-delimited chains.

Formats are locale-independent (decimal points, LF line endings) and value
round-trip exact: floats are written with Python's shortest repr.
"""
from __future__ import annotations

import json

import numpy as np

from .bayes import Chain
from .cepstral import CepstralModel
from .likelihood import DataPanel

__all__ = [
    "DataFormatError",
    "load_csv",
    "write_csv",
    "write_table",
    "save_model",
    "load_model",
    "save_chain",
    "load_chain",
    "seasonal_difference",
]


class DataFormatError(ValueError):
    """Malformed input file; message carries row/column diagnostics."""


def _fmt(x):
    return repr(float(x))


def load_csv(path):
    """Read a UTF-8, header-first CSV into a panel (rows = time points)."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\r\n") for ln in fh]
    lines = [ln for ln in lines if ln.strip() != ""]
    if not lines:
        raise DataFormatError(f"{path}: file is empty")
    header = [cell.strip() for cell in lines[0].split(",")]
    width = len(header)
    if len(lines) == 1:
        raise DataFormatError(f"{path}: no data rows below the header")
    rows = np.empty((len(lines) - 1, width))
    for r, line in enumerate(lines[1:], start=2):
        cells = [cell.strip() for cell in line.split(",")]
        if len(cells) != width:
            raise DataFormatError(
                f"{path}: row {r} has {len(cells)} cells, expected {width}"
            )
        for c, cell in enumerate(cells):
            try:
                rows[r - 2, c] = float(cell)
            except ValueError:
                raise DataFormatError(
                    f"{path}: non-numeric cell at row {r}, column "
                    f"{c + 1} ({header[c]!r}): {cell!r}"
                ) from None
    return DataPanel(rows, names=tuple(header))


def write_csv(panel, path):
    """Write a panel; value-identical under :func:`load_csv`."""
    names = panel.names or tuple(f"x{j + 1}" for j in range(panel.m))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(names) + "\n")
        for row in panel.values:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_table(path, header, rows):
    """Generic numeric CSV writer used for spectra, forecasts, summaries."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(str(h) for h in header) + "\n")
        for row in rows:
            cells = [
                cell if isinstance(cell, str) else _fmt(cell) for cell in row
            ]
            fh.write(",".join(cells) + "\n")


def seasonal_difference(panel, lag):
    """Apply the lag-s difference: row t of the output is row t+s - row t."""
    if lag < 1:
        raise ValueError("differencing lag must be >= 1")
    x = panel.values
    if x.shape[0] <= lag:
        raise ValueError(
            f"need more than {lag} rows to difference at lag {lag}, have {x.shape[0]}"
        )
    return DataPanel(x[lag:] - x[:-lag], names=panel.names)


# ---------------------------------------------------------------------------
# model files

def save_model(path, model, delta=None):
    """Write a model as human-readable JSON (matrices as nested row lists)."""
    doc = {
        "m": model.m,
        "q": model.q,
        "omega0": model.omega0.tolist(),
        "omegas": [w.tolist() for w in model.omegas],
        "delta": (np.zeros(model.m) if delta is None
                  else np.asarray(delta, dtype=float)).tolist(),
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_model(path):
    """Read a model JSON; returns (model, delta)."""
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        m, q = int(doc["m"]), int(doc["q"])
        omega0 = np.asarray(doc["omega0"], dtype=float)
        omegas = [np.asarray(w, dtype=float) for w in doc["omegas"]]
        delta = np.asarray(doc.get("delta", np.zeros(m)), dtype=float)
    except (KeyError, TypeError) as exc:
        raise DataFormatError(f"{path}: malformed model file: {exc}") from None
    if len(omegas) != q:
        raise DataFormatError(f"{path}: q={q} but {len(omegas)} coefficient matrices")
    if omega0.shape != (m, m):
        raise DataFormatError(f"{path}: omega0 shape {omega0.shape} != ({m}, {m})")
    if delta.shape != (m,):
        raise DataFormatError(f"{path}: delta must have length {m}")
    return CepstralModel(omega0, tuple(omegas)), delta


# ---------------------------------------------------------------------------
# chain files (newline-delimited JSON)

def save_chain(path, chain):
    """One header record, then one record per stored draw."""
    header = {
        "record": "header",
        "m": chain.m,
        "q": chain.q,
        "total": chain.total,
        "burn_in": chain.burn_in,
        "seed": chain.seed,
        "acceptance": chain.acceptance,
        "settings": chain.settings,
    }
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(json.dumps(header) + "\n")
        for i in range(chain.total):
            rec = {
                "record": "draw",
                "v": chain.v_draws[i].tolist(),
                "gamma": chain.gamma_draws[i].astype(int).tolist(),
                "omega0": chain.omega0_draws[i].tolist(),
                "gamma_omega0": chain.gamma_omega0_draws[i].astype(int).tolist(),
                "delta": chain.delta_draws[i].tolist(),
                "var_mu": chain.var_mu_draws[i].tolist(),
                "var_omega0": chain.var_omega0_draws[i].tolist(),
            }
            fh.write(json.dumps(rec) + "\n")


def load_chain(path):
    with open(path, encoding="utf-8") as fh:
        header_line = fh.readline()
        if not header_line:
            raise DataFormatError(f"{path}: empty chain file")
        header = json.loads(header_line)
        if header.get("record") != "header":
            raise DataFormatError(f"{path}: first record must be the header")
        draws = [json.loads(ln) for ln in fh if ln.strip()]
    total = header["total"]
    if len(draws) != total:
        raise DataFormatError(
            f"{path}: header promises {total} draws, found {len(draws)}"
        )
    def stack(key, dtype=float):
        return np.asarray([d[key] for d in draws], dtype=dtype)

    return Chain(
        m=int(header["m"]),
        q=int(header["q"]),
        v_draws=stack("v"),
        gamma_draws=stack("gamma", np.int8),
        omega0_draws=stack("omega0"),
        gamma_omega0_draws=stack("gamma_omega0", np.int8),
        delta_draws=stack("delta"),
        var_mu_draws=stack("var_mu"),
        var_omega0_draws=stack("var_omega0"),
        burn_in=int(header["burn_in"]),
        seed=header["seed"],
        acceptance=header.get("acceptance", {}),
        settings=header.get("settings", {}),
    )
