"""Figure definitions: one renderer per figure id, all CSV-driven."""

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FIGURE_IDS", "METHOD_COLORS", "FigureSpec", "SchemaError", "plot", "render"]

#: method color convention used across all figures
METHOD_COLORS = {"vc": "tab:blue", "primo": "tab:orange", "txlr": "gold"}

_METHOD_LABELS = {"vc": "VC", "primo": "PRIMO", "txlr": "TxLR"}

#: columns each figure needs from its input CSV
_REQUIRED = {
    "rmse_vs_R": ("method", "R", "rmse", "slice"),
    "rmse_vs_psnr": ("method", "R", "psnr_db", "rmse", "slice"),
    "spectra": ("source", "unfolding", "family", "index", "value"),
    "convergence": ("method", "iteration", "rmse", "chi", "slice"),
}

FIGURE_IDS = tuple(_REQUIRED)


class SchemaError(ValueError):
    """Input CSV is missing, empty, or lacks required columns."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: a figure id, its input CSV(s), and the output path."""

    figure_id: str
    inputs: tuple
    output: str
    title: str = ""

    def __post_init__(self):
        if self.figure_id not in FIGURE_IDS:
            raise ValueError(
                f"unknown figure id {self.figure_id!r}; expected one of {FIGURE_IDS}"
            )
        if isinstance(self.inputs, str):
            object.__setattr__(self, "inputs", (self.inputs,))
        else:
            object.__setattr__(self, "inputs", tuple(self.inputs))
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def _load_rows(path, required):
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames
            rows = list(reader)
    except OSError as err:
        raise SchemaError(f"cannot read {path}: {err}") from err
    if header is None:
        raise SchemaError(f"{path}: empty file, no header row")
    missing = [col for col in required if col not in header]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing} (header: {header})")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _finite(rows, col):
    out = []
    for row in rows:
        try:
            out.append((row, float(row[col])))
        except (ValueError, TypeError):
            continue  # failed cells leave the metric blank; skip them
    return out


def _methods_present(rows):
    seen = [m for m in METHOD_COLORS if any(r["method"] == m for r in rows)]
    if not seen:
        raise SchemaError("no rows with a recognized method (vc/primo/txlr)")
    return seen


def _draw_rmse_vs_r(rows, ax):
    for method in _methods_present(rows):
        pts = _finite([r for r in rows if r["method"] == method], "rmse")
        by_r = {}
        for row, val in pts:
            by_r.setdefault(float(row["R"]), []).append(val)
        if not by_r:
            continue
        rs = sorted(by_r)
        mean = [np.mean(by_r[r]) for r in rs]
        lo = [np.min(by_r[r]) for r in rs]
        hi = [np.max(by_r[r]) for r in rs]
        color = METHOD_COLORS[method]
        ax.plot(rs, mean, "o-", color=color, label=_METHOD_LABELS[method])
        ax.fill_between(rs, lo, hi, color=color, alpha=0.2, linewidth=0)
    ax.set_xlabel("acceleration factor R")
    ax.set_ylabel("RMSE")
    ax.set_yscale("log")
    ax.legend()


def _draw_rmse_vs_psnr(rows, ax):
    markers = ["o", "s", "^", "v", "D", "P"]
    r_values = sorted({float(r["R"]) for r in rows})
    for method in _methods_present(rows):
        color = METHOD_COLORS[method]
        for k, r_val in enumerate(r_values):
            pts = _finite(
                [
                    r
                    for r in rows
                    if r["method"] == method and float(r["R"]) == r_val
                ],
                "rmse",
            )
            if not pts:
                continue
            xs = [float(row["psnr_db"]) for row, _ in pts]
            ys = [val for _, val in pts]
            label = f"{_METHOD_LABELS[method]} R={r_val:g}" if len(r_values) > 1 else _METHOD_LABELS[method]
            ax.scatter(xs, ys, color=color, marker=markers[k % len(markers)],
                       alpha=0.7, label=label)
    ax.set_xlabel("peak SNR (dB)")
    ax.set_ylabel("RMSE")
    ax.set_yscale("log")
    ax.invert_xaxis()  # noise grows to the right
    ax.legend(fontsize="small")


def _draw_spectra(rows, ax):
    families = {r["family"] for r in rows}
    if not families & {"data", "random"}:
        raise SchemaError("spectra CSV has neither 'data' nor 'random' family rows")
    styles = {"data": dict(color="tab:blue"), "random": dict(color="0.5", linestyle="--")}
    seen = set()
    for family in ("data", "random"):
        group = [r for r in rows if r["family"] == family]
        by_curve = {}
        for row, val in _finite(group, "value"):
            by_curve.setdefault((row["source"], row["unfolding"]), []).append(
                (int(row["index"]), val)
            )
        for key, pts in sorted(by_curve.items()):
            pts.sort()
            vals = np.array([v for _, v in pts])
            if vals[0] <= 0:
                continue
            label = family if family not in seen else None
            seen.add(family)
            ax.semilogy(vals / vals[0], label=label, **styles[family])
    ax.set_xlabel("singular value index")
    ax.set_ylabel("normalized singular value")
    ax.legend()


def _draw_convergence(rows, axes):
    ax_rmse, ax_chi = axes
    for method in _methods_present(rows):
        group = [r for r in rows if r["method"] == method]
        color = METHOD_COLORS[method]
        for col, ax in (("rmse", ax_rmse), ("chi", ax_chi)):
            by_it = {}
            for row, val in _finite(group, col):
                by_it.setdefault(int(row["iteration"]), []).append(val)
            if not by_it:
                continue
            its = sorted(by_it)
            ax.semilogy(
                its,
                [np.mean(by_it[i]) for i in its],
                color=color,
                label=_METHOD_LABELS[method],
            )
    ax_rmse.set_ylabel("RMSE")
    ax_chi.set_ylabel("chi-square statistic")
    ax_chi.axhline(1.0, color="0.3", linewidth=0.8, linestyle=":")
    ax_chi.set_xlabel("iteration")
    for ax in axes:
        if ax.get_lines():
            ax.legend(fontsize="small")


def render(spec):
    """Build the matplotlib figure for a spec without writing anything.

    Raises :class:`SchemaError` when an input CSV is empty or lacks the
    figure's required columns; the caller owns closing the returned figure.
    """
    rows = []
    for path in spec.inputs:
        rows.extend(_load_rows(path, _REQUIRED[spec.figure_id]))

    if spec.figure_id == "convergence":
        fig, axes = plt.subplots(2, 1, figsize=(6, 6), sharex=True)
    else:
        fig, ax = plt.subplots(figsize=(6, 4.5))
    try:
        if spec.figure_id == "rmse_vs_R":
            _draw_rmse_vs_r(rows, ax)
        elif spec.figure_id == "rmse_vs_psnr":
            _draw_rmse_vs_psnr(rows, ax)
        elif spec.figure_id == "spectra":
            _draw_spectra(rows, ax)
        else:
            _draw_convergence(rows, axes)
    except Exception:
        plt.close(fig)
        raise
    if spec.title:
        fig.suptitle(spec.title)
    fig.tight_layout()
    return fig


def plot(spec):
    """Render one figure to ``spec.output``; returns the output path.

    Schema problems surface before the output file is touched.
    """
    fig = render(spec)
    try:
        fig.savefig(spec.output, dpi=150, metadata={"Software": "figtools"})
    finally:
        plt.close(fig)
    return spec.output
