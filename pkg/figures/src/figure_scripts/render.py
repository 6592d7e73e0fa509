"""Render the three benchmark figures from their documented CSV schemas.

The upstream sweep tool emits CSV with '#'-prefixed provenance comments and
a fixed header per figure id; this module consumes only those files, so it
carries no dependency on the simulation code.  Rendering is deterministic:
the SVG hash salt and output metadata are pinned, so re-rendering the same
bytes with the same library versions reproduces the file exactly.

Layouts:
  fig4  ancilla counts, semilog-x in 1/eps_add; the adaptive count is a
        horizontal line, the non-iterative count grows logarithmically.
  fig5  query-cost tradeoff, log-log: x is the (rescaled) total query
        count, y is achieved-RMSE x queries.  Non-iterative dots share a
        color per eps_add; the adaptive guarantee is a flat line.
  fig6  Grover-availability thresholds q* against N, semilog-x in N, one
        curve per observable-count law plus horizontal q_max markers.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

__all__ = ["FigureSpec", "SchemaError", "render", "SCHEMAS"]

SCHEMAS = {
    "fig4": ["eps_add", "adaptive_qubits", "baseline_qubits"],
    "fig5": ["method", "eps_add", "delta", "n_med", "t_queries", "t_rescaled", "rmse_worst", "rmse_avg"],
    "fig6": ["n_qubits", "m_law", "m_value", "q_star"],
}

# grayscale-legible palette; the exact colors are not a contract
_MARKERS = ["o", "s", "D", "^", "v", "P", "X", "*", "<", ">", "p", "h"]


class SchemaError(Exception):
    """CSV header or body does not match the figure's documented schema."""


@dataclass(frozen=True)
class FigureSpec:
    csv_path: str
    figure_id: str
    output_path: str
    dpi: int = 150
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure_id not in SCHEMAS:
            raise SchemaError(f"unknown figure id {self.figure_id!r}")


def _read_rows(spec: FigureSpec) -> list:
    path = Path(spec.csv_path)
    if not path.exists():
        raise SchemaError(f"{spec.csv_path}: no such file")
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise SchemaError(f"{spec.csv_path}: no header row")
    header, body = rows[0], rows[1:]
    if header != SCHEMAS[spec.figure_id]:
        raise SchemaError(
            f"{spec.csv_path}: header {header} does not match the "
            f"{spec.figure_id} schema {SCHEMAS[spec.figure_id]}"
        )
    if not body:
        raise SchemaError(f"{spec.csv_path}: empty body")
    return body


def _render_fig4(body: list, ax) -> None:
    pts = sorted((1.0 / float(r[0]), int(r[1]), int(r[2])) for r in body)
    inv_eps = [p[0] for p in pts]
    ax.semilogx(inv_eps, [p[1] for p in pts], "-", color="tab:orange", label="adaptive")
    ax.semilogx(inv_eps, [p[2] for p in pts], "s--", color="tab:blue", label="non-iterative")
    ax.set_xlabel(r"$1/\varepsilon_{\mathrm{add}}$")
    ax.set_ylabel("ancilla qubits")
    ax.legend()


def _render_fig5(body: list, ax) -> None:
    noniter = {}
    for r in body:
        if r[0] != "noniter":
            continue
        eps_add = float(r[1])
        t_resc, worst = float(r[5]), float(r[6])
        noniter.setdefault(eps_add, []).append((t_resc, worst * t_resc))
    adapt = [(float(r[4]), float(r[1]) * float(r[4])) for r in body if r[0] == "adapt"]
    if not noniter and not adapt:
        raise SchemaError("fig5 body has neither 'adapt' nor 'noniter' rows")
    cmap = plt.get_cmap("viridis")
    keys = sorted(noniter, reverse=True)
    for i, eps_add in enumerate(keys):
        pts = sorted(noniter[eps_add])
        color = cmap(i / max(1, len(keys) - 1))
        exp = math.log2(eps_add)
        label = rf"$\varepsilon_{{\mathrm{{add}}}}=2^{{{exp:.0f}}}$" if i % 4 == 0 else None
        ax.loglog([p[0] for p in pts], [p[1] for p in pts],
                  _MARKERS[i % len(_MARKERS)], color=color, ms=4, label=label)
    if adapt:
        pts = sorted(adapt)
        ax.loglog([p[0] for p in pts], [p[1] for p in pts], "-", lw=2,
                  color="tab:orange", label="adaptive bound")
    ax.set_xlabel("total queries")
    ax.set_ylabel(r"RMSE $\times$ queries")
    ax.legend(fontsize=7)


def _render_fig6(body: list, ax) -> None:
    curves = {}
    markers = []
    for r in body:
        if r[1].startswith("qmax"):
            markers.append((r[1], float(r[3])))
        else:
            curves.setdefault(r[1], []).append((int(r[0]), float(r[3])))
    if not curves:
        raise SchemaError("fig6 body has no threshold curves")
    for i, (law, pts) in enumerate(sorted(curves.items())):
        pts = sorted(pts)
        ax.semilogx([p[0] for p in pts], [p[1] for p in pts],
                    _MARKERS[i % len(_MARKERS)] + "-", ms=4, label=law)
    for name, q in markers:
        ax.axhline(q, ls=":", color="gray", lw=1)
        ax.annotate(name.replace("qmax", r"$q_{\max}$"), xy=(1.02, q),
                    xycoords=("axes fraction", "data"), fontsize=6, va="center")
    ax.set_xlabel(r"target-system qubits $N$")
    ax.set_ylabel(r"threshold $q^{*}$")
    ax.legend(fontsize=8)


_RENDERERS = {"fig4": _render_fig4, "fig5": _render_fig5, "fig6": _render_fig6}


def render(spec: FigureSpec) -> str:
    """Validate the CSV against the figure schema and write the image.

    Returns the output path.  Raises SchemaError (and writes nothing) on
    header mismatch, empty body, or malformed rows.
    """
    body = _read_rows(spec)
    plt.rcParams["svg.hashsalt"] = "figure-scripts"
    fig, ax = plt.subplots(figsize=(5.0, 3.4), constrained_layout=True)
    try:
        try:
            _RENDERERS[spec.figure_id](body, ax)
        except (ValueError, IndexError) as exc:
            raise SchemaError(f"{spec.csv_path}: malformed row ({exc})") from exc
        fig.savefig(spec.output_path, dpi=spec.dpi, metadata=_metadata_for(spec.output_path))
    finally:
        plt.close(fig)
    return spec.output_path


def _metadata_for(path: str) -> dict | None:
    # pin volatile metadata so identical inputs give identical bytes
    suffix = Path(path).suffix.lower()
    if suffix == ".svg":
        return {"Date": None}
    if suffix == ".png":
        return {"Software": None}
    return None
