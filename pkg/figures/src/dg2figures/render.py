"""Render the bundled figure set from dg2 CSV exports.

Three figure kinds: the two-panel moduli diagram from scan CSVs (t,branch,r),
and surface / level-set panels from grid CSVs (x,y,F).  The renderer never
computes mathematics; every plotted value comes from the input files.
Rendering is deterministic: fixed backend, sizes, colormap, contour levels,
and a fixed SVG hash salt, so identical CSV input yields identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "dg2figures"

GRID_HEADER = ["x", "y", "F"]
SCAN_HEADER = ["t", "branch", "r"]
KINDS = ("moduli-panels", "surface", "levelset")

CONTOUR_LEVELS = 15
COLORMAP = "viridis"
PANEL_SIZE = (4.8, 3.9)
DPI = 110
BRANCH_STYLE = {
    "sphere": {"color": "tab:blue", "linestyle": "-"},
    "point_pair": {"color": "tab:blue", "linestyle": "--"},
    "circle": {"color": "tab:green", "linestyle": "-"},
}
PNG_METADATA = {"Software": "dg2figures"}
SVG_METADATA = {"Date": None}


class SchemaError(ValueError):
    """Input CSV header does not match the expected schema."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[str, ...]
    output: str
    panels: tuple[dict, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("figure needs at least one input CSV")

    @classmethod
    def from_dict(cls, raw: dict) -> "FigureSpec":
        return cls(
            kind=raw["kind"],
            inputs=tuple(raw["inputs"]),
            output=raw["output"],
            panels=tuple(raw.get("panels", ())),
        )

    def panel_label(self, index: int) -> str:
        if index < len(self.panels):
            return self.panels[index].get("label", "")
        return ""


def _read_rows(path: Path, expected_header: list[str]) -> list[list[str]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != expected_header:
            raise SchemaError(
                f"{path}: expected header {','.join(expected_header)!r}, "
                f"got {','.join(header) if header else '<empty>'!r}"
            )
        return [row for row in reader if row]


def load_scan(path: Path) -> dict[str, tuple[list[float], list[float]]]:
    branches: dict[str, tuple[list[float], list[float]]] = {}
    for t, branch, r in _read_rows(path, SCAN_HEADER):
        ts, rs = branches.setdefault(branch, ([], []))
        ts.append(float(t))
        rs.append(float(r))
    return branches


def load_grid(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows = _read_rows(path, GRID_HEADER)
    xs = sorted({float(r[0]) for r in rows})
    ys = sorted({float(r[1]) for r in rows})
    value = {(float(r[0]), float(r[1])): float(r[2]) for r in rows}
    if len(value) != len(xs) * len(ys):
        raise SchemaError(f"{path}: rows do not form a full grid")
    zz = np.array([[value[(x, y)] for x in xs] for y in ys])
    xx, yy = np.meshgrid(np.array(xs), np.array(ys))
    return xx, yy, zz


def _new_figure(n_panels: int, three_d: bool):
    fig = plt.figure(
        figsize=(PANEL_SIZE[0] * n_panels, PANEL_SIZE[1]), dpi=DPI
    )
    axes = []
    for i in range(n_panels):
        if three_d:
            axes.append(fig.add_subplot(1, n_panels, i + 1, projection="3d"))
        else:
            axes.append(fig.add_subplot(1, n_panels, i + 1))
    return fig, axes


def _render_moduli(spec: FigureSpec, base: Path):
    fig, axes = _new_figure(len(spec.inputs), three_d=False)
    for i, (ax, input_path) in enumerate(zip(axes, spec.inputs)):
        branches = load_scan(base / input_path)
        t_max = max((max(ts) for ts, _ in branches.values()), default=1.0)
        for branch in ("sphere", "circle", "point_pair"):
            if branch in branches:
                ts, rs = branches[branch]
                ax.plot(ts, rs, label=branch, **BRANCH_STYLE[branch])
        ax.plot([0.0, t_max], [0.0, 0.0], color="tab:red", label="trivial")
        ax.set_xlabel("t")
        ax.set_ylabel("r")
        ax.set_title(spec.panel_label(i))
        ax.legend(loc="upper right")
    fig.tight_layout()
    return fig


def _render_surface(spec: FigureSpec, base: Path):
    fig, axes = _new_figure(len(spec.inputs), three_d=True)
    for i, (ax, input_path) in enumerate(zip(axes, spec.inputs)):
        xx, yy, zz = load_grid(base / input_path)
        ax.plot_surface(xx, yy, zz, cmap=COLORMAP, linewidth=0)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title(spec.panel_label(i))
    fig.tight_layout()
    return fig


def _render_levelset(spec: FigureSpec, base: Path):
    fig, axes = _new_figure(len(spec.inputs), three_d=False)
    for i, (ax, input_path) in enumerate(zip(axes, spec.inputs)):
        xx, yy, zz = load_grid(base / input_path)
        levels = np.linspace(zz.min(), zz.max(), CONTOUR_LEVELS)
        contours = ax.contour(xx, yy, zz, levels=levels, cmap=COLORMAP)
        ax.clabel(contours, inline=True, fontsize=6, fmt="%.3f")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
        ax.set_title(spec.panel_label(i))
    fig.tight_layout()
    return fig


def render(spec: FigureSpec, base_dir: str | Path = ".") -> tuple:
    """Render one figure and write PNG and SVG next to the output base path.

    Returns (figure, [written paths]).  The output path may carry a .png or
    .svg suffix; both formats are always written from the common stem.
    """
    base = Path(base_dir)
    if spec.kind == "moduli-panels":
        fig = _render_moduli(spec, base)
    elif spec.kind == "surface":
        fig = _render_surface(spec, base)
    else:
        fig = _render_levelset(spec, base)
    out = base / spec.output
    if out.suffix in (".png", ".svg"):
        out = out.with_suffix("")
    out.parent.mkdir(parents=True, exist_ok=True)
    png = out.with_suffix(".png")
    svg = out.with_suffix(".svg")
    fig.savefig(png, metadata=PNG_METADATA)
    fig.savefig(svg, metadata=SVG_METADATA)
    return fig, [png, svg]


def load_config(path: str | Path) -> list[FigureSpec]:
    raw = json.loads(Path(path).read_text())
    return [FigureSpec.from_dict(entry) for entry in raw["figures"]]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figures",
        description="Render figures from dg2 CSV exports per a JSON config.",
    )
    parser.add_argument("config", help="JSON file listing figure specs")
    args = parser.parse_args(argv)
    config_path = Path(args.config)
    try:
        specs = load_config(config_path)
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return 2
    base = config_path.parent
    status = 0
    for spec in specs:
        try:
            fig, written = render(spec, base)
        except SchemaError as exc:
            print(f"error: {exc}", file=sys.stderr)
            status = 1
            continue
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            status = 1
            continue
        plt.close(fig)
        for path in written:
            print(path)
    return status


if __name__ == "__main__":
    sys.exit(main())
