"""Figure-matrix emission from sweep results: per-subfigure CSVs and PNGs.

One subfigure is one (rho2, ss1, sn2) cell: rate curves over transmit power,
with one line triplet (r_alpha, r_alpha_ub, r_beta) per ss2 value.  The CSV
side is the data contract; PNG rendering sits on top of the same grouping.
"""

from __future__ import annotations

import math
from collections import OrderedDict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .errors import DomainError  # noqa: E402

_SERIES_FIELDS = ("r_alpha", "r_alpha_ub", "r_beta")


def _close(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-12)


def group_subfigures(rows: list[dict], rho2=None, ss1=None, sn2=None) -> OrderedDict:
    """Group sweep rows into subfigure cells, optionally filtered.

    Returns an ordered mapping (rho2, sn1, ss1, sn2) -> {ss2 -> [rows]} with
    deterministic ordering inherited from the sweep.  Raises DomainError when
    a filter matches nothing (CLI exit code 2).
    """
    groups: OrderedDict = OrderedDict()
    for row in rows:
        if row["status"] != "ok":
            continue
        if rho2 is not None and not any(_close(row["rho2"], v) for v in rho2):
            continue
        if ss1 is not None and not any(_close(row["ss1"], v) for v in ss1):
            continue
        if sn2 is not None and not any(_close(row["sn2"], v) for v in sn2):
            continue
        key = (row["rho2"], row["sn1"], row["ss1"], row["sn2"])
        groups.setdefault(key, OrderedDict())
        series = groups[key]
        ss2_key = None
        for existing in series:
            if _close(existing, row["ss2"]):
                ss2_key = existing
                break
        if ss2_key is None:
            ss2_key = row["ss2"]
            series[ss2_key] = []
        series[ss2_key].append(row)
    if not groups:
        raise DomainError("selector matched no sweep rows")
    return groups


def _num(v: float) -> str:
    return f"{v:g}"


def subfigure_name(key, multi_sn1: bool) -> str:
    rho2, sn1, ss1, sn2 = key
    name = f"fig_rho2-{_num(rho2)}_ss1-{_num(ss1)}_sn2-{_num(sn2)}"
    if multi_sn1:
        name += f"_sn1-{_num(sn1)}"
    return name


def subfigure_csv(series: OrderedDict) -> str:
    """Wide per-subfigure CSV: P first, then rate columns per ss2 series."""
    ss2_values = list(series)
    header = ["power"]
    for ss2 in ss2_values:
        for fld in _SERIES_FIELDS:
            header.append(f"{fld}[ss2={_num(ss2)}]")
    powers = sorted({row["power"] for rows in series.values() for row in rows})
    lines = [",".join(header)]
    for p in powers:
        cells = [repr(float(p))]
        for ss2 in ss2_values:
            match = [r for r in series[ss2] if _close(r["power"], p)]
            for fld in _SERIES_FIELDS:
                cells.append(repr(float(match[0][fld])) if match else "nan")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_subfigure(path_png: str, key, series: OrderedDict) -> None:
    """Render one subfigure: rates over power, one line style per term."""
    rho2, sn1, ss1, sn2 = key
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    colors = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for i, (ss2, rows) in enumerate(series.items()):
        rows = sorted(rows, key=lambda r: r["power"])
        p = [r["power"] for r in rows]
        color = colors[i % len(colors)]
        alpha = [r["r_alpha"] for r in rows]
        if any(not math.isnan(v) for v in alpha):
            ax.plot(p, alpha, "-", color=color,
                    label=f"$R_\\alpha$ (ss2={_num(ss2)})")
        ax.plot(p, [r["r_alpha_ub"] for r in rows], "--", color=color,
                label=f"$R_{{\\alpha,ub}}$ (ss2={_num(ss2)})")
    first = next(iter(series.values()))
    rows = sorted(first, key=lambda r: r["power"])
    ax.plot([r["power"] for r in rows], [r["r_beta"] for r in rows],
            ":", color="black", label="$R_\\beta$")
    ax.set_xscale("log")
    ax.set_xlabel("transmit power P")
    ax.set_ylabel("rate [bits/channel use]")
    ax.set_title(f"rho2={_num(rho2)}, ss1={_num(ss1)}, "
                 f"sn2={_num(sn2)}, sn1={_num(sn1)}")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path_png, dpi=150)
    plt.close(fig)
