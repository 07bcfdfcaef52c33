"""Parameter-sweep engine: grid expansion, execution, CSV and manifest output.

A sweep spec is a flat JSON document (see ``data/table1.spec`` for the
bundled study grid):

    {
      "rho2": [0.01, 0.5, 0.9],
      "sn1":  [1.0],
      "sn2":  [0.1, 0.5],
      "ss1":  [0.1, 0.5, 1.0],
      "ss2_rules": ["ss1/sn2", "ss1/(10*sn2)"],
      "power": {"min": 0.01, "max": 100, "points": 20, "spacing": "log"},
      "mode": "paper_literal",
      "with_part_b": false,
      "seed": 42,
      "allow_nondegraded": false,
      "quadrature": {"abs_tol": 1e-9}
    }

``ss2_rules`` entries are either numbers or arithmetic expressions over
``ss1, sn1, sn2, rho2`` (operators + - * / ** and parentheses only).  Rows
are emitted in lexicographic grid order (rho2, sn1, sn2, ss1, rule, power),
identically for serial and parallel execution.  The CSV is byte-reproducible
for a fixed spec: the wall-time column is written as 0 unless timings are
explicitly requested (real per-row timings always go to the manifest when
measured).
"""

from __future__ import annotations

import ast
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import __version__
from .errors import DomainError, NumericalError
from .fading import ChannelParams
from .quadrature import QuadratureConfig
from .rates import PART_C_MODES, compute_rates

CSV_HEADER = ("rho2,sn1,sn2,ss1,ss2,power,part_a,part_b,part_b_ub,r_beta,"
              "r_alpha,r_alpha_ub,achievable,achievable_ub,status,err_est,ms")

_NUMERIC_FIELDS = ("part_a", "part_b", "part_b_ub", "r_beta", "r_alpha",
                   "r_alpha_ub", "achievable", "achievable_ub")


class SpecError(ValueError):
    """Malformed sweep spec or selector; maps to usage exit code 64."""


# ---------------------------------------------------------------------------
# spec parsing
# ---------------------------------------------------------------------------

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


def eval_rule(expr, env: dict) -> float:
    """Evaluate an ss2 rule: a number, or arithmetic over ss1/sn1/sn2/rho2."""
    if isinstance(expr, (int, float)):
        return float(expr)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id in env:
                return env[node.id]
            raise SpecError(f"unknown name {node.id!r} in ss2 rule {expr!r}")
        if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
            lhs, rhs = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return lhs + rhs
            if isinstance(node.op, ast.Sub):
                return lhs - rhs
            if isinstance(node.op, ast.Mult):
                return lhs * rhs
            if isinstance(node.op, ast.Pow):
                return lhs ** rhs
            if rhs == 0:
                raise SpecError(f"division by zero in ss2 rule {expr!r}")
            return lhs / rhs
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
            return -ev(node.operand)
        raise SpecError(f"unsupported construct in ss2 rule {expr!r}")

    try:
        tree = ast.parse(str(expr), mode="eval")
    except SyntaxError as exc:
        raise SpecError(f"cannot parse ss2 rule {expr!r}: {exc}") from None
    return ev(tree)


@dataclass(frozen=True)
class PowerAxis:
    min: float
    max: float
    points: int
    spacing: str = "log"

    def __post_init__(self):
        if self.points < 1 or self.min <= 0 or self.max < self.min:
            raise SpecError("power axis must have points >= 1 and 0 < min <= max")
        if self.spacing not in ("log", "linear"):
            raise SpecError(f"power spacing must be log or linear, got {self.spacing!r}")

    def values(self) -> list[float]:
        if self.points == 1:
            return [self.min]
        if self.spacing == "linear":
            step = (self.max - self.min) / (self.points - 1)
            return [self.min + i * step for i in range(self.points)]
        ratio = (self.max / self.min) ** (1.0 / (self.points - 1))
        return [self.min * ratio ** i for i in range(self.points)]


@dataclass
class SweepSpec:
    rho2: list[float]
    sn1: list[float]
    sn2: list[float]
    ss1: list[float]
    ss2_rules: list
    power: PowerAxis
    mode: str = "paper_literal"
    with_part_b: bool = False
    seed: int = 42
    allow_nondegraded: bool = False
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        for name in ("rho2", "sn1", "sn2", "ss1", "ss2_rules"):
            axis = getattr(self, name)
            if not isinstance(axis, (list, tuple)) or len(axis) == 0:
                raise SpecError(f"sweep axis {name!r} must be a nonempty list")
        if self.mode not in PART_C_MODES:
            raise SpecError(f"mode must be one of {PART_C_MODES}, got {self.mode!r}")

    @classmethod
    def from_dict(cls, raw: dict) -> "SweepSpec":
        if not isinstance(raw, dict):
            raise SpecError("sweep spec must be a JSON object")
        known = {"rho2", "sn1", "sn2", "ss1", "ss2_rules", "power", "mode",
                 "with_part_b", "seed", "allow_nondegraded", "quadrature"}
        unknown = set(raw) - known
        if unknown:
            raise SpecError(f"unknown sweep spec keys: {sorted(unknown)}")
        try:
            power = PowerAxis(**raw["power"])
        except (KeyError, TypeError) as exc:
            raise SpecError(f"bad or missing power axis: {exc}") from None
        quad = QuadratureConfig(**raw.get("quadrature", {}))
        try:
            return cls(rho2=list(raw["rho2"]), sn1=list(raw["sn1"]),
                       sn2=list(raw["sn2"]), ss1=list(raw["ss1"]),
                       ss2_rules=list(raw["ss2_rules"]), power=power,
                       mode=raw.get("mode", "paper_literal"),
                       with_part_b=bool(raw.get("with_part_b", False)),
                       seed=int(raw.get("seed", 42)),
                       allow_nondegraded=bool(raw.get("allow_nondegraded", False)),
                       quadrature=quad)
        except KeyError as exc:
            raise SpecError(f"missing sweep spec key: {exc}") from None

    @classmethod
    def from_file(cls, path: str) -> "SweepSpec":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read sweep spec {path!r}: {exc}") from None
        return cls.from_dict(raw)

    def resolved(self) -> dict:
        """Fully expanded spec for the manifest (reproducibility record)."""
        d = {"rho2": self.rho2, "sn1": self.sn1, "sn2": self.sn2,
             "ss1": self.ss1, "ss2_rules": [str(r) for r in self.ss2_rules],
             "power": asdict(self.power),
             "power_values": self.power.values(),
             "mode": self.mode, "with_part_b": self.with_part_b,
             "seed": self.seed, "allow_nondegraded": self.allow_nondegraded,
             "quadrature": asdict(self.quadrature)}
        return d


@dataclass(frozen=True)
class SweepPoint:
    index: int
    rho2: float
    sn1: float
    sn2: float
    ss1: float
    ss2: float
    power: float


def expand_grid(spec: SweepSpec) -> list[SweepPoint]:
    """Deterministic lexicographic expansion of the sweep grid."""
    points = []
    idx = 0
    for rho2 in spec.rho2:
        for sn1 in spec.sn1:
            for sn2 in spec.sn2:
                for ss1 in spec.ss1:
                    env = {"ss1": ss1, "sn1": sn1, "sn2": sn2, "rho2": rho2}
                    for rule in spec.ss2_rules:
                        ss2 = eval_rule(rule, env)
                        for power in spec.power.values():
                            points.append(SweepPoint(idx, rho2, sn1, sn2,
                                                     ss1, ss2, power))
                            idx += 1
    if not points:
        raise SpecError("sweep grid is empty")
    return points


def table1_spec(power: PowerAxis | None = None, with_part_b: bool = False) -> SweepSpec:
    """The bundled study grid: 36 parameter sets (3 rho2 x 2 sn2 x 3 ss1 x 2 ss2)."""
    return SweepSpec(
        rho2=[0.01, 0.50, 0.90], sn1=[1.0], sn2=[0.10, 0.50],
        ss1=[0.10, 0.50, 1.00], ss2_rules=["ss1/sn2", "ss1/(10*sn2)"],
        power=power or PowerAxis(0.01, 100.0, 20, "log"),
        with_part_b=with_part_b)


def table1_channel_params(power: float) -> list[ChannelParams]:
    """The 36 study configurations at a single transmit power."""
    spec = table1_spec(PowerAxis(power, power, 1))
    return [ChannelParams.from_values(ss1=pt.ss1, ss2=pt.ss2, rho2=pt.rho2,
                                      sn1=pt.sn1, sn2=pt.sn2, power=pt.power)
            for pt in expand_grid(spec)]


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

def _run_point(args) -> dict:
    point, mode, with_part_b, allow_nondegraded, quad = args
    row = {"rho2": point.rho2, "sn1": point.sn1, "sn2": point.sn2,
           "ss1": point.ss1, "ss2": point.ss2, "power": point.power,
           "index": point.index, "status": "ok", "err_est": float("nan"),
           "ms": 0.0}
    for name in _NUMERIC_FIELDS:
        row[name] = float("nan")
    start = time.perf_counter()
    try:
        c = ChannelParams.from_values(ss1=point.ss1, ss2=point.ss2,
                                      rho2=point.rho2, sn1=point.sn1,
                                      sn2=point.sn2, power=point.power)
        breakdown = compute_rates(c, cfg=quad, mode=mode,
                                  with_part_b=with_part_b,
                                  allow_nondegraded=allow_nondegraded)
        for name in _NUMERIC_FIELDS:
            val = getattr(breakdown, name)
            row[name] = float("nan") if val is None else val
        row["err_est"] = breakdown.err_est
    except (DomainError, NumericalError, ValueError) as exc:
        row["status"] = f"error:{type(exc).__name__}:{exc}".replace(",", ";")
    row["ms"] = (time.perf_counter() - start) * 1000.0
    return row


def max_workers(requested: int | None, n_rows: int) -> int:
    cap = os.environ.get("ISAC_RATES_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    want = requested if requested and requested > 0 else limit
    return max(1, min(want, limit, n_rows))


def run_sweep(spec: SweepSpec, parallelism: int | None = None) -> list[dict]:
    """Execute every grid point; rows come back in grid order regardless of
    the worker pool."""
    points = expand_grid(spec)
    tasks = [(pt, spec.mode, spec.with_part_b, spec.allow_nondegraded,
              spec.quadrature) for pt in points]
    workers = max_workers(parallelism, len(points))
    if workers == 1:
        rows = [_run_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_point, tasks, chunksize=1))
    rows.sort(key=lambda r: r["index"])
    return rows


def _fmt(value: float) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    return repr(float(value))


def format_csv(rows: list[dict], timings: bool = False) -> str:
    """Render rows as the fixed, versioned CSV schema.

    The ``ms`` column is 0 unless ``timings`` is set: wall time is
    nondeterministic and would break the byte-reproducibility contract of the
    default output (measured timings are still recorded in the manifest).
    """
    lines = [CSV_HEADER]
    for r in rows:
        ms = str(int(round(r["ms"]))) if timings else "0"
        lines.append(",".join([
            _fmt(r["rho2"]), _fmt(r["sn1"]), _fmt(r["sn2"]), _fmt(r["ss1"]),
            _fmt(r["ss2"]), _fmt(r["power"]), _fmt(r["part_a"]),
            _fmt(r["part_b"]), _fmt(r["part_b_ub"]), _fmt(r["r_beta"]),
            _fmt(r["r_alpha"]), _fmt(r["r_alpha_ub"]), _fmt(r["achievable"]),
            _fmt(r["achievable_ub"]), r["status"], _fmt(r["err_est"]), ms,
        ]))
    return "\n".join(lines) + "\n"


def build_manifest(spec: SweepSpec, rows: list[dict]) -> dict:
    failures = [r["index"] for r in rows if r["status"] != "ok"]
    return {
        "tool": "isac-rates",
        "version": __version__,
        "csv_header": CSV_HEADER,
        "spec": spec.resolved(),
        "row_count": len(rows),
        "failed_rows": failures,
        "timings_ms": {str(r["index"]): round(r["ms"], 3) for r in rows},
    }


def write_sweep_outputs(spec: SweepSpec, rows: list[dict], out_csv: str,
                        timings: bool = False) -> str:
    """Write the CSV and its companion manifest; returns the manifest path."""
    with open(out_csv, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_csv(rows, timings=timings))
    manifest_path = out_csv + ".manifest.json"
    with open(manifest_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(build_manifest(spec, rows), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest_path


def parse_csv(path: str) -> list[dict]:
    """Read a sweep CSV back into row dicts (numbers parsed as floats)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise SpecError(f"unrecognized sweep CSV header in {path!r}")
        names = header.split(",")
        rows = []
        for line in fh:
            parts = line.rstrip("\n").split(",")
            row = {}
            for name, part in zip(names, parts):
                row[name] = part if name == "status" else float(part)
            rows.append(row)
    return rows
