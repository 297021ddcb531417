"""Command-line front end: ``g2c solve | verify | sweep | compact-demo | special``.

Exit codes: 0 success, 1 a check failed, 2 bad configuration or usage,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from . import __version__
from .analytic import bryant_salamon, cone_family, symmetric_solution
from .exterior import d
from .ode import CYCLIC, CoclosedSystem, InvariantViolation, NumericalFailure, SeriesError, solve
from .scalar import leaf, odd_polynomial
from .structures import ProfileSet, build_g2
from .verify import (
    SCHEMA_VERSION,
    CheckResult,
    VerificationReport,
    thread_count,
    compact_obstruction_demo,
    coclosed_residual,
    run_checks,
    verify_profiles,
    verify_solution,
)

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
COLUMNS = ("t", "A1", "A2", "A3", "B1", "B2", "B3", "D1", "D2", "D3", "res_dpsi")
PROFILE_KINDS = ("odd_poly", "cone", "sine", "symmetric", "bryant_salamon")


class ConfigError(ValueError):
    pass


# -- configuration -------------------------------------------------------------


@dataclass
class RunConfig:
    profile: dict
    b0: float = 1.0
    t_max: float = 2.0
    points: int = 201
    t_switch: float = 1e-2
    series_order: int = 8
    ode_rel: float = 1e-10
    ode_abs: float = 1e-12
    verify_tol: float = 1e-7
    out_dir: Path = Path(".")
    stem: str = "run"
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, raw: dict, base: Path = Path(".")) -> RunConfig:
        raw = copy.deepcopy(raw)
        profile = raw.pop("profile", {"kind": "cone"})
        if isinstance(profile, str):
            profile = {"kind": profile}
        grid = raw.pop("grid", {})
        tol = raw.pop("tolerances", {})
        outputs = raw.pop("outputs", {})
        b0 = raw.pop("b0", 1.0)
        cfg = cls(
            profile=dict(profile),
            b0=_num(b0, "b0"),
            t_max=_num(grid.get("t_max", 2.0), "grid.t_max"),
            points=int(grid.get("points", 201)),
            t_switch=_num(grid.get("t_switch", 1e-2), "grid.t_switch"),
            series_order=int(grid.get("series_order", 8)),
            ode_rel=_num(tol.get("ode_rel", 1e-10), "tolerances.ode_rel"),
            ode_abs=_num(tol.get("ode_abs", 1e-12), "tolerances.ode_abs"),
            verify_tol=_num(tol.get("verify", 1e-7), "tolerances.verify"),
            out_dir=base / outputs.get("dir", "."),
            stem=str(outputs.get("stem", "run")),
            extra=raw,
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        kind = self.profile.get("kind")
        if kind not in PROFILE_KINDS:
            raise ConfigError(f"profile.kind must be one of {', '.join(PROFILE_KINDS)} (got {kind!r})")
        if kind != "bryant_salamon" and (self.b0 == 0 or not math.isfinite(self.b0)):
            raise ConfigError("b0 must be nonzero")
        if not self.t_max > self.t_switch > 0:
            raise ConfigError("need t_max > t_switch > 0")
        if self.points < 2:
            raise ConfigError("grid.points must be at least 2")
        if self.series_order < 2:
            raise ConfigError("grid.series_order must be at least 2")
        if kind == "odd_poly":
            coeffs = self.profile.get("coeffs")
            if not isinstance(coeffs, list) or len(coeffs) != 3:
                raise ConfigError("odd_poly needs profile.coeffs: three lists of odd coefficients")
            for i, c in enumerate(coeffs):
                if not c or abs(float(c[0]) - 0.5) > 1e-12:
                    raise ConfigError(f"A_{i + 1} must have leading coefficient 1/2 (smooth extension)")
        if kind == "symmetric":
            c = self.profile.get("A1", [0.5])
            if not c or abs(float(c[0]) - 0.5) > 1e-12:
                raise ConfigError("A1 must have leading coefficient 1/2 (smooth extension)")
        if kind == "sine":
            L = float(self.profile.get("L", 1.0))
            if not L > 0:
                raise ConfigError("sine profile needs L > 0")
            if self.t_max >= L:
                raise ConfigError(f"t_max must be below L={L}")

    def canonical(self) -> dict:
        """The fields that determine the numbers (paths excluded)."""
        return {
            "profile": self.profile,
            "b0": self.b0,
            "grid": {"t_max": self.t_max, "points": self.points,
                     "t_switch": self.t_switch, "series_order": self.series_order},
            "tolerances": {"ode_rel": self.ode_rel, "ode_abs": self.ode_abs, "verify": self.verify_tol},
        }

    def digest(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.points)


def _num(x: Any, name: str) -> float:
    try:
        v = float(x)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a number (got {x!r})") from None
    if math.isnan(v):
        raise ConfigError(f"{name} must not be NaN")
    return v


def load_config(args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    base = Path(".")
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            raw = json.loads(path.read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        base = path.parent
    if getattr(args, "profile", None):
        raw["profile"] = {"kind": args.profile}
    if getattr(args, "b0", None) is not None:
        raw["b0"] = args.b0
    if getattr(args, "t_max", None) is not None:
        raw.setdefault("grid", {})["t_max"] = args.t_max
    if getattr(args, "tol", None) is not None:
        raw.setdefault("tolerances", {})["verify"] = args.tol
    cfg = RunConfig.from_dict(raw, base)
    if getattr(args, "out", None):
        cfg.out_dir = Path(args.out)
    return cfg


# -- pipelines -------------------------------------------------------------------


@dataclass
class RunResult:
    config: RunConfig
    profiles: ProfileSet
    table: np.ndarray  # (11, n)
    sidecar: dict
    solution: object = None


def build_system(cfg: RunConfig) -> CoclosedSystem:
    kind = cfg.profile["kind"]
    if kind == "odd_poly":
        return CoclosedSystem.from_odd_poly(cfg.profile["coeffs"], cfg.b0)
    if kind == "cone":
        return CoclosedSystem.from_odd_poly([[0.5]] * 3, cfg.b0)
    if kind == "sine":
        return CoclosedSystem.sine_profile(cfg.b0, float(cfg.profile.get("L", 1.0)))
    raise ConfigError(f"profile kind {kind!r} is not driven by the ODE solver")


def residual_column(p: ProfileSet, t: np.ndarray) -> np.ndarray:
    """Pointwise relative ``d psi``; undefined (nan) on the singular orbit."""
    out = np.full(t.shape, np.nan)
    pos = t > 0
    if pos.any():
        g = build_g2(p)
        tp = t[pos]
        num = d(g.psi).max_abs(tp)
        out[pos] = num / np.maximum(g.psi.max_abs(tp), 1e-300)
    return out


def _table(p: ProfileSet, t: np.ndarray, D: np.ndarray | None = None) -> np.ndarray:
    A, B = p.values(t)
    if D is None:
        D = np.stack([A[j] * B[j] * A[k] * B[k] for _, j, k in CYCLIC])
    return np.vstack([t, A, B, D, residual_column(p, t)])


def execute(cfg: RunConfig) -> RunResult:
    kind = cfg.profile["kind"]
    t = cfg.grid
    side: dict = {"profile_kind": kind}
    sol = None
    if kind in ("odd_poly", "cone", "sine"):
        sys_ = build_system(cfg)
        sol = solve(sys_, grid=t, t_switch=cfg.t_switch, order=cfg.series_order,
                    rtol=cfg.ode_rel, atol=cfg.ode_abs)
        p = sol.profiles()
        table = _table(p, t, sol.D)
        boot = sol.bootstrap
        side["bootstrap"] = {
            "a3": list(sys_.a3),
            "d4": [float(x) for x in boot.d4],
            "d4_exact": [str(x) for x in boot.d4],
            "b2": [float(x) for x in boot.b2()],
        }
        side["diagnostics"] = dict(sol.diagnostics)
    elif kind == "symmetric":
        A1 = odd_polynomial(cfg.profile.get("A1", [0.5]), tag="A1")
        fam = symmetric_solution(A1, cfg.b0, t)
        p = fam.profiles()
        D = np.broadcast_to(fam.D_at(t), (3, t.size))
        table = _table(p, t, D)
    else:
        r_max = float(cfg.profile.get("r_max", 1e3))
        bs = bryant_salamon(np.geomspace(1.0, r_max, int(cfg.profile.get("r_points", 2000))))
        if cfg.t_max > bs.t_max:
            raise ConfigError(f"t_max={cfg.t_max} exceeds the tabulated range {bs.t_max:.6g}; raise r_max")
        p = bs.profiles()
        table = _table(p, t)
    return RunResult(cfg, p, table, side, sol)


# -- files -----------------------------------------------------------------------------


def _atomic_write(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_table(table: np.ndarray, digest: str) -> str:
    buf = io.StringIO()
    buf.write(f"# g2coclosed {__version__} config_sha256={digest}\n")
    buf.write(",".join(COLUMNS) + "\n")
    for row in table.T:
        buf.write(",".join(repr(float(x)) for x in row) + "\n")
    return buf.getvalue()


def read_table(path: Path) -> tuple[dict, np.ndarray, list[str]]:
    lines = Path(path).read_text().splitlines()
    meta: dict = {}
    body = []
    for ln in lines:
        if ln.startswith("#"):
            for tok in ln[1:].split():
                if "=" in tok:
                    k, v = tok.split("=", 1)
                    meta[k] = v
        elif ln.strip():
            body.append(ln)
    header = body[0].split(",")
    if tuple(header) != COLUMNS:
        raise ConfigError(f"unexpected table columns {header}")
    rows = [[float(x) for x in ln.split(",")] for ln in body[1:]]
    return meta, np.array(rows, dtype=float).T, body[1:]


def write_run(res: RunResult) -> tuple[Path, Path]:
    cfg = res.config
    digest = cfg.digest()
    csv_path = cfg.out_dir / f"{cfg.stem}.csv"
    json_path = cfg.out_dir / f"{cfg.stem}.json"
    side = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "config": cfg.canonical(),
        "config_sha256": digest,
        "table": csv_path.name,
        **res.sidecar,
    }
    _atomic_write(csv_path, format_table(res.table, digest))
    _atomic_write(json_path, json.dumps(_plain(side), indent=2) + "\n")
    return csv_path, json_path


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


# -- table-level checks ---------------------------------------------------------------


def _spline_profiles(table: np.ndarray, b0: float) -> ProfileSet:
    t = table[0]
    fns = []
    for row in table[1:7]:
        sp = CubicSpline(t, row)
        dsp = sp.derivative()
        fns.append(leaf(sp, deriv=leaf(dsp, tag="spline'"), tag="spline"))
    return ProfileSet(tuple(fns[:3]), tuple(fns[3:]), b0, label="table")


def table_checks(table: np.ndarray, b0: float, tol: float = 1e-5) -> list[CheckResult]:
    t = table[0]
    gs = {"t_min": float(t[0]), "t_max": float(t[-1]), "points": int(t.size)}
    out = [CheckResult("table_ascending", "table layout", bool(np.all(np.diff(t) > 0)),
                       float(np.min(np.diff(t))), 0.0, gs)]
    inner = t > 0
    A, B, D = table[1:4, inner], table[4:7, inner], table[7:10, inner]
    r = max(float(np.max(np.abs(A[j] * B[j] * A[k] * B[k] - D[i]) / np.abs(D[i]))) for i, j, k in CYCLIC)
    out.append(CheckResult("table_consistency", "D_i = A_j B_j A_k B_k", r <= 1e-9, r, 1e-9, gs))
    # coclosedness of the tabulated data alone, away from the ends where splines lose accuracy
    lo, hi = t[0] + 0.1 * (t[-1] - t[0]), t[-1] - 0.1 * (t[-1] - t[0])
    mid = t[(t >= lo) & (t <= hi)]
    r = coclosed_residual(build_g2(_spline_profiles(table, b0)), mid) if mid.size else math.inf
    out.append(CheckResult("table_coclosed", "d psi = 0 from tabulated profiles", r <= tol, r, tol,
                           {"t_min": float(lo), "t_max": float(hi), "points": int(mid.size)}))
    return out


# -- commands ---------------------------------------------------------------------------


def _report_for(res: RunResult) -> VerificationReport:
    cfg = res.config
    tol = cfg.verify_tol
    if res.solution is not None:
        return verify_solution(res.solution, tol=tol)
    torsion_free = cfg.profile["kind"] == "bryant_salamon"
    return verify_profiles(res.profiles, tol=max(tol, 1e-6) if torsion_free else tol,
                           torsion_free=torsion_free, t_max=cfg.t_max)


def cmd_solve(args) -> int:
    cfg = load_config(args)
    res = execute(cfg)
    csv_path, json_path = write_run(res)
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


def _verify_saved(table_path: Path, tol: float | None) -> VerificationReport:
    meta, table, raw_rows = read_table(table_path)
    side_path = table_path.with_suffix(".json")
    side = json.loads(side_path.read_text())
    cfg = RunConfig.from_dict(side["config"])
    if tol is not None:
        cfg.verify_tol = tol
    stored_hash = meta.get("config_sha256")
    checks = [CheckResult("config_hash", "reproducibility", stored_hash == side["config_sha256"],
                          0.0 if stored_hash == side["config_sha256"] else 1.0, 0.0)]
    b0 = cfg.b0 if cfg.profile["kind"] != "bryant_salamon" else 1.0 / math.sqrt(3.0)
    checks += table_checks(table, b0)
    res = execute(RunConfig.from_dict(side["config"]))
    fresh = format_table(res.table, side["config_sha256"]).splitlines()[2:]
    same = [a == b for a, b in zip(fresh, raw_rows)]
    n_diff = len(same) - sum(same) + abs(len(fresh) - len(raw_rows))
    res_fresh = [r.rsplit(",", 1)[1] for r in fresh]
    res_saved = [r.rsplit(",", 1)[1] for r in raw_rows]
    checks.append(CheckResult("replay_res_dpsi", "reproducibility", res_fresh == res_saved,
                              float(sum(a != b for a, b in zip(res_fresh, res_saved))), 0.0))
    checks.append(CheckResult("replay_table", "reproducibility", n_diff == 0, float(n_diff), 0.0))
    suite = _report_for(res)
    meta_out = {"table": str(table_path), **suite.meta}
    return VerificationReport(tuple(checks) + suite.checks, meta_out)


def cmd_verify(args) -> int:
    if args.table:
        path = Path(args.table)
        if not path.exists() or not path.with_suffix(".json").exists():
            print(f"error: missing {path} or its .json sidecar", file=sys.stderr)
            return EXIT_CONFIG
        report = _verify_saved(path, args.tol)
        out = Path(args.out) if args.out else path.parent
        stem = path.stem + ".verify"
    else:
        cfg = load_config(args)
        report = _report_for(execute(cfg))
        out, stem = cfg.out_dir, cfg.stem + ".verify"
    _atomic_write(out / f"{stem}.json", report.to_json() + "\n")
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: residual={c.residual:.3e} tol={c.tolerance:.1e}")
    return EXIT_OK if report.passed else EXIT_CHECK


def _parse_values(text: str) -> list[float]:
    vals = [float(x) for x in text.split(",") if x.strip()]
    if not vals:
        raise ConfigError("empty parameter range")
    return vals


def cmd_sweep(args) -> int:
    cfg = load_config(args)
    if args.values is None:
        values = cfg.extra.get("sweep", {}).get(args.param)
        if not values:
            raise ConfigError("empty parameter range")
    else:
        values = _parse_values(args.values)
    if args.param not in ("b0", "t_max"):
        raise ConfigError("sweep parameter must be b0 or t_max")
    base = cfg.canonical()

    def one(idx_val):
        idx, val = idx_val
        raw = copy.deepcopy(base)
        if args.param == "b0":
            raw["b0"] = val
        else:
            raw["grid"]["t_max"] = val
        row = {"index": idx, "param": args.param, "value": val}
        try:
            c = RunConfig.from_dict(raw)
            c.out_dir, c.stem = cfg.out_dir, f"{cfg.stem}_{idx:03d}"
            res = execute(c)
            write_run(res)
            rep = _report_for(res)
            row.update(status="ok", passed=rep.passed,
                       max_res_dpsi=float(np.nanmax(res.table[10])),
                       sumD_tmax=float(res.table[7:10, -1].sum()))
        except Exception as exc:
            row.update(status=f"error: {type(exc).__name__}: {exc}", passed=False,
                       max_res_dpsi=math.nan, sumD_tmax=math.nan)
        return row

    with ThreadPoolExecutor(max_workers=thread_count()) as ex:
        rows = list(ex.map(one, enumerate(values)))
    buf = io.StringIO()
    buf.write(f"# g2coclosed {__version__} config_sha256={cfg.digest()}\n")
    buf.write("index,param,value,status,passed,max_res_dpsi,sumD_tmax\n")
    for r in rows:
        status = r["status"].replace(",", ";")
        buf.write(f"{r['index']},{r['param']},{r['value']!r},{status},{r['passed']},"
                  f"{r['max_res_dpsi']!r},{r['sumD_tmax']!r}\n")
    _atomic_write(cfg.out_dir / f"{cfg.stem}_summary.csv", buf.getvalue())
    print(f"wrote {cfg.out_dir / f'{cfg.stem}_summary.csv'}")
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_CHECK


def cmd_compact_demo(args) -> int:
    raw: dict = {"profile": {"kind": "sine", "L": 1.0}, "grid": {"t_max": 0.999}}
    if args.config:
        raw = json.loads(Path(args.config).read_text())
    b0 = args.b0 if args.b0 is not None else float(raw.get("b0", 1.0))
    prof = raw.get("profile", {"kind": "sine"})
    if b0 == 0:
        raise ConfigError("b0 must be nonzero")
    eps = tuple(float(e) for e in raw.get("eps", (1e-1, 1e-2, 1e-3)))
    if prof.get("kind") == "sine":
        sys_ = CoclosedSystem.sine_profile(b0, float(prof.get("L", 1.0)))
    elif prof.get("kind") == "odd_poly":
        try:
            sys_ = CoclosedSystem.from_odd_poly(prof["coeffs"], b0, float(prof.get("L", 1.0)))
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
    else:
        raise ConfigError("compact-demo needs a sine or odd_poly profile with finite L")
    try:
        rep = compact_obstruction_demo(sys_, eps)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    out = {
        "schema_version": SCHEMA_VERSION,
        "verdict": rep.verdict,
        "eps": list(rep.eps),
        "B1_at_L_minus_eps": list(rep.B_end),
        "growth_per_decade": list(rep.growth),
        "sumD_half": rep.sumD_half,
        "sumD_end": rep.sumD_end,
        "min_dsumD_dt": rep.sumD_min_slope,
        "checks": [c.to_dict() for c in rep.checks],
    }
    out_dir = Path(args.out) if args.out else Path(".")
    _atomic_write(out_dir / "compact_demo.json", json.dumps(_plain(out), indent=2) + "\n")
    print(rep.verdict)
    return EXIT_OK if rep.passed else EXIT_CHECK


def cmd_special(args) -> int:
    name = args.profile or "cone"
    if name not in ("cone", "symmetric", "bryant_salamon"):
        raise ConfigError("special families: cone, symmetric, bryant_salamon")
    b0 = 1.0 if args.b0 is None else args.b0
    t_max = 2.0 if args.t_max is None else args.t_max
    t = np.linspace(0.0, t_max, 201)
    if name == "cone":
        if b0 == 0:
            raise ConfigError("b0 must be nonzero")
        p = cone_family(b0)
    elif name == "symmetric":
        if b0 == 0:
            raise ConfigError("b0 must be nonzero")
        p = symmetric_solution(odd_polynomial([0.5]), b0, t).profiles()
    else:
        p = bryant_salamon().profiles()
    table = _table(p, t)
    cfg = {"special": name, "b0": b0, "t_max": t_max}
    digest = hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()
    out_dir = Path(args.out) if args.out else Path(".")
    _atomic_write(out_dir / f"{name}.csv", format_table(table, digest))
    print(f"wrote {out_dir / f'{name}.csv'}")
    return EXIT_OK


# -- entry point ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="g2c", description="SU(2)^2-invariant coclosed G2-structures")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output directory")
        p.add_argument("--t-max", type=float, dest="t_max")
        p.add_argument("--b0", type=float)
        p.add_argument("--profile", help=f"one of {', '.join(PROFILE_KINDS)}")
        p.add_argument("--tol", type=float, help="verification tolerance")

    p = sub.add_parser("solve", help="solve and write a profile table")
    common(p)
    p.set_defaults(func=cmd_solve)
    p = sub.add_parser("verify", help="run the check suite on a config or a saved table")
    common(p)
    p.add_argument("--table", help="saved CSV table (sidecar JSON next to it)")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("sweep", help="solve and verify over a parameter range")
    common(p)
    p.add_argument("--param", default="b0")
    p.add_argument("--values", help="comma-separated values")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("compact-demo", help="no-compact-extension demonstration")
    common(p)
    p.set_defaults(func=cmd_compact_demo)
    p = sub.add_parser("special", help="tabulate an analytic family")
    common(p, config=False)
    p.set_defaults(func=cmd_special)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalFailure, InvariantViolation, SeriesError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
