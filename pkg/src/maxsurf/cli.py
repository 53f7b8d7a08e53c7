"""maxsurf command-line front end.

    maxsurf <invariants|verify|build|transform|correspond> --config job.json [--out dir]

Exit codes: 0 success, 1 usage or config error, 2 the generating data is
not valid on the domain, 3 a numerical check missed its tolerance.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    DegenerateMetricError,
    DegeneratePointError,
    FitError,
    ParseError,
    QuadratureError,
    ValidityError,
)
from .holfun import as_expr
from .invariants import (
    canonical_invariants,
    correspond_from_r42,
    correspond_to_r42,
    field_from_arrays,
    field_to_csv,
    general_invariants,
    geometric_mean_E,
    invariant_field,
    r31_field_to_csv,
    r31_invariants,
)
from .pdeverify import EQUATION_GROUPS, EmptyMaskError, study_frenet, study_pair, study_r31
from .surface import build_patch, export_patch, verify_patch
from .transforms import (
    MotionSpec,
    associated_pair,
    coordinate_change_pair,
    homothety_pair,
    motion_transform_pair,
)
from .weierstrass import MIXED_MODULI, SINGULAR, GridSpec, HolPair, HolTriple, validity_report

log = logging.getLogger("maxsurf")

COMMANDS = ("invariants", "verify", "build", "transform", "correspond")
KINDS = ("pair", "triple", "r31")
DEFAULT_TOLERANCES = {
    "validity_rel": 1e-9,
    "residual": 1e-3,
    "transform": 1e-10,
    "correspond": 1e-10,
    "E_mean": 1e-12,
}
EXIT_OK, EXIT_USAGE, EXIT_VALIDITY, EXIT_TOLERANCE = 0, 1, 2, 3


class ToleranceFailure(Exception):
    pass


# ------------------------------------------------------------------ config

@dataclass
class JobConfig:
    grid: GridSpec
    t0: complex
    kind: str
    source: object
    generators: dict
    branch_sign: int = 1
    theta: float = 0.0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    blocks: dict = field(default_factory=dict)
    digest: str = ""


def _number(x, what) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(f"{what} must be a number, got {x!r}")
    return float(x)


def _complex(x, what) -> complex:
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(_number(x[0], what), _number(x[1], what))
    return complex(_number(x, what))


def _grid(d) -> GridSpec:
    if not isinstance(d, dict):
        raise ConfigError("'domain' must be an object")
    try:
        u0, u1, v0, v1 = (_number(d[k], f"domain.{k}") for k in ("u0", "u1", "v0", "v1"))
    except KeyError as exc:
        raise ConfigError(f"domain is missing {exc.args[0]!r}") from None
    try:
        if "h" in d:
            return GridSpec.square_cells(u0, u1, v0, v1, _number(d["h"], "domain.h"))
        if "nu" not in d or "nv" not in d:
            raise ConfigError("domain needs either 'h' or both 'nu' and 'nv'")
        nu, nv = d["nu"], d["nv"]
        if not (isinstance(nu, int) and isinstance(nv, int)):
            raise ConfigError("domain.nu and domain.nv must be integers")
        return GridSpec(u0, u1, v0, v1, nu, nv)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad domain: {exc}") from None


def _expr(gen, key):
    if key not in gen or not isinstance(gen[key], str):
        raise ConfigError(f"generators.{key} must be an expression string")
    return as_expr(gen[key])


def load_config(raw) -> JobConfig:
    """Validate a job document (already decoded from JSON) and build the job."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - {"domain", "t0", "generators", "branch_sign", "theta", "tolerances",
                          "verify", "build", "transform", "correspond"}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    grid = _grid(raw.get("domain"))
    gen = raw.get("generators")
    if not isinstance(gen, dict) or gen.get("kind") not in KINDS:
        raise ConfigError(f"generators.kind must be one of {KINDS}")
    kind = gen["kind"]
    branch = raw.get("branch_sign", 1)
    if branch not in (1, -1):
        raise ConfigError("branch_sign must be 1 or -1")
    if kind == "pair":
        source = HolPair(_expr(gen, "g1"), _expr(gen, "g2"), branch, bool(gen.get("second_type", False)))
    elif kind == "triple":
        source = HolTriple(_expr(gen, "f"), _expr(gen, "g1"), _expr(gen, "g2"))
    else:
        source = _expr(gen, "g")
    if "t0" in raw:
        t0 = _complex(raw["t0"], "t0")
    else:
        t0 = complex((grid.u0 + grid.u1) / 2, (grid.v0 + grid.v1) / 2)
    tol = dict(DEFAULT_TOLERANCES)
    extra = raw.get("tolerances", {})
    if not isinstance(extra, dict):
        raise ConfigError("'tolerances' must be an object")
    for k, v in extra.items():
        tol[k] = _number(v, f"tolerances.{k}")
    blocks = {k: raw[k] for k in ("verify", "build", "transform", "correspond") if k in raw}
    for k, v in blocks.items():
        if not isinstance(v, dict):
            raise ConfigError(f"'{k}' must be an object")
    digest = hashlib.sha256(json.dumps(raw, sort_keys=True).encode()).hexdigest()
    return JobConfig(grid, t0, kind, source, dict(gen), branch, _number(raw.get("theta", 0.0), "theta"),
                     tol, blocks, digest)


def read_config(path) -> JobConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return load_config(raw)


# ------------------------------------------------------------------ output

def _version() -> str:
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:
        return "unknown"


def provenance(cfg: JobConfig, command: str) -> dict:
    return {
        "tool": "maxsurf",
        "version": _version(),
        "command": command,
        "generators": cfg.generators,
        "branch_sign": cfg.branch_sign,
        "domain": cfg.grid.to_dict(),
        "t0": [cfg.t0.real, cfg.t0.imag],
        "theta": cfg.theta,
        "tolerances": cfg.tolerances,
        "config_sha256": cfg.digest,
    }


class _Writer:
    def __init__(self, out: Path, prov: dict):
        self.out = out
        self.prov = prov
        out.mkdir(parents=True, exist_ok=True)

    def json(self, name, doc: dict):
        doc = dict(doc, provenance=self.prov)
        (self.out / name).write_text(json.dumps(doc, indent=2, default=_jsonable) + "\n")

    def data(self, name, payload):
        """A data file (CSV etc.) plus its provenance next to it as <name>.provenance.json."""
        path = self.out / name
        if isinstance(payload, str):
            path.write_text(payload)
        else:
            path.write_bytes(payload)
        (self.out / f"{name}.provenance.json").write_text(
            json.dumps({"file": name, "provenance": self.prov}, indent=2) + "\n")


def _jsonable(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _stats(a, mask):
    vals = a[mask]
    if vals.size == 0:
        return {"min": None, "max": None}
    return {"min": float(np.min(vals)), "max": float(np.max(vals))}


def _require_valid(cfg: JobConfig, w: _Writer):
    """Fail when the data is invalid, writing validity.json first (degenerate points are allowed)."""
    rep = validity_report(cfg.source, cfg.grid, cfg.tolerances["validity_rel"])
    hard = np.isin(rep.status, (MIXED_MODULI, SINGULAR))
    if hard.any():
        w.json("validity.json", rep.to_dict())
        raise ValidityError(f"generating data is not valid on the domain: {rep.counts()}")
    return rep


# ------------------------------------------------------------------ commands

def cmd_invariants(cfg: JobConfig, w: _Writer):
    pts = cfg.grid.points()
    if cfg.kind == "r31":
        E, nu = r31_invariants(cfg.source, pts)
        valid = np.isfinite(E) & np.isfinite(nu) & (nu > 0)
        w.data("invariants.csv", r31_field_to_csv(cfg.grid, E, nu, valid))
        w.json("summary.json", {"points": int(valid.size), "valid_points": int(valid.sum()),
                                "E": _stats(E, valid), "nu": _stats(nu, valid)})
        return
    rep = _require_valid(cfg, w)
    if cfg.kind == "pair":
        inv = invariant_field(cfg.source, cfg.grid, cfg.tolerances["validity_rel"])
    else:
        E, K, kappa = general_invariants(cfg.source, pts, strict=False)
        valid = rep.valid & np.isfinite(E) & np.isfinite(K) & (K > np.abs(kappa))
        inv = field_from_arrays(cfg.grid, E, K, kappa, valid=valid)
    gap = inv.K - np.abs(inv.kappa)
    w.data("invariants.csv", field_to_csv(inv))
    summary = {
        "points": int(inv.valid.size),
        "valid_points": int(inv.valid.sum()),
        "degenerate_points": [[z.real, z.imag] for z in inv.degenerate],
        "K_minus_abs_kappa": _stats(gap, inv.valid),
        "E": _stats(inv.E, inv.valid),
        "K": _stats(inv.K, inv.valid),
        "kappa": _stats(inv.kappa, inv.valid),
    }
    w.json("summary.json", summary)
    print(f"invariants: {summary['valid_points']}/{summary['points']} valid points, "
          f"min K-|kappa| = {summary['K_minus_abs_kappa']['min']}")


def cmd_verify(cfg: JobConfig, w: _Writer):
    block = cfg.blocks.get("verify", {})
    bound = _number(block.get("bound", cfg.tolerances["residual"]), "verify.bound")
    if cfg.kind == "r31":
        pairs = {"r31": study_r31(cfg.source, cfg.grid)}
    elif cfg.kind == "pair":
        eqs = block.get("equations", list(EQUATION_GROUPS))
        bad = [e for e in eqs if e not in EQUATION_GROUPS and e != "frenet"]
        if bad:
            raise ConfigError(f"unknown equations {bad}; choose from {sorted(EQUATION_GROUPS) + ['frenet']}")
        _require_valid(cfg, w)
        groups = [e for e in eqs if e != "frenet"]
        pairs = study_pair(cfg.source, cfg.grid, groups) if groups else {}
        if "frenet" in eqs:
            pairs.update(study_frenet(cfg.source, cfg.grid))
    else:
        raise ConfigError("verify needs generators of kind 'pair' or 'r31'")
    reports, failed = [], []
    for eq, (coarse, fine) in pairs.items():
        reports += [coarse.to_dict(), fine.to_dict()]
        if coarse.max_abs > bound:
            failed.append(eq)
        print(f"{eq:20s} h={coarse.h:.6g} max={coarse.max_abs:.3e}  h/2 max={fine.max_abs:.3e}  "
              f"ratio={fine.reduction_ratio}")
    w.json("residuals.json", {"bound": bound, "h": cfg.grid.h, "reports": reports, "exceeded": failed})
    if failed:
        raise ToleranceFailure(f"residual bound {bound:g} exceeded at h={cfg.grid.h:g} by {failed}")


def cmd_build(cfg: JobConfig, w: _Writer):
    if cfg.kind == "r31":
        raise ConfigError("build supports generators of kind 'pair' or 'triple'")
    _require_valid(cfg, w)
    formats = cfg.blocks.get("build", {}).get("formats", ["csv4d", "json"])
    patch = build_patch(cfg.source, cfg.grid, cfg.t0, cfg.theta)
    names = {"csv4d": "patch.csv", "json": "patch.json"}
    for fmt in formats:
        if fmt not in names:
            raise ConfigError(f"unknown build format {fmt!r}")
        w.data(names[fmt], export_patch(patch, fmt))
    rep = verify_patch(patch, cfg.source)
    w.json("patch_report.json", {"report": rep.to_dict(), "path_discrepancy": patch.provenance["path_discrepancy"]})
    print(f"build: {cfg.grid.nu}x{cfg.grid.nv} patch, theta={cfg.theta:g}, isometry error {rep.isometry:.2e}")


def _transformed(cfg: JobConfig, block: dict):
    """(new pair, map s -> t, expected-value function, law name)."""
    p = cfg.source
    kind = block.get("kind")
    same = lambda inv: inv  # noqa: E731
    if kind == "motion":
        ms = MotionSpec.from_dict(block.get("motion", {}))
        q = motion_transform_pair(ms, p, cfg.grid)
        if ms.swap:
            return q, lambda s: s, lambda inv: dict(inv, kappa=-inv["kappa"], mu=-inv["mu"]), "kappa-flipped"
        return q, lambda s: s, same, "invariant"
    if kind == "homothety":
        k = _number(block.get("k"), "transform.k")
        q = homothety_pair(p, k)
        scale = {"E": k, "K": k**-2, "kappa": k**-2, "nu": 1 / k, "mu": 1 / k}
        return q, lambda s: s / np.sqrt(k), lambda inv: {n: inv[n] * scale[n] for n in inv}, "scaled"
    if kind == "associated":
        th = _number(block.get("theta"), "transform.theta")
        return associated_pair(p, th), lambda s: np.exp(0.5j * th) * s, same, "invariant"
    if kind == "coordinate":
        delta = _complex(block.get("delta", 1), "transform.delta")
        c = _complex(block.get("c", 0), "transform.c")
        anti = bool(block.get("antiholo", False))
        try:
            q = coordinate_change_pair(p, delta, c, anti)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        tmap = (lambda s: delta * np.conj(s) + c) if anti else (lambda s: delta * s + c)
        return q, tmap, same, "invariant"
    raise ConfigError("transform.kind must be one of motion, homothety, associated, coordinate")


def cmd_transform(cfg: JobConfig, w: _Writer):
    if cfg.kind != "pair":
        raise ConfigError("transform needs generators of kind 'pair'")
    q, tmap, expected, law = _transformed(cfg, cfg.blocks.get("transform", {}))
    s = cfg.grid.points()
    names = ("E", "K", "kappa", "nu", "mu")
    new = canonical_invariants(q, s, strict=False)
    old = canonical_invariants(cfg.source, tmap(s), strict=False)
    want = expected({n: getattr(old, n) for n in names})
    ok = np.ones(s.shape, dtype=bool)
    for n in names:
        ok &= np.isfinite(getattr(new, n)) & np.isfinite(want[n])
    if not ok.any():
        raise ValidityError("no grid point where both the original and transformed invariants are finite")
    errs = {}
    for n in names:
        ref = want[n][ok]
        errs[n] = float(np.max(np.abs(getattr(new, n)[ok] - ref)) / max(np.max(np.abs(ref)), 1e-300))
    worst = max(errs.values())
    doc = {
        "generators": {"kind": "pair", "g1": str(q.g1), "g2": str(q.g2), "branch_sign": q.branch_sign},
        "comparison": {"law": law, "points": int(ok.sum()), "per_field": errs, "max_rel_error": worst},
    }
    w.json("transform.json", doc)
    print(f"transform: law {law}, max relative deviation {worst:.2e} over {int(ok.sum())} points")
    if worst > cfg.tolerances["transform"]:
        raise ToleranceFailure(f"transformation law violated: {worst:.3g} > {cfg.tolerances['transform']:g}")


def cmd_correspond(cfg: JobConfig, w: _Writer):
    if cfg.kind != "pair":
        raise ConfigError("correspond needs generators of kind 'pair'")
    direction = cfg.blocks.get("correspond", {}).get("direction", "to_r42")
    if direction not in ("to_r42", "from_r42"):
        raise ConfigError("correspond.direction must be 'to_r42' or 'from_r42'")
    _require_valid(cfg, w)
    p, grid = cfg.source, cfg.grid
    inv = invariant_field(p, grid, cfg.tolerances["validity_rel"])
    pts = grid.points()
    E1, nu1 = r31_invariants(p.g1, pts)
    E2, nu2 = r31_invariants(p.g2, pts)
    m = inv.valid & np.isfinite(nu1) & np.isfinite(nu2) & (nu1 > 0) & (nu2 > 0)
    if not m.any():
        raise ValidityError("no valid points for the correspondence")
    for name, E, nu in (("r31_g1.csv", E1, nu1), ("r31_g2.csv", E2, nu2)):
        w.data(name, r31_field_to_csv(grid, E, nu, m))
    rel = lambda a, b: float(np.max(np.abs(a - b)) / np.max(np.abs(b)))  # noqa: E731
    doc = {"direction": direction, "points": int(m.sum())}
    if direction == "to_r42":
        K, kappa = correspond_to_r42(nu1[m], nu2[m])
        doc["K_kappa_max_rel_error"] = max(rel(K, inv.K[m]), rel(kappa, inv.kappa[m]))
        err, tol = doc["K_kappa_max_rel_error"], cfg.tolerances["correspond"]
    else:
        n1, n2 = correspond_from_r42(inv.K[m], inv.kappa[m])
        doc["nu_max_rel_error"] = max(rel(n1, nu1[m]), rel(n2, nu2[m]))
        err, tol = doc["nu_max_rel_error"], cfg.tolerances["correspond"]
    doc["E_max_rel_error"] = rel(geometric_mean_E(E1[m], E2[m]), inv.E[m])
    doc["r31_residuals"] = []
    for g in (p.g1, p.g2):
        coarse, fine = study_r31(g, grid)
        doc["r31_residuals"] += [coarse.to_dict(), fine.to_dict()]
    w.json("correspond.json", doc)
    print(f"correspond ({direction}): field error {err:.2e}, E error {doc['E_max_rel_error']:.2e}")
    if err > tol or doc["E_max_rel_error"] > cfg.tolerances["E_mean"]:
        raise ToleranceFailure("correspondence check missed its tolerance")


HANDLERS = {
    "invariants": cmd_invariants,
    "verify": cmd_verify,
    "build": cmd_build,
    "transform": cmd_transform,
    "correspond": cmd_correspond,
}


# ------------------------------------------------------------------ entry point

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="maxsurf", description="Maximal space-like surfaces in R^4_2 from holomorphic data.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="job configuration (JSON)")
    ap.add_argument("--out", default=".", help="output directory (default: current directory)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = read_config(args.config)
        w = _Writer(Path(args.out), provenance(cfg, args.command))
        HANDLERS[args.command](cfg, w)
    except (ConfigError, ParseError) as exc:
        print(f"maxsurf: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidityError, DegeneratePointError, DegenerateMetricError, EmptyMaskError) as exc:
        print(f"maxsurf: invalid data: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except (ToleranceFailure, QuadratureError, FitError) as exc:
        print(f"maxsurf: tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
