"""Configuration-driven experiment runner.

Usage: mixnorm <experiment> [--config FILE] [--describe] [--key value]...

Config files are flat key=value text (one pair per line, # comments);
command-line --key value pairs override file values.  Output is a CSV or JSON
table whose bytes are fully determined by (config, seed) regardless of worker
count; wall-clock timings and the timestamp live in a separate metadata
sidecar <output>.meta.json.  MIXNORM_WORKERS caps process-level parallelism
over family members.

Exit codes: 0 success, 2 validation error, 3 numerical anomaly, 4 I/O error.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .grid import Box, GridError, GridFunction, lp_norm, pointwise_multiply, sample
from .differences import besov_norm_diff, besov_norm_integral
from .fourier import NumericalAnomalyError, besov_norm_fourier, nikolskij_ratio, peetre_maximal
from .sobolev import cmix_norm, embedding_ratio, mixed_sup_lp, sobolev_norm_full, sobolev_norm_reduced
from .spaces import SpaceSpec, space_norm, sup_norm
from .multipliers import build_partition, localization_ratio
from .families import (
    companion_bump,
    DILATED_BOX,
    OSCILLATORY_BOX,
    oscillatory_profile,
    random_smooth_field,
    random_trig_field,
    rate_fit,
)
from .profiles import plateau_bump


class ValidationError(ValueError):
    """A configuration field violates a module precondition."""

    def __init__(self, fields: str, message: str):
        self.fields = fields
        super().__init__(f"{fields}: {message}")


EXPERIMENTS = (
    "norm",
    "equiv",
    "algebra",
    "moser",
    "localize",
    "nikolskij",
    "peetre",
    "trace",
    "embed",
    "report",
)


@dataclass
class ExperimentConfig:
    """Flat parameter set; every row of the output carries this snapshot."""

    experiment: str
    d: int = 2
    resolution: int = 256
    box_lo: float = -4.0
    box_hi: float = 4.0
    p: float = 2.0
    r: float = 1.0
    m: int = 2
    m_diff: int = 2
    space: str = "besov"
    family: str = "random"
    n_min: int = 0
    n_max: int = 8
    epsilon: float = 1.6
    ramp: str = "linear"
    count: int = 10
    band_cells: int = 16
    window_plateau: float = 1.5
    window_support: float = 2.0
    companion_plateau: float = 2.0
    companion_support: float = 3.0
    base_width: float = 1.0
    a: float = 1.0
    alpha: tuple[int, ...] = (1, 1)
    p0: float = 2.0
    octaves: int = 5
    kmax_modes: int = 4
    modes: int = 8
    beta: tuple[int, ...] = (1, 0)
    n_split: int = 1
    seed: int = 0
    output: str = ""
    format: str = "csv"

    def box(self) -> Box:
        return Box((self.box_lo,) * self.d, (self.box_hi,) * self.d)

    def box1(self) -> Box:
        return Box((self.box_lo,), (self.box_hi,))

    def snapshot(self) -> dict:
        # I/O destination fields are sidecar metadata, not experiment parameters
        out = {}
        for f in dataclasses.fields(self):
            if f.name in ("output", "format"):
                continue
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            out[f"param_{f.name}"] = v
        return out


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}


def _parse_value(key: str, raw: str):
    if key not in _FIELD_TYPES:
        raise ValidationError(key, "unknown configuration key")
    target = _FIELD_TYPES[key]
    raw = raw.strip()
    try:
        if target == "int":
            return int(raw)
        if target == "float":
            return math.inf if raw in ("inf", "Inf", "INF") else float(raw)
        if target == "tuple[int, ...]":
            return tuple(int(x) for x in raw.split(",") if x.strip() != "")
        return raw
    except ValueError as err:
        raise ValidationError(key, f"cannot parse {raw!r}: {err}") from None


def load_config(experiment: str, path: str | None, overrides: dict[str, str]) -> ExperimentConfig:
    cfg = ExperimentConfig(experiment=experiment)
    pairs: dict[str, str] = {}
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValidationError("config", f"line {line_no}: expected key=value, got {line!r}")
                key, raw = line.split("=", 1)
                pairs[key.strip()] = raw
    pairs.update(overrides)
    for key, raw in pairs.items():
        if key == "experiment":
            raise ValidationError(key, "experiment is the positional argument")
        setattr(cfg, key, _parse_value(key, raw))
    return cfg


def _require(cond: bool, fields: str, message: str) -> None:
    if not cond:
        raise ValidationError(fields, message)


def validate(cfg: ExperimentConfig) -> None:
    """Check every module precondition reachable from this configuration."""
    _require(cfg.experiment in EXPERIMENTS, "experiment", f"must be one of {EXPERIMENTS}")
    _require(1 <= cfg.d <= 3, "d", "dimension must lie in 1..3")
    _require(cfg.box_lo < cfg.box_hi, "box_lo,box_hi", "need box_lo < box_hi")
    _require(cfg.resolution >= 16, "resolution", "need at least 16 samples per axis")
    try:
        from .grid import NormParams

        NormParams(p=cfg.p, r=cfg.r, m=cfg.m, m_diff=cfg.m_diff)
    except GridError as err:
        raise ValidationError("p,r,m,m_diff", str(err)) from None
    _require(cfg.seed >= 0, "seed", "seed must be nonnegative")
    _require(cfg.format in ("csv", "json"), "format", "format must be csv or json")
    _require(cfg.space in ("besov", "sobolev"), "space", "space must be besov or sobolev")
    pow2 = cfg.resolution & (cfg.resolution - 1) == 0

    dx = (cfg.box_hi - cfg.box_lo) / cfg.resolution
    if dx < 1.0:
        levels = int(math.floor(math.log2(1.0 / dx))) - 1
    else:
        levels = 0
    _require(levels >= 2, "resolution,box_lo,box_hi",
             f"grid leaves {levels} dyadic levels; difference norms need >= 2")

    exp = cfg.experiment
    if exp in ("norm", "equiv"):
        _require(pow2, "resolution", "fourier norms need a power-of-two resolution")
    if exp == "norm":
        _require(cfg.family in ("dilated", "oscillatory", "random", "zero"), "family",
                 "norm family must be dilated|oscillatory|random|zero")
        if cfg.family in ("dilated", "oscillatory"):
            _require(cfg.d == 1, "d,family", "dilated/oscillatory families are one-dimensional")
        else:
            _require(cfg.d <= 2, "d", "norm battery supports d <= 2")
    if exp in ("equiv", "localize", "trace"):
        _require(cfg.d == 2, "d", f"{exp} experiment runs in d = 2")
        _require(cfg.count >= 1, "count", "family count must be positive")
        _require(2 * cfg.band_cells < cfg.resolution, "band_cells,resolution",
                 "family band exceeds the grid Nyquist range")
        _require(1.0 < cfg.p < math.inf, "p", "sobolev norms require 1 < p < inf")
    if exp in ("algebra", "moser"):
        _require(cfg.family in ("tensor_dilated", "tensor_oscillatory", "random"), "family",
                 "family must be tensor_dilated|tensor_oscillatory|random")
        if cfg.family == "random":
            _require(cfg.d == 2, "d", "random pair families run in d = 2")
            _require(cfg.count >= 1, "count", "family count must be positive")
        else:
            _require(cfg.d in (2, 3), "d", "tensor pair families need d in {2, 3}")
            _require(cfg.n_max >= cfg.n_min >= 0, "n_min,n_max", "invalid member range")
    if exp == "embed":
        _require(cfg.n_max >= cfg.n_min >= 0, "n_min,n_max", "invalid member range")
        _require(cfg.n_max - cfg.n_min >= 3, "n_min,n_max", "rate fit needs >= 4 members")
    if exp in ("nikolskij", "peetre"):
        _require(cfg.octaves >= 2, "octaves", "band sweep needs >= 2 octaves")
        _require(cfg.count >= 1, "count", "family count must be positive")
        _require(cfg.kmax_modes >= 1 and cfg.modes >= 1, "kmax_modes,modes", "need modes")
        top = 2.0 ** (cfg.octaves - 1) * cfg.kmax_modes
        _require(top <= cfg.resolution / 4.0, "octaves,kmax_modes,resolution",
                 "top octave exceeds a quarter of the Nyquist index range")
        _require(cfg.a > 0, "a", "peetre exponent a must be positive")
        if exp == "nikolskij":
            _require(all(x >= 0 for x in cfg.alpha), "alpha", "orders must be nonnegative")
            _require(len(cfg.alpha) == cfg.d, "alpha,d", "alpha must have one order per axis")
            _require(1.0 <= cfg.p0 <= cfg.p, "p0,p", "need 1 <= p0 <= p")
    if exp == "trace":
        _require(1 <= cfg.n_split <= cfg.d, "n_split", "split index must lie in 1..d")
        _require(len(cfg.beta) == cfg.d, "beta,d", "beta must have one order per axis")
        _require(all(0 <= x <= cfg.m for x in cfg.beta), "beta,m", "need 0 <= beta_i <= m")
    if cfg.family.endswith("oscillatory") or cfg.family == "oscillatory":
        _require(cfg.epsilon > 0, "epsilon", "epsilon must be positive")
        _require(cfg.ramp in ("linear", "smooth"), "ramp", "ramp must be linear or smooth")
        _require(cfg.n_min >= 1, "n_min", "oscillatory members start at n = 1")
        dx = (cfg.box_hi - cfg.box_lo) / cfg.resolution
        # the oscillation bound tightens with n, so the last member decides
        _require(dx <= (1.0 / (2 * cfg.n_max)) ** (1.0 + cfg.epsilon) / 8.0, "resolution,n_max",
                 "grid cannot resolve the oscillation at n_max")
    if cfg.family in ("dilated", "tensor_dilated"):
        dx = (cfg.box_hi - cfg.box_lo) / cfg.resolution
        _require(4.0 * 2.0**-cfg.n_max / dx >= 16, "resolution,n_max",
                 "finest dilated member needs >= 16 cells across its support")


@dataclass
class ResultRow:
    """One measurement: experiment id, member id, named values, wall time."""

    experiment: str
    member: str
    values: dict
    wall_time: float = 0.0


VALUE_COLUMNS = {
    "norm": ("lp", "besov_diff", "besov_integral", "besov_fourier",
             "sobolev_full", "sobolev_reduced", "cmix"),
    "equiv": ("besov_diff", "besov_fourier", "besov_integral", "sobolev_full",
              "sobolev_reduced", "ratio_diff_fourier", "ratio_diff_integral",
              "ratio_full_reduced"),
    "algebra": ("norm_f", "norm_g", "norm_fg", "ratio", "fit_exponent", "fit_residual"),
    "moser": ("numerator", "denominator", "ratio", "fit_exponent", "fit_residual"),
    "localize": ("ratio",),
    "nikolskij": ("octave", "b", "ratio"),
    "peetre": ("octave", "b", "ratio"),
    "trace": ("trace_norm", "sobolev_full", "ratio"),
    "embed": ("sup_norm", "space_norm", "ratio", "fit_exponent", "fit_residual"),
    "report": ("check", "value"),
}

DESCRIPTIONS = {
    "norm": "Norm battery per family member: L_p, difference/integral/fourier Besov norms, full/reduced Sobolev and C-mix norms (derivative-based columns are empty for non-smooth oscillatory members).",
    "equiv": "Norm-equivalence ratios per seeded random member plus a final bracket row 'C' with the smallest C such that every ratio lies in [1/C, C].",
    "algebra": "Multiplication-algebra ratio norm(fg)/(norm(f) norm(g)) over tensor pairs (with geometric fit) or seeded random pairs (with max row).",
    "moser": "Moser-type ratio norm(fg)/(norm(f) sup(g) + sup(f) norm(g)) along the tensor counterexample family, with fitted growth exponent.",
    "localize": "Besov norm over the l_p aggregate of bump-localized norms per member, plus bracket row 'C'.",
    "nikolskij": "Band-limited derivative inequality constant across a dyadic band sweep; per-octave 'agg' rows and a final 'sweep' max/min row.",
    "peetre": "Maximal-function L_p bound constant across a dyadic band sweep; per-octave 'agg' rows and a final 'sweep' max/min row.",
    "trace": "Mixed sup/L_p trace functional against the full Sobolev norm per member, plus a 'max' row.",
    "embed": "sup-norm / space-norm along the dilated family with fitted geometric slope.",
    "report": "Small battery across all experiments; rows are (check, value) pairs.",
}


def _family_member_1d(cfg: ExperimentConfig, n: int) -> GridFunction:
    box = cfg.box1()
    if cfg.family in ("dilated", "tensor_dilated"):
        scale = 2.0**n
        return sample(lambda t: plateau_bump(scale * t, 1.0, 2.0), box, cfg.resolution)
    return sample(
        lambda t: oscillatory_profile(t, n, cfg.epsilon, cfg.ramp), box, cfg.resolution
    )


def _companion_1d(cfg: ExperimentConfig) -> GridFunction:
    return companion_bump(cfg.box1(), cfg.resolution, cfg.companion_plateau, cfg.companion_support)


def _random_member(cfg: ExperimentConfig, i: int) -> GridFunction:
    return random_smooth_field(
        (cfg.seed, i), cfg.box(), cfg.resolution,
        band_cells=cfg.band_cells,
        window=(cfg.window_plateau, cfg.window_support),
    )


def _besov1(cfg: ExperimentConfig, u: GridFunction) -> float:
    return besov_norm_diff(u, cfg.r, cfg.p, cfg.m_diff)


def _tensor_norms(cfg: ExperimentConfig, n: int) -> dict:
    # exact cross-norm factorization: the d-dimensional norms of the tensor
    # members equal products of 1-d factor norms in this discretization
    f = _family_member_1d(cfg, n)
    g = _companion_1d(cfg)
    bf, bg = _besov1(cfg, f), _besov1(cfg, g)
    fg = pointwise_multiply(f, g)
    bfg = _besov1(cfg, fg)
    bgg = _besov1(cfg, pointwise_multiply(g, g)) if cfg.d == 3 else 1.0
    sup_f, sup_g = sup_norm(f), sup_norm(g)
    norm_big_f = bf * bg ** (cfg.d - 1)
    norm_big_g = norm_big_f
    norm_product = bfg * bfg * (bgg if cfg.d == 3 else 1.0)
    sup_big = sup_f * sup_g ** (cfg.d - 1)
    return {
        "norm_f": norm_big_f,
        "norm_g": norm_big_g,
        "norm_fg": norm_product,
        "sup_f": sup_big,
        "sup_g": sup_big,
    }


def _member_task(payload: tuple) -> tuple[str, dict, float]:
    """Per-member computation; pure function of (experiment, config, index)."""
    exp, cfg_dict, member = payload
    cfg = ExperimentConfig(**cfg_dict)
    t0 = time.perf_counter()
    vals: dict = {}
    if exp == "norm":
        if cfg.family == "zero":
            u = sample(lambda *xs: np.zeros(np.broadcast_shapes(*(x.shape for x in xs))),
                       cfg.box(), cfg.resolution)
            smooth = True
        elif cfg.family == "random":
            u = _random_member(cfg, int(member))
            smooth = True
        elif cfg.family == "dilated":
            u = _family_member_1d(cfg, int(member))
            smooth = True
        else:
            u = _family_member_1d(cfg, int(member))
            smooth = False
        vals["lp"] = lp_norm(u, cfg.p)
        vals["besov_diff"] = besov_norm_diff(u, cfg.r, cfg.p, cfg.m_diff)
        vals["besov_integral"] = besov_norm_integral(u, cfg.r, cfg.p, cfg.m_diff)
        vals["besov_fourier"] = besov_norm_fourier(u, cfg.r, cfg.p)
        if smooth and 1.0 < cfg.p < math.inf:
            vals["sobolev_full"] = sobolev_norm_full(u, cfg.m, cfg.p)
            vals["sobolev_reduced"] = sobolev_norm_reduced(u, cfg.m, cfg.p)
            vals["cmix"] = cmix_norm(u, cfg.m)
        else:
            vals["sobolev_full"] = vals["sobolev_reduced"] = vals["cmix"] = ""
    elif exp == "equiv":
        u = _random_member(cfg, int(member))
        nd = besov_norm_diff(u, cfg.r, cfg.p, cfg.m_diff)
        nf = besov_norm_fourier(u, cfg.r, cfg.p)
        ni = besov_norm_integral(u, cfg.r, cfg.p, cfg.m_diff)
        sf = sobolev_norm_full(u, cfg.m, cfg.p)
        sr = sobolev_norm_reduced(u, cfg.m, cfg.p)
        vals = {
            "besov_diff": nd, "besov_fourier": nf, "besov_integral": ni,
            "sobolev_full": sf, "sobolev_reduced": sr,
            "ratio_diff_fourier": nd / nf, "ratio_diff_integral": nd / ni,
            "ratio_full_reduced": sf / sr,
        }
    elif exp in ("algebra", "moser"):
        if cfg.family == "random":
            i = int(member)
            f = _random_member(cfg, 2 * i)
            g = _random_member(cfg, 2 * i + 1)
            spec = _space_spec(cfg)
            nf, ng = space_norm(f, spec), space_norm(g, spec)
            nfg = space_norm(pointwise_multiply(f, g), spec)
            if exp == "algebra":
                vals = {"norm_f": nf, "norm_g": ng, "norm_fg": nfg,
                        "ratio": nfg / (nf * ng), "fit_exponent": "", "fit_residual": ""}
            else:
                denom = nf * sup_norm(g) + sup_norm(f) * ng
                vals = {"numerator": nfg, "denominator": denom, "ratio": nfg / denom,
                        "fit_exponent": "", "fit_residual": ""}
        else:
            t = _tensor_norms(cfg, int(member))
            if exp == "algebra":
                vals = {"norm_f": t["norm_f"], "norm_g": t["norm_g"], "norm_fg": t["norm_fg"],
                        "ratio": t["norm_fg"] / (t["norm_f"] * t["norm_g"]),
                        "fit_exponent": "", "fit_residual": ""}
            else:
                denom = t["norm_f"] * t["sup_g"] + t["sup_f"] * t["norm_g"]
                vals = {"numerator": t["norm_fg"], "denominator": denom,
                        "ratio": t["norm_fg"] / denom, "fit_exponent": "", "fit_residual": ""}
    elif exp == "localize":
        u = _random_member(cfg, int(member))
        pou = build_partition(cfg.base_width, cfg.box(), cfg.resolution)
        vals = {"ratio": localization_ratio(u, cfg.r, cfg.p, cfg.m_diff, pou)}
    elif exp in ("nikolskij", "peetre"):
        octave, i = (int(x) for x in member.split(":"))
        u, b = random_trig_field((cfg.seed, i), cfg.box(), cfg.resolution,
                                 cfg.kmax_modes, cfg.modes, octave)
        if exp == "nikolskij":
            ratio = nikolskij_ratio(u, cfg.alpha, cfg.p0, cfg.p, b)
        else:
            ratio = lp_norm(peetre_maximal(u, b, cfg.a), cfg.p) / lp_norm(u, cfg.p)
        vals = {"octave": octave, "b": b[0], "ratio": ratio}
    elif exp == "trace":
        u = _random_member(cfg, int(member))
        tn = mixed_sup_lp(u, cfg.beta, cfg.n_split, cfg.p)
        sf = sobolev_norm_full(u, cfg.m, cfg.p)
        vals = {"trace_norm": tn, "sobolev_full": sf, "ratio": tn / sf}
    elif exp == "embed":
        u = _family_member_1d(cfg, int(member))
        spec = SpaceSpec("besov", cfg.p, r=cfg.r, m_diff=cfg.m_diff)
        ratio = embedding_ratio(u, spec)
        vals = {"sup_norm": sup_norm(u), "space_norm": sup_norm(u) / ratio,
                "ratio": ratio, "fit_exponent": "", "fit_residual": ""}
    else:
        raise ValidationError("experiment", f"no member task for {exp}")
    return member, vals, time.perf_counter() - t0


def _space_spec(cfg: ExperimentConfig) -> SpaceSpec:
    if cfg.space == "sobolev":
        return SpaceSpec("sobolev", cfg.p, m=cfg.m)
    return SpaceSpec("besov", cfg.p, r=cfg.r, m_diff=cfg.m_diff)


def worker_count() -> int:
    raw = os.environ.get("MIXNORM_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValidationError("MIXNORM_WORKERS", f"cannot parse {raw!r}") from None


def parallel_map(payloads: list, workers: int) -> list:
    if workers <= 1 or len(payloads) <= 1:
        return [_member_task(p) for p in payloads]
    with concurrent.futures.ProcessPoolExecutor(max_workers=min(workers, len(payloads))) as ex:
        return list(ex.map(_member_task, payloads))


def _members_for(cfg: ExperimentConfig) -> list[str]:
    exp = cfg.experiment
    if exp == "norm":
        if cfg.family in ("dilated", "oscillatory", "tensor_dilated", "tensor_oscillatory"):
            return [str(n) for n in range(cfg.n_min, cfg.n_max + 1)]
        if cfg.family == "zero":
            return ["0"]
        return [str(i) for i in range(cfg.count)]
    if exp in ("equiv", "localize", "trace"):
        return [str(i) for i in range(cfg.count)]
    if exp in ("algebra", "moser"):
        if cfg.family == "random":
            return [str(i) for i in range(cfg.count)]
        return [str(n) for n in range(cfg.n_min, cfg.n_max + 1)]
    if exp in ("nikolskij", "peetre"):
        return [f"{j}:{i}" for j in range(cfg.octaves) for i in range(cfg.count)]
    if exp == "embed":
        return [str(n) for n in range(cfg.n_min, cfg.n_max + 1)]
    raise ValidationError("experiment", f"unknown experiment {exp}")


def run(cfg: ExperimentConfig) -> list[ResultRow]:
    """Execute the configured experiment; deterministic given (config, seed)."""
    validate(cfg)
    if cfg.experiment == "report":
        return _run_report(cfg)
    members = _members_for(cfg)
    cfg_dict = dataclasses.asdict(cfg)
    payloads = [(cfg.experiment, cfg_dict, m) for m in members]
    results = parallel_map(payloads, worker_count())
    rows = [ResultRow(cfg.experiment, m, vals, wall) for m, vals, wall in results]
    rows.extend(_summary_rows(cfg, rows))
    for row in rows:
        for key, v in row.values.items():
            if isinstance(v, float) and not math.isfinite(v):
                raise NumericalAnomalyError(f"non-finite value in column {key!r}")
    return rows


def _summary_rows(cfg: ExperimentConfig, rows: list[ResultRow]) -> list[ResultRow]:
    exp = cfg.experiment
    out: list[ResultRow] = []
    blank = {c: "" for c in VALUE_COLUMNS.get(exp, ())}
    if exp == "equiv":
        vals = dict(blank)
        for col in ("ratio_diff_fourier", "ratio_diff_integral", "ratio_full_reduced"):
            rs = [row.values[col] for row in rows]
            vals[col] = max(max(rs), 1.0 / min(rs))
        out.append(ResultRow(exp, "C", vals))
    elif exp == "localize":
        rs = [row.values["ratio"] for row in rows]
        out.append(ResultRow(exp, "C", {"ratio": max(max(rs), 1.0 / min(rs))}))
    elif exp in ("algebra", "moser", "embed"):
        if cfg.family == "random" and exp == "algebra":
            rs = [row.values["ratio"] for row in rows]
            vals = dict(blank)
            vals["ratio"] = max(rs)
            out.append(ResultRow(exp, "max", vals))
        else:
            series = {int(row.member): row.values["ratio"] for row in rows}
            if len(series) >= 4 and all(v > 0 for v in series.values()):
                model = "power" if cfg.family == "tensor_oscillatory" else "geometric"
                if exp == "embed":
                    model = "geometric"
                c_hat, resid = rate_fit(series, model)
                vals = dict(blank)
                vals["fit_exponent"] = c_hat
                vals["fit_residual"] = resid
                out.append(ResultRow(exp, "fit", vals))
    elif exp in ("nikolskij", "peetre"):
        aggs = {}
        for row in rows:
            aggs.setdefault(int(row.values["octave"]), []).append(row.values["ratio"])
        octave_max = {}
        for j in sorted(aggs):
            octave_max[j] = max(aggs[j])
            out.append(ResultRow(exp, f"agg:{j}", {"octave": j, "b": "", "ratio": octave_max[j]}))
        spread = max(octave_max.values()) / min(octave_max.values())
        out.append(ResultRow(exp, "sweep", {"octave": "", "b": "", "ratio": spread}))
    elif exp == "trace":
        rs = [row.values["ratio"] for row in rows]
        out.append(ResultRow(exp, "max", {"trace_norm": "", "sobolev_full": "", "ratio": max(rs)}))
    return out


def _run_report(cfg: ExperimentConfig) -> list[ResultRow]:
    # quick battery at reduced scale; one (check, value) row per headline number
    checks: list[tuple[str, float]] = []
    sub = dataclasses.replace(cfg, experiment="equiv", d=2, resolution=64, count=3,
                              r=1.0, p=2.0, m=2, m_diff=2, box_lo=-4.0, box_hi=4.0)
    rows = run(sub)
    for col in ("ratio_diff_fourier", "ratio_diff_integral", "ratio_full_reduced"):
        checks.append((f"equiv_bracket_{col}", rows[-1].values[col]))
    sub = dataclasses.replace(cfg, experiment="moser", family="tensor_dilated", d=2,
                              resolution=4096, n_min=0, n_max=4, r=1.0, p=2.0, m_diff=2,
                              box_lo=-6.0, box_hi=6.0)
    rows = run(sub)
    checks.append(("moser_dilated_slope", rows[-1].values["fit_exponent"]))
    sub = dataclasses.replace(cfg, experiment="peetre", d=2, resolution=64, count=2,
                              octaves=3, kmax_modes=2, a=1.0, box_lo=-4.0, box_hi=4.0)
    rows = run(sub)
    checks.append(("peetre_sweep_spread", rows[-1].values["ratio"]))
    return [ResultRow("report", name, {"check": name, "value": val}) for name, val in checks]


def _format_value(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def emit(rows: list[ResultRow], fmt: str, path: str, cfg: ExperimentConfig | None = None) -> None:
    """Write rows as CSV or JSON (deterministic bytes), timings to a sidecar."""
    if not rows:
        raise ValidationError("rows", "no results")
    exp = rows[0].experiment
    cols = ["experiment", "member"]
    snapshot = cfg.snapshot() if cfg is not None else {}
    cols += list(snapshot)
    cols += list(VALUE_COLUMNS[exp])
    records = []
    for row in rows:
        rec = {"experiment": row.experiment, "member": row.member}
        rec.update(snapshot)
        for c in VALUE_COLUMNS[exp]:
            rec[c] = row.values.get(c, "")
        records.append(rec)
    if fmt == "csv":
        import csv as _csv
        import io

        buf = io.StringIO()
        writer = _csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for rec in records:
            writer.writerow([_format_value(rec[c]) for c in cols])
        payload = buf.getvalue()
    else:
        payload = json.dumps([{c: rec[c] for c in cols} for rec in records], indent=1) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(payload)
    meta = {
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "wall_times": {row.member: row.wall_time for row in rows},
        "total_wall_time": sum(row.wall_time for row in rows),
        "workers": worker_count(),
    }
    with open(path + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(meta, fh, indent=1)
        fh.write("\n")


def describe(experiment: str) -> str:
    cols = ", ".join(VALUE_COLUMNS[experiment])
    return (
        f"experiment {experiment}\n"
        f"  {DESCRIPTIONS[experiment]}\n"
        f"  value columns: {cols}\n"
        f"  every row also carries the full parameter snapshot as param_* columns\n"
    )


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(__doc__)
        print("experiments:", ", ".join(EXPERIMENTS))
        return 0
    experiment = argv.pop(0)
    config_path = None
    overrides: dict[str, str] = {}
    want_describe = False
    try:
        if experiment not in EXPERIMENTS:
            raise ValidationError("experiment", f"must be one of {EXPERIMENTS}")
        i = 0
        while i < len(argv):
            tok = argv[i]
            if tok == "--describe":
                want_describe = True
                i += 1
                continue
            if not tok.startswith("--"):
                raise ValidationError("arguments", f"expected --key value, got {tok!r}")
            if i + 1 >= len(argv):
                raise ValidationError(tok[2:], "missing value")
            if tok == "--config":
                config_path = argv[i + 1]
            else:
                overrides[tok[2:]] = argv[i + 1]
            i += 2
        if want_describe:
            print(describe(experiment))
            return 0
        cfg = load_config(experiment, config_path, overrides)
        if not cfg.output:
            cfg.output = f"mixnorm_{experiment}.{cfg.format}"
        rows = run(cfg)
        emit(rows, cfg.format, cfg.output, cfg)
    except ValidationError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except (GridError,) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except NumericalAnomalyError as err:
        print(f"numerical anomaly: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 4
    print(f"wrote {len(rows)} rows to {cfg.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
