"""Benchmark command line: selection, factorization, sweeps and CSV reports.

Subcommands
-----------
synth         write a synthetic dataset as CSV
select        landmark indices/coordinates for one method and rank
approximate   one (method, rank) cell, printed as result rows
diagnose      marking errors, fill distance and the max-norm bound
discrepancy   star discrepancy of a Halton set, a grid or a 1D/2D dataset
sweep         methods x ranks x runs, one CSV row per run
report        mean over runs per (method, rank) from sweep CSV files

Every subcommand that reads data accepts ``--config FILE``: a plain text
file of ``key = value`` lines whose keys are the long flag names (``ranks =
50,100``, ``standardize = true``).  Flags given on the command line win.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import anchornet, diagnostics, lowdisc, nystrom, selectors
from .dataio import (DataError, Dataset, abalone, derive_seed, load_csv, make_rng,
                     nonuniform_2d, standardize, stats, subsample, subsample_indices)
from .kernels import FAMILIES, KernelError, KernelSpec

__all__ = ["METHODS", "DETERMINISTIC_METHODS", "SweepConfig", "ResultRow", "ConfigError",
           "resolve_sigma", "load_dataset", "run_sweep", "write_rows", "read_rows",
           "report", "build_parser", "main"]

METHODS = ("anchornet", "uniform", "kmeans", "fps", "rls", "cholesky")
DETERMINISTIC_METHODS = ("anchornet", "fps", "cholesky")
METHOD_LABELS = {"rls": "RLS-exact"}
STABILIZE = {"none": "none", "pinv-eps": "pinv-eps", "qr-eps": "qr-eps"}
# subset rule for large sets: Frobenius over this many sampled points
DEFAULT_EVAL_SAMPLE = 10_000
_EVAL_SEED_KEY = 0xE7A1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepConfig:
    """One benchmark sweep.

    ``data`` is a CSV path or ``builtin:abalone``; ``synth`` (``nonuniform2d:N``
    or ``uniform:N:D``) replaces it.  ``norm = "auto"`` picks the dense 2-norm
    for ``n <= 5000`` and the Frobenius norm over ``eval_sample`` points
    otherwise.  ``timings = False`` writes zero times so reruns are
    byte-identical.
    """

    data: str | None = None
    synth: str | None = None
    cols: tuple | None = None
    skip_header: bool = False
    standardize: bool = False
    subsample: int | None = None
    kernel: str = "gaussian"
    sigma: str = "half-radius"
    methods: tuple = ("anchornet", "uniform")
    ranks: tuple = (50, 100)
    runs: int = 10
    stabilize: str = "none"
    eps: float = 0.0
    beta: float = 0.0
    norm: str = "auto"
    eval_sample: int | None = None
    seed: int = 0
    tess_mult: float = 4.0
    kmeans_iters: int = 5
    rls_gamma: float = 1e-3
    timings: bool = True
    out: str | None = None

    def __post_init__(self):
        if self.data is None and self.synth is None:
            raise ConfigError("a dataset is required (data or synth)")
        if self.kernel not in FAMILIES:
            raise ConfigError(f"unknown kernel {self.kernel!r}")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ConfigError(f"unknown or missing methods {bad}; choose from {METHODS}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("methods must be distinct")
        if not self.ranks or any(r < 1 for r in self.ranks):
            raise ConfigError("ranks must be positive")
        if any(b <= a for a, b in zip(self.ranks, self.ranks[1:])):
            raise ConfigError("ranks must be strictly increasing")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.stabilize not in STABILIZE:
            raise ConfigError(f"unknown stabilization {self.stabilize!r}")
        if self.stabilize != "none" and not self.eps > 0:
            raise ConfigError(f"--stabilize {self.stabilize} needs --eps > 0")
        if self.beta < 0:
            raise ConfigError("beta must be nonnegative")
        if self.norm not in ("auto",) + nystrom.NORMS:
            raise ConfigError(f"unknown norm {self.norm!r}")
        if self.eval_sample is not None and self.eval_sample < 1:
            raise ConfigError("eval_sample must be positive")
        if not 2.0 <= self.tess_mult <= 20.0:
            raise ConfigError("tess_mult must lie in [2, 20]")
        if not self.rls_gamma > 0:
            raise ConfigError("rls_gamma must be positive")


@dataclass
class ResultRow:
    method: str
    kernel: str
    sigma: float
    m_requested: int
    m_actual: int
    run: int
    seed: int
    err_value: float
    err_norm_kind: str
    relative_err: float
    t_select_ms: float
    t_factor_ms: float
    t_eval_ms: float
    min_sv: float
    max_sv: float
    pinv_norm: float

    @property
    def skipped(self) -> bool:
        return self.err_norm_kind.startswith("skipped")


FIELDNAMES = [f.name for f in fields(ResultRow)]


# ---------------------------------------------------------------- data

def parse_synth(text: str, seed=0) -> Dataset:
    """``nonuniform2d:N`` or ``uniform:N:D`` (unit cube)."""
    parts = text.split(":")
    try:
        if parts[0] == "nonuniform2d" and len(parts) <= 2:
            return nonuniform_2d(int(parts[1]) if len(parts) == 2 else 3000, seed=seed)
        if parts[0] == "uniform" and len(parts) == 3:
            n, d = int(parts[1]), int(parts[2])
            return Dataset(make_rng(seed).random((n, d)), source=text)
    except ValueError:
        pass
    raise ConfigError(f"bad synthetic spec {text!r}; use nonuniform2d:N or uniform:N:D")


def load_dataset(cfg: SweepConfig) -> Dataset:
    if cfg.synth:
        ds = parse_synth(cfg.synth, seed=cfg.seed)
    elif cfg.data == "builtin:abalone":
        ds = abalone()
        if cfg.cols is not None:
            ds = Dataset(ds.points[:, list(cfg.cols)], source=ds.source)
    else:
        ds = load_csv(cfg.data, columns=cfg.cols, skip_header=cfg.skip_header)
    if cfg.subsample is not None and cfg.subsample < ds.n:
        ds = subsample(ds, cfg.subsample, derive_seed(cfg.seed, 0x5B))
    return standardize(ds) if cfg.standardize else ds


def resolve_sigma(rule, ds: Dataset) -> float:
    """Kernel scale from ``V`` (absolute), ``half-radius`` or ``frac:F``.

    Relative rules use the radius of the standardized dataset and therefore
    require ``ds.standardized``.
    """
    rule = str(rule).strip()
    if rule == "half-radius" or rule.startswith("frac:"):
        if not ds.standardized:
            raise ConfigError(f"sigma rule {rule!r} needs a standardized dataset (--standardize)")
        radius = stats(ds).radius
        if rule == "half-radius":
            sigma = radius / 2
        else:
            try:
                sigma = float(rule[5:]) * radius
            except ValueError:
                raise ConfigError(f"bad sigma rule {rule!r}") from None
    else:
        try:
            sigma = float(rule)
        except ValueError:
            raise ConfigError(f"bad sigma rule {rule!r}; use V, half-radius or frac:F") from None
    if not (math.isfinite(sigma) and sigma > 0):
        raise ConfigError(f"sigma must be positive, got {sigma} from {rule!r}")
    return sigma


# ---------------------------------------------------------------- sweep

def _select(method, ds, m, seed, spec, cfg):
    if method == "anchornet":
        return anchornet.select_landmarks(ds, m, anchornet.AnchorConfig(tess_multiplier=cfg.tess_mult))
    if method == "uniform":
        return selectors.uniform(ds, m, seed)
    if method == "kmeans":
        return selectors.kmeans(ds, m, iters=cfg.kmeans_iters, seed=seed)
    if method == "fps":
        return selectors.fps(ds, m, seed)
    if method == "rls":
        return selectors.rls_exact(ds, spec, cfg.rls_gamma, m, seed)
    raise ConfigError(f"no selector for {method!r}")


def _skip_reason(method, spec, ds, m):
    if m > ds.n:
        return f"rank {m} exceeds n = {ds.n}"
    if method in ("rls", "cholesky") and not spec.is_spsd:
        return f"{method} needs an SPSD kernel"
    if method == "rls" and ds.n > selectors.RLS_MAX_N:
        return f"rls needs n <= {selectors.RLS_MAX_N}"
    return None


def _norm_plan(cfg, ds):
    norm, sample = cfg.norm, cfg.eval_sample
    if norm == "auto":
        if ds.n <= nystrom.DENSE_MAX_N and sample is None:
            norm = "two"
        else:
            norm, sample = "fro", sample or DEFAULT_EVAL_SAMPLE
    if norm == "two" and sample is None and ds.n > nystrom.DENSE_MAX_N:
        raise ConfigError(f"the 2-norm over n = {ds.n} > {nystrom.DENSE_MAX_N} points needs --eval-sample")
    subset = None if sample is None or sample >= ds.n else (sample, derive_seed(cfg.seed, _EVAL_SEED_KEY))
    return norm, subset


def _ms(seconds, cfg):
    return round(seconds * 1e3, 3) if cfg.timings else 0.0


def run_cell(ds, spec, cfg, method, m, run, seed, norm, subset, target=None) -> ResultRow:
    """Select, factor and evaluate one (method, rank, run) cell."""
    label = METHOD_LABELS.get(method, method)
    reason = _skip_reason(method, spec, ds, m)
    if reason is not None:
        nan = float("nan")
        return ResultRow(label, spec.family, spec.sigma, m, 0, run, seed, nan, f"skipped({reason})",
                         nan, 0.0, 0.0, 0.0, nan, nan, nan)
    if method == "cholesky":
        t_sel = 0.0
        f = nystrom.pivoted_cholesky(ds, spec, m, beta=cfg.beta)
        m_actual = f.rank
    else:
        lm = _select(method, ds, m, seed, spec, cfg)
        t_sel = lm.select_time
        f = nystrom.factor(ds, lm, spec, STABILIZE[cfg.stabilize], eps=cfg.eps, beta=cfg.beta)
        m_actual = lm.m_actual
    rep = nystrom.approx_error(ds, f, spec, norm, eval_subset=subset, beta=cfg.beta,
                               target=target, t_select=t_sel)
    return ResultRow(label, spec.family, spec.sigma, m, m_actual, run, seed, rep.value, norm,
                     rep.relative, _ms(t_sel, cfg), _ms(rep.t_factor, cfg), _ms(rep.t_eval, cfg),
                     f.min_sv, f.max_sv, f.pinv_norm)


def run_sweep(cfg: SweepConfig, ds: Dataset | None = None, progress=None) -> list:
    """All (method, rank, run) cells of ``cfg``; writes ``cfg.out`` when set.

    Deterministic methods run once (run 0).  Stochastic methods run
    ``cfg.runs`` times with seeds ``derive_seed(cfg.seed, run)``.  Cells that
    cannot run (kernel not SPSD for rls/cholesky, size guards) become rows
    with ``err_value = nan`` and ``err_norm_kind = "skipped(<reason>)"``.
    Rows are returned sorted by (method, rank, run).
    """
    ds = load_dataset(cfg) if ds is None else ds
    spec = KernelSpec(cfg.kernel, resolve_sigma(cfg.sigma, ds))
    norm, subset = _norm_plan(cfg, ds)
    target = None
    if norm == "two":
        rows_idx = None
        if subset is not None:
            rows_idx = np.sort(subsample_indices(ds.n, subset[0], subset[1]))
        target = nystrom.Target.build(ds, spec, cfg.beta, rows_idx)
    out = []
    for method in cfg.methods:
        runs = 1 if method in DETERMINISTIC_METHODS else cfg.runs
        for m in cfg.ranks:
            for run in range(runs):
                seed = derive_seed(cfg.seed, run)
                row = run_cell(ds, spec, cfg, method, m, run, seed, norm, subset, target)
                out.append(row)
                if progress is not None:
                    progress(row)
    out.sort(key=lambda r: (r.method, r.m_requested, r.run))
    if cfg.out:
        write_rows(out, cfg.out)
    return out


# ---------------------------------------------------------------- csv

def _fmt(value):
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ("nan" if math.isnan(value) else repr(value))
    return str(value)


def write_rows(rows, path=None, fieldnames=None) -> str:
    """CSV text of dataclass rows (or dicts); also written to ``path`` if given."""
    buf = io.StringIO()
    dicts = [r if isinstance(r, dict) else asdict(r) for r in rows]
    names = fieldnames or (list(dicts[0]) if dicts else FIELDNAMES)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for d in dicts:
        w.writerow([_fmt(d[k]) for k in names])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


_INT_FIELDS = {"m_requested", "m_actual", "run", "seed"}
_STR_FIELDS = {"method", "kernel", "err_norm_kind"}


def read_rows(path) -> list:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != FIELDNAMES:
            raise ConfigError(f"{path}: header does not match the result row fields")
        rows = []
        for rec in reader:
            vals = {k: (v if k in _STR_FIELDS else int(v) if k in _INT_FIELDS else float(v))
                    for k, v in rec.items()}
            rows.append(ResultRow(**vals))
    return rows


SUMMARY_FIELDS = ["method", "kernel", "m_requested", "runs", "err_norm_kind", "err_value",
                  "relative_err", "m_actual", "t_select_ms", "t_factor_ms", "t_eval_ms"]


def report(rows, keys=("method", "m_requested")) -> list:
    """Arithmetic means over runs per group (default ``(method, rank)``).

    Skipped cells form groups with ``runs = 0`` and nan means, so every
    requested cell appears.  Raises ``ConfigError`` when the non-skipped rows
    use more than one norm.
    """
    live = {r.err_norm_kind for r in rows if not r.skipped}
    if len(live) > 1:
        raise ConfigError(f"rows mix error norms {sorted(live)}")
    groups: dict = {}
    for r in rows:
        groups.setdefault(tuple(getattr(r, k) for k in keys), []).append(r)
    out = []
    for key in sorted(groups):
        grp = groups[key]
        ok = [r for r in grp if not r.skipped]
        summary = dict(zip(keys, key))
        summary.setdefault("method", grp[0].method)
        summary.setdefault("m_requested", grp[0].m_requested)
        summary["kernel"] = grp[0].kernel
        summary["runs"] = len(ok)
        summary["err_norm_kind"] = ok[0].err_norm_kind if ok else grp[0].err_norm_kind
        for name in ("err_value", "relative_err", "m_actual", "t_select_ms", "t_factor_ms", "t_eval_ms"):
            summary[name] = float(np.mean([getattr(r, name) for r in ok])) if ok else float("nan")
        out.append({k: summary[k] for k in SUMMARY_FIELDS})
    return out


# ---------------------------------------------------------------- argparse

_BOOL_FLAGS = {"standardize", "skip_header", "no_timings"}


def _int_list(text):
    try:
        return tuple(int(t) for t in str(text).replace(" ", "").split(",") if t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _str_list(text):
    return tuple(t for t in str(text).replace(" ", "").split(",") if t)


def _add_data_args(p):
    g = p.add_argument_group("data")
    g.add_argument("--config", help="key = value file; command-line flags override it")
    g.add_argument("--data", help="CSV path or builtin:abalone")
    g.add_argument("--synth", help="nonuniform2d:N or uniform:N:D instead of --data")
    g.add_argument("--cols", type=_int_list, help="zero-based columns to keep, e.g. 1,2,3")
    g.add_argument("--skip-header", action="store_true", help="skip the first CSV line")
    g.add_argument("--standardize", action="store_true", help="zero mean, unit variance per column")
    g.add_argument("--subsample", type=int, help="keep a seeded sample of this many rows")
    g.add_argument("--seed", type=int, default=0, help="master seed (default 0)")


def _add_kernel_args(p):
    p.add_argument("--kernel", choices=FAMILIES, default="gaussian")
    p.add_argument("--sigma", default="half-radius", help="V, half-radius or frac:F (default half-radius)")


def _add_method_args(p, many):
    if many:
        p.add_argument("--methods", "--method", dest="methods", type=_str_list,
                       default=("anchornet", "uniform"), help=f"comma-separated, from {','.join(METHODS)}")
        p.add_argument("--ranks", "--rank", dest="ranks", type=_int_list, default=(50, 100))
    else:
        p.add_argument("--method", choices=METHODS, default="anchornet")
        p.add_argument("--rank", type=int, default=50)
    p.add_argument("--tess-mult", type=float, default=4.0, help="tessellation size / rank (anchornet)")
    p.add_argument("--kmeans-iters", type=int, default=5)
    p.add_argument("--rls-gamma", type=float, default=1e-3)


def _add_factor_args(p):
    p.add_argument("--runs", type=int, default=10, help="runs per stochastic method (default 10)")
    p.add_argument("--stabilize", choices=tuple(STABILIZE), default="none")
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0, help="approximate K + beta I")
    p.add_argument("--norm", choices=("auto",) + nystrom.NORMS, default="auto")
    p.add_argument("--eval-sample", type=int, help="evaluate on a seeded subset of this size")
    p.add_argument("--no-timings", action="store_true", help="write zero times (byte-identical reruns)")
    p.add_argument("--out", help="output CSV (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="anchornys", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument("kind", help="nonuniform2d:N or uniform:N:D")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output CSV (default stdout)")

    p = sub.add_parser("select", help="landmarks for one method and rank")
    _add_data_args(p)
    _add_kernel_args(p)
    _add_method_args(p, many=False)
    p.add_argument("--out", help="output CSV (default stdout)")

    for name, helptext in (("approximate", "one (method, rank) cell"),
                           ("sweep", "methods x ranks x runs")):
        p = sub.add_parser(name, help=helptext)
        _add_data_args(p)
        _add_kernel_args(p)
        _add_method_args(p, many=name == "sweep")
        _add_factor_args(p)

    p = sub.add_parser("diagnose", help="marking errors, fill distance, bound check")
    _add_data_args(p)
    _add_kernel_args(p)
    _add_method_args(p, many=False)
    p.add_argument("--lipschitz", action="store_true", help="also print the sampled-Lipschitz bound")

    p = sub.add_parser("discrepancy", help="star discrepancy of a point set")
    p.add_argument("--source", choices=("halton", "grid", "data"), default="halton")
    p.add_argument("--count", type=int, default=64, help="points (halton) or budget (grid)")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--method", choices=("auto", "exact1d", "exact2d", "monte_carlo"), default="auto")
    p.add_argument("--samples", type=int, default=10_000, help="Monte-Carlo corners")
    p.add_argument("--data", help="CSV for --source data (scaled to the unit cube)")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("report", help="means per (method, rank) from sweep CSVs")
    p.add_argument("inputs", nargs="+", help="sweep CSV files")
    p.add_argument("--out", help="output CSV (default stdout)")
    return parser


def read_config_file(path) -> list:
    """``key = value`` lines as argv tokens (``#`` starts a comment)."""
    tokens = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (t.strip() for t in line.split("=", 1))
        dest = key.replace("-", "_")
        flag = "--" + dest.replace("_", "-")
        if dest in _BOOL_FLAGS:
            if value.lower() in ("1", "true", "yes", "on"):
                tokens.append(flag)
            elif value.lower() not in ("0", "false", "no", "off"):
                raise ConfigError(f"{path}:{lineno}: {key} expects true or false")
        elif dest == "config":
            raise ConfigError(f"{path}:{lineno}: nested config files are not supported")
        else:
            tokens += [flag, value]
    return tokens


def _parse(parser, argv):
    args = parser.parse_args(argv)
    cfg_path = getattr(args, "config", None)
    if cfg_path:
        # file values go first so that explicit flags, parsed later, win
        tokens = read_config_file(cfg_path)
        args = parser.parse_args([argv[0]] + tokens + list(argv[1:]))
    return args


def config_from_args(args) -> SweepConfig:
    many = hasattr(args, "methods")
    return SweepConfig(
        data=args.data, synth=args.synth, cols=args.cols, skip_header=args.skip_header,
        standardize=args.standardize, subsample=args.subsample, kernel=args.kernel,
        sigma=args.sigma, methods=tuple(args.methods) if many else (args.method,),
        ranks=tuple(args.ranks) if many else (args.rank,),
        runs=getattr(args, "runs", 1), stabilize=getattr(args, "stabilize", "none"),
        eps=getattr(args, "eps", 0.0), beta=getattr(args, "beta", 0.0),
        norm=getattr(args, "norm", "auto"), eval_sample=getattr(args, "eval_sample", None),
        seed=args.seed, tess_mult=args.tess_mult, kmeans_iters=args.kmeans_iters,
        rls_gamma=args.rls_gamma, timings=not getattr(args, "no_timings", False),
        out=getattr(args, "out", None))


def _emit(text, path):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _cmd_synth(args):
    ds = parse_synth(args.kind, seed=args.seed)
    buf = io.StringIO()
    np.savetxt(buf, ds.points, delimiter=",", fmt="%.17g")
    _emit(buf.getvalue(), args.out)


def _cmd_select(args):
    cfg = config_from_args(args)
    ds = load_dataset(cfg)
    spec = KernelSpec(cfg.kernel, resolve_sigma(cfg.sigma, ds))
    reason = _skip_reason(args.method, spec, ds, args.rank)
    if reason or args.method == "cholesky":
        raise ConfigError(reason or "cholesky has no separate selection step; use approximate")
    lm = _select(args.method, ds, args.rank, derive_seed(cfg.seed, 0), spec, cfg)
    idx = lm.indices if lm.from_data else np.full(lm.m_actual, -1)
    rows = [dict(index=int(i), **{f"x{j}": float(v) for j, v in enumerate(c)})
            for i, c in zip(idx, lm.coords)]
    _emit(write_rows(rows), args.out)
    print(f"# {lm.method}: requested {lm.m_requested}, selected {lm.m_actual}, "
          f"{lm.select_time * 1e3:.1f} ms", file=sys.stderr)


def _cmd_sweep(args):
    cfg = config_from_args(args)
    rows = run_sweep(cfg)
    if not cfg.out:
        sys.stdout.write(write_rows(rows))


def _cmd_diagnose(args):
    cfg = config_from_args(args)
    ds = load_dataset(cfg)
    spec = KernelSpec(cfg.kernel, resolve_sigma(cfg.sigma, ds))
    if args.method in ("kmeans", "cholesky"):
        raise ConfigError("diagnose needs landmarks that are dataset points")
    reason = _skip_reason(args.method, spec, ds, args.rank)
    if reason:
        raise ConfigError(reason)
    lm = _select(args.method, ds, args.rank, derive_seed(cfg.seed, 0), spec, cfg)
    me = diagnostics.marking_errors(ds, lm, spec)
    geo = diagnostics.fill_distance(ds, lm)
    lines = [f"method        {lm.method}", f"landmarks     {lm.m_actual}",
             f"E_r           {me.e_r!r}", f"Ehat_r        {me.e_hat_r!r}",
             f"pinv_norm     {me.pinv_norm!r}", f"bound         {me.bound!r}",
             f"fill_distance {geo.delta!r}"]
    if args.lipschitz:
        L = diagnostics.estimate_lipschitz(spec, ds.points, seed=cfg.seed)
        lines += [f"lipschitz_est {L!r}", f"geom_bound    {geo.lipschitz_bound(L, me.pinv_norm)!r}"]
    if ds.n <= diagnostics.VERIFY_MAX_N:
        err, bound, holds = diagnostics.verify_bound(ds, lm, spec)
        lines += [f"max_error     {err!r}", f"holds         {holds}"]
    print("\n".join(lines))


def _cmd_discrepancy(args):
    if args.source == "halton":
        pts = lowdisc.halton(args.count, args.dim).points
    elif args.source == "grid":
        pts = lowdisc.grid_for_budget(lowdisc.Box.unit(args.dim), args.count).points
    else:
        if not args.data:
            raise ConfigError("--source data needs --data")
        x = load_csv(args.data).points
        span = np.ptp(x, axis=0)
        pts = (x - x.min(axis=0)) / np.where(span > 0, span, 1.0)
    method = args.method
    if method == "auto":
        method = {1: "exact1d", 2: "exact2d"}.get(pts.shape[1], "monte_carlo")
    est = lowdisc.star_discrepancy(pts, method=method, samples=args.samples, seed=args.seed)
    kind = "lower bound" if est.is_lower_bound else "exact" if method != "monte_carlo" else "estimate"
    print(f"points {pts.shape[0]}  dim {pts.shape[1]}  method {est.method}  "
          f"D* = {est.value!r} ({kind})")


def _cmd_report(args):
    rows = []
    for path in args.inputs:
        rows += read_rows(path)
    _emit(write_rows(report(rows), fieldnames=SUMMARY_FIELDS), args.out)


_COMMANDS = {"synth": _cmd_synth, "select": _cmd_select, "approximate": _cmd_sweep,
             "sweep": _cmd_sweep, "diagnose": _cmd_diagnose, "discrepancy": _cmd_discrepancy,
             "report": _cmd_report}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _parse(parser, argv)
        _COMMANDS[args.command](args)
    except (ConfigError, DataError, KernelError, anchornet.SelectionError, nystrom.NystromError,
            diagnostics.DiagnosticsError, lowdisc.LowDiscError, OSError) as exc:
        print(f"anchornys: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
