"""Monte-Carlo comparison of row-selection distributions.

One random consistent system is drawn per run; every method computes its
distribution once and the solver is then run for ``trials`` independent
row-sampling streams from ``x0 = 0``. Trial ``t`` of a method draws its rows
from the Philox stream ``(seed ^ t, method tag)``; the system itself comes
from stream ``(seed, 0)``. All trials of a method advance in lockstep as one
vectorized batch, so results do not depend on scheduling.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bounds import RatePair, envelope, rate_pair
from .errors import NumericalError
from .kaczmarz import row_norm_distribution, run_batch
from .linalg import row_normalize
from .optimizers import (
    OptimizerResult,
    optimize_dopt,
    optimize_lp,
    optimize_maximin,
)
from .sampling import RowSampler, make_rng

log = logging.getLogger(__name__)

METHODS = ("rka", "orka", "lporka", "iteorka")
METHOD_STREAMS = {name: i + 1 for i, name in enumerate(METHODS)}
SYSTEM_STREAM = 0
MIN_ROW_SCALE = 1e-6


class InvalidConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    m: int = 200
    n: int = 20
    trials: int = 2000
    steps: int = 500
    seed: int = 0
    methods: tuple[str, ...] = METHODS
    dopt_iters: int = 10
    maximin_tol: float = 1e-7
    output_dir: str | None = None
    regenerate_per_trial: bool = False

    def validate(self) -> "ExperimentConfig":
        if not (self.m >= self.n >= 1):
            raise InvalidConfigError(f"need m >= n >= 1, got m={self.m}, n={self.n}")
        if self.trials < 1:
            raise InvalidConfigError("trials must be at least 1")
        if self.steps < 0:
            raise InvalidConfigError("steps must be nonnegative")
        if self.dopt_iters < 0:
            raise InvalidConfigError("dopt_iters must be nonnegative")
        if not self.methods:
            raise InvalidConfigError("no methods selected")
        unknown = [name for name in self.methods if name not in METHODS]
        if unknown:
            raise InvalidConfigError(f"unknown methods {unknown}; choose from {list(METHODS)}")
        if len(set(self.methods)) != len(self.methods):
            raise InvalidConfigError("methods listed more than once")
        return self


@dataclass
class MseCurve:
    method: str
    mean: np.ndarray        # steps + 1 entries
    std: np.ndarray         # sample standard deviation across trials
    trials: int

    @property
    def stderr(self) -> np.ndarray:
        return self.std / np.sqrt(self.trials)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    A: np.ndarray
    x: np.ndarray
    b: np.ndarray
    curves: dict[str, MseCurve] = field(default_factory=dict)
    distributions: dict[str, np.ndarray] = field(default_factory=dict)
    rates: dict[str, RatePair] = field(default_factory=dict)
    optimizer_results: dict[str, OptimizerResult] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def row_norm_p(self) -> np.ndarray:
        return row_norm_distribution(self.A)


def generate_system(m: int, n: int, rng: np.random.Generator):
    """Random consistent system with uniformly spread row directions.

    Rows are standard normal vectors scaled to unit length and then by an
    independent ``U[0, 1]`` factor (factors below ``1e-6`` are redrawn). The
    solution is standard normal and ``b = A @ x``.
    """
    if m < n:
        raise InvalidConfigError(f"need m >= n, got m={m}, n={n}")
    G = rng.standard_normal((m, n))
    scale = rng.uniform(0.0, 1.0, size=m)
    low = scale < MIN_ROW_SCALE
    while low.any():
        scale[low] = rng.uniform(0.0, 1.0, size=int(low.sum()))
        low = scale < MIN_ROW_SCALE
    A = G / np.linalg.norm(G, axis=1)[:, None] * scale[:, None]
    x = rng.standard_normal(n)
    return A, x, A @ x


def compute_distributions(A, methods=METHODS, *, dopt_iters=10, maximin_tol=1e-7):
    """Row distributions for each method.

    Returns ``(distributions, optimizer_results, failures, timings)``. A
    numerical failure in one method is recorded and does not stop the others.
    """
    B = row_normalize(A).B
    p_rka = row_norm_distribution(A)
    dists, results, failures, timings = {}, {}, {}, {}
    for name in methods:
        start = time.perf_counter()
        try:
            if name == "rka":
                dists[name] = p_rka
            elif name == "orka":
                res = optimize_maximin(B, tol=maximin_tol)
                results[name], dists[name] = res, res.p_hat
            elif name == "lporka":
                res = optimize_lp(B)
                results[name], dists[name] = res, res.p_hat
            elif name == "iteorka":
                res = optimize_dopt(p_rka, B, iters=dopt_iters)
                results[name], dists[name] = res, res.p_hat
        except NumericalError as exc:
            log.warning("method %s failed: %s", name, exc)
            failures[name] = str(exc)
        timings[f"optimize_{name}"] = time.perf_counter() - start
    return dists, results, failures, timings


def _trial_rows(sampler: RowSampler, seed: int, trials: int, steps: int, tag: int) -> np.ndarray:
    rows = np.empty((trials, steps), dtype=np.intp)
    for t in range(trials):
        rows[t] = sampler.reseeded(seed ^ t, stream=tag).draw(steps)
    return rows


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    config.validate()
    rng = make_rng(config.seed, SYSTEM_STREAM)
    start = time.perf_counter()
    A, x, b = generate_system(config.m, config.n, rng)
    result = ExperimentResult(config=config, A=A, x=x, b=b)
    result.timings["generate"] = time.perf_counter() - start

    dists, res, failures, timings = compute_distributions(
        A, config.methods, dopt_iters=config.dopt_iters, maximin_tol=config.maximin_tol
    )
    result.distributions, result.optimizer_results = dists, res
    result.failures, result.timings = dict(failures), {**result.timings, **timings}
    B = row_normalize(A).B
    for name, p in dists.items():
        result.rates[name] = rate_pair(B, p)

    if config.regenerate_per_trial:
        _simulate_regenerated(config, result)
        return result

    for name in config.methods:
        if name not in dists:
            continue
        start = time.perf_counter()
        sampler = RowSampler(dists[name])
        rows = _trial_rows(sampler, config.seed, config.trials, config.steps, METHOD_STREAMS[name])
        errs, _ = run_batch(A, b, rows, truth=x)
        result.curves[name] = _curve(name, errs)
        result.timings[f"simulate_{name}"] = time.perf_counter() - start
    return result


def _curve(name: str, errs: np.ndarray) -> MseCurve:
    trials = errs.shape[0]
    std = errs.std(axis=0, ddof=1) if trials > 1 else np.zeros(errs.shape[1])
    return MseCurve(method=name, mean=errs.mean(axis=0), std=std, trials=trials)


def _simulate_regenerated(config: ExperimentConfig, result: ExperimentResult) -> None:
    # robustness mode: every trial draws its own system and recomputes distributions
    errs = {name: [] for name in config.methods if name not in result.failures}
    start = time.perf_counter()
    for t in range(config.trials):
        if t == 0:
            A, x, b, dists = result.A, result.x, result.b, result.distributions
        else:
            A, x, b = generate_system(config.m, config.n, make_rng(config.seed ^ t, SYSTEM_STREAM))
            dists, _, failed, _ = compute_distributions(
                A, list(errs), dopt_iters=config.dopt_iters, maximin_tol=config.maximin_tol
            )
            for name in failed:
                result.failures.setdefault(name, failed[name])
        for name in list(errs):
            if name not in dists:
                errs.pop(name)
                continue
            rows = RowSampler(dists[name], seed=config.seed ^ t, stream=METHOD_STREAMS[name]).draw(config.steps)
            e, _ = run_batch(A, b, rows[None, :], truth=x)
            errs[name].append(e[0])
    for name, rows in errs.items():
        result.curves[name] = _curve(name, np.array(rows))
    result.timings["simulate_regenerated"] = time.perf_counter() - start


def ordering_report(result: ExperimentResult, z: float = 3.0):
    """Pairwise comparison of final mean squared errors.

    Methods are sorted by final MSE; each adjacent pair is labelled ``"<"`` when
    the difference exceeds ``z`` combined standard errors and ``"tie"``
    otherwise. Returns a list of ``(better, worse, difference, band, verdict)``.
    """
    finals = {name: (c.mean[-1], c.stderr[-1]) for name, c in result.curves.items()}
    order = sorted(finals, key=lambda k: finals[k][0])
    out = []
    for a, b in zip(order, order[1:]):
        diff = finals[b][0] - finals[a][0]
        band = z * float(np.hypot(finals[a][1], finals[b][1]))
        out.append((a, b, float(diff), band, "<" if diff > band else "tie"))
    return out


def envelope_report(result: ExperimentResult, z: float = 3.0) -> dict[str, bool]:
    """Whether each MSE curve stays inside the rate envelope widened by ``z``
    standard errors at every step."""
    initial = float(result.x @ result.x)
    out = {}
    for name, curve in result.curves.items():
        k = np.arange(curve.mean.size)
        lo, hi = envelope(initial, result.rates[name], k)
        band = z * curve.stderr + 1e-12 * hi
        out[name] = bool(np.all(curve.mean >= lo - band) and np.all(curve.mean <= hi + band))
    return out


def _fmt(v: float) -> str:
    return repr(float(v))


def emit_csv(result: ExperimentResult, output_dir) -> dict[str, Path]:
    """Write ``mse.csv``, ``distributions.csv`` and ``summary.txt``."""
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc

    names = [n for n in result.config.methods if n in result.curves]
    lines = ["step," + ",".join(n.upper() for n in names)]
    steps = result.config.steps
    for j in range(steps + 1):
        lines.append(",".join([str(j)] + [_fmt(result.curves[n].mean[j]) for n in names]))
    paths = {"mse": out / "mse.csv"}
    _write(paths["mse"], "\n".join(lines) + "\n")

    dnames = [n for n in result.config.methods if n in result.distributions]
    p_rka = result.row_norm_p
    lines = ["row_index,row_norm_p," + ",".join(n.upper() for n in dnames)]
    for i in range(p_rka.size):
        lines.append(",".join([str(i), _fmt(p_rka[i])] + [_fmt(result.distributions[n][i]) for n in dnames]))
    paths["distributions"] = out / "distributions.csv"
    _write(paths["distributions"], "\n".join(lines) + "\n")

    paths["summary"] = out / "summary.txt"
    _write(paths["summary"], summary_text(result))
    return paths


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def summary_text(result: ExperimentResult) -> str:
    cfg = result.config
    lines = [
        f"m={cfg.m} n={cfg.n} trials={cfg.trials} steps={cfg.steps} seed={cfg.seed}",
        f"regenerate_per_trial={cfg.regenerate_per_trial}",
        "",
        "method    omega1              omega2              t_hat               gap         zeros  final_mse",
    ]
    for name in cfg.methods:
        if name in result.failures:
            lines.append(f"{name:<9} FAILED: {result.failures[name]}")
            continue
        r = result.rates.get(name)
        opt = result.optimizer_results.get(name)
        t_hat = opt.t_hat if opt else r.lambda_min
        gap = f"{opt.certificate_gap:.3e}" if opt else "-"
        zeros = int(np.sum(result.distributions[name] < 1e-5))
        final = result.curves[name].mean[-1] if name in result.curves else float("nan")
        lines.append(
            f"{name:<9} {r.omega1:<19.12g} {r.omega2:<19.12g} {t_hat:<19.12g} {gap:<11} {zeros:<6} {final:.6e}"
        )
    lines += ["", "ordering (final MSE, 3 standard errors):"]
    for a, b, diff, band, verdict in ordering_report(result):
        lines.append(f"  {a} {verdict} {b}  diff={diff:.3e} band={band:.3e}")
    lines += ["", "envelope containment:"]
    for name, ok in envelope_report(result).items():
        lines.append(f"  {name}: {'inside' if ok else 'OUTSIDE'}")
    lines += ["", "wall clock (s):"]
    for key, val in result.timings.items():
        lines.append(f"  {key}: {val:.4f}")
    return "\n".join(lines) + "\n"
