"""Monte Carlo risk estimation and rate/concentration diagnostics.

The harness measures the integrated l^p error of the block estimator across
a grid of sample sizes, fits the log-log decay slope, and compares it to the
theoretical risk exponent of the configured Besov ball.  It also verifies
two finite-sample properties of the empirical coefficients: the 2p-th moment
decay E|beta_hat - beta|^{2p} ~ n^{-p}, and the block-deviation tail bound
P(block l^p mean of deviations >= mu/2 sqrt(n)) <= 4 n^{-p}.

Everything is deterministic given the master seed: replication seeds derive
from (master_seed, n, replication index), so enlarging the n grid never
perturbs existing replications, and thread count does not affect results.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import make_basis, midpoint_grid, synthesize
from .besov import BesovBall, make_test_function, rate_spec
from .design import density_from_spec, generate_sample
from .estimator import (
    block_grid,
    blockshrink,
    empirical_detail_level,
    term_threshold,
)

_Z95 = 1.959963984540054


@dataclass
class ExperimentConfig:
    """Inputs of one reproducible experiment."""

    signal: dict = field(default_factory=lambda: {"name": "heavisine"})
    density: dict = field(default_factory=lambda: {"kind": "uniform"})
    basis_family: str = "haar"
    refine_depth: int = 12
    p: float = 2.0
    d: float = 4.0
    n_grid: tuple = (1024, 2048, 4096, 8192, 16384)
    replications: int = 100
    master_seed: int = 0
    risk_grid: int = 1 << 14
    ball: dict = field(default_factory=lambda: {"s": 1, "pi": "inf", "r": "inf"})
    jmax: int = 8
    noiseless: bool = False
    compare_term: bool = False
    term_c: float = 2.0
    slope_tol: float = 0.15
    moment_tol: float = 0.3

    def validate(self) -> None:
        ns = tuple(int(n) for n in self.n_grid)
        if len(ns) == 0 or any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("n_grid must be strictly increasing")
        if min(ns) < 256:
            raise ValueError(f"n_grid entries must be at least 256, got {min(ns)}")
        if self.replications < 50:
            raise ValueError(f"replications must be at least 50, got {self.replications}")
        if self.p < 2:
            raise ValueError(f"p={self.p} out of range (need p >= 2)")
        if self.d < 0:
            raise ValueError("threshold constant d must be nonnegative")
        if self.risk_grid < 1024:
            raise ValueError("risk grid must hold at least 1024 points")
        BesovBall(self.ball["s"], self.ball["pi"], self.ball.get("r", "inf"))

    def ball_spec(self) -> BesovBall:
        return BesovBall(self.ball["s"], self.ball["pi"], self.ball.get("r", "inf"))


def replication_seed(master_seed: int, n: int, rep: int) -> int:
    """Collision-resistant 64-bit seed for one replication."""
    ss = np.random.SeedSequence((int(master_seed), int(n), int(rep)))
    return int(ss.generate_state(1, np.uint64)[0])


def lp_risk(estimate_values, truth_values, p: float) -> float:
    """Integrated p-th power error between two midpoint-grid functions."""
    a = np.asarray(estimate_values, dtype=float)
    b = np.asarray(truth_values, dtype=float)
    if a.shape != b.shape:
        raise ValueError("estimate and truth grids differ in length")
    if a.size < 1024:
        raise ValueError("risk grid must hold at least 1024 points")
    return float(np.mean(np.abs(a - b) ** p))


def fit_rate(points):
    """Least-squares slope of log(risk) against log(n).

    Returns (slope, intercept, slope standard error).  Requires at least
    three points with positive risks.
    """
    pts = [(float(n), float(r)) for n, r in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points to fit a rate")
    if any(r <= 0 for _, r in pts):
        raise ValueError("risks must be positive to fit a log-log rate")
    x = np.log([n for n, _ in pts])
    y = np.log([r for _, r in pts])
    xc = x - x.mean()
    slope = float(np.dot(xc, y) / np.dot(xc, xc))
    intercept = float(y.mean() - slope * x.mean())
    resid = y - slope * x - intercept
    dof = len(pts) - 2
    stderr = float(np.sqrt(np.dot(resid, resid) / dof / np.dot(xc, xc)))
    return slope, intercept, stderr


def wilson_upper(successes: int, trials: int, z: float = _Z95) -> float:
    """Upper end of the Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = phat + z * z / (2.0 * trials)
    spread = z * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials))
    return (center + spread) / denom


def _materialize(config: ExperimentConfig):
    config.validate()
    basis = make_basis(config.basis_family, config.refine_depth)
    density = density_from_spec(config.density)
    signal = make_test_function(config.signal, basis, config.jmax)
    return basis, density, signal


@dataclass
class RiskReport:
    """Mean l^p risks across n with the fitted decay slope vs theory."""

    n_grid: tuple
    mean_risk: list
    stderr: list
    slope: float
    slope_stderr: float
    intercept: float
    theory_risk_exponent: float
    theory_log_exponent: float
    zone: str
    slope_tol: float
    passed: bool
    comparison: list
    meta: dict

    def to_dict(self) -> dict:
        return {
            "n_grid": list(self.n_grid),
            "mean_risk": self.mean_risk,
            "stderr": self.stderr,
            "slope": self.slope,
            "slope_stderr": self.slope_stderr,
            "intercept": self.intercept,
            "theory_risk_exponent": self.theory_risk_exponent,
            "theory_log_exponent": self.theory_log_exponent,
            "zone": self.zone,
            "slope_tol": self.slope_tol,
            "passed": self.passed,
            "comparison": self.comparison,
            "meta": self.meta,
        }


def run_rate_experiment(config: ExperimentConfig, threads: int = 1) -> RiskReport:
    """Monte Carlo risk-decay experiment against the theoretical exponent.

    For each n the block estimator is fit on R independent replications and
    the integrated l^p error against the true signal is averaged; the fitted
    log-log slope is compared with the ball's risk exponent (exponents are
    the falsifiable content of the rate theory; constants are not).  With
    ``config.compare_term`` the same replications also score term-by-term
    hard/soft baselines, reported descriptively and never gated.
    """
    basis, density, signal = _materialize(config)
    ball = config.ball_spec()
    if not ball.theorem_applicable:
        raise ValueError("configured ball lies outside the supported smoothness range")
    rate = rate_spec(ball.s, ball.pi, ball.r, config.p)
    truth = signal.fn(midpoint_grid(config.risk_grid))
    ns = tuple(int(n) for n in config.n_grid)
    R = config.replications

    def one(n: int, rep: int):
        sample = generate_sample(
            signal.fn, density, n, replication_seed(config.master_seed, n, rep),
            noiseless=config.noiseless,
        )
        est = blockshrink(sample, density, basis, config.p, config.d)
        vals = synthesize(basis, est.tree, config.risk_grid)
        out = [lp_risk(vals, truth, config.p)]
        if config.compare_term:
            for mode in ("hard", "soft"):
                alt = term_threshold(sample, density, basis, mode, config.term_c, config.p)
                out.append(lp_risk(synthesize(basis, alt.tree, config.risk_grid), truth, config.p))
        return out

    width = 3 if config.compare_term else 1
    risks = {n: np.empty((R, width)) for n in ns}
    jobs = [(n, rep) for n in ns for rep in range(R)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for (n, rep), res in zip(jobs, pool.map(lambda nr: one(*nr), jobs)):
                risks[n][rep] = res
    else:
        for n, rep in jobs:
            risks[n][rep] = one(n, rep)

    means = [float(risks[n][:, 0].mean()) for n in ns]
    errs = [float(risks[n][:, 0].std(ddof=1) / math.sqrt(R)) for n in ns]
    slope, intercept, slope_err = fit_rate(zip(ns, means))
    theory = float(rate.risk_exponent)
    passed = abs(slope - theory) <= config.slope_tol
    comparison = []
    if config.compare_term:
        for i, n in enumerate(ns):
            comparison.append(
                {
                    "n": n,
                    "block": means[i],
                    "hard": float(risks[n][:, 1].mean()),
                    "soft": float(risks[n][:, 2].mean()),
                }
            )
    return RiskReport(
        n_grid=ns,
        mean_risk=means,
        stderr=errs,
        slope=slope,
        slope_stderr=slope_err,
        intercept=intercept,
        theory_risk_exponent=theory,
        theory_log_exponent=float(rate.log_exponent),
        zone=rate.zone,
        slope_tol=config.slope_tol,
        passed=bool(passed),
        comparison=comparison,
        meta={
            "signal": signal.name,
            "density": config.density,
            "basis": basis.family,
            "p": config.p,
            "d": config.d,
            "replications": R,
            "master_seed": config.master_seed,
            "noiseless": config.noiseless,
        },
    )


@dataclass
class MomentReport:
    """Decay of the 2p-th central moment of one empirical coefficient."""

    j: int
    k: int
    n_grid: tuple
    moments: list
    stderr: list
    slope: float
    slope_stderr: float
    theory_exponent: float
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "j": self.j,
            "k": self.k,
            "n_grid": list(self.n_grid),
            "moments": self.moments,
            "stderr": self.stderr,
            "slope": self.slope,
            "slope_stderr": self.slope_stderr,
            "theory_exponent": self.theory_exponent,
            "tol": self.tol,
            "passed": self.passed,
        }


def coefficient_deviations(
    config: ExperimentConfig, j: int, n: int, reps: int, basis, density, signal
) -> np.ndarray:
    """(reps, 2^j) matrix of level-j coefficient errors beta_hat - beta."""
    truth = signal.tree.detail(j)
    out = np.empty((reps, truth.size))
    for rep in range(reps):
        sample = generate_sample(
            signal.fn, density, n, replication_seed(config.master_seed, n, rep),
            noiseless=config.noiseless,
        )
        out[rep] = empirical_detail_level(sample, density, basis, j) - truth
    return out


def check_moment_bound(config: ExperimentConfig, j: int, k: int) -> MomentReport:
    """Monte Carlo slope of log E|beta_hat_{j,k} - beta_{j,k}|^{2p} vs log n.

    The true coefficient comes from the quadrature oracle; theory predicts
    the slope -p.
    """
    basis, density, signal = _materialize(config)
    ns = tuple(int(n) for n in config.n_grid)
    if len(ns) < 3:
        raise ValueError("moment check needs at least 3 sample sizes to fit a slope")
    for n in ns:
        grid = block_grid(n, config.p, basis.coarsest_level)
        if not grid.j_low <= j <= grid.j_high:
            raise ValueError(f"level {j} outside the estimator range at n={n}")
    if not 0 <= k < (1 << j):
        raise ValueError(f"translate k={k} out of range at level {j}")
    power = 2.0 * config.p
    moments, errs = [], []
    for n in ns:
        dev = coefficient_deviations(config, j, n, config.replications, basis, density, signal)
        vals = np.abs(dev[:, k]) ** power
        moments.append(float(vals.mean()))
        errs.append(float(vals.std(ddof=1) / math.sqrt(len(vals))))
    slope, _, slope_err = fit_rate(zip(ns, moments))
    theory = -float(config.p)
    passed = abs(slope - theory) <= config.moment_tol
    return MomentReport(
        j=j,
        k=k,
        n_grid=ns,
        moments=moments,
        stderr=errs,
        slope=slope,
        slope_stderr=slope_err,
        theory_exponent=theory,
        tol=config.moment_tol,
        passed=bool(passed),
    )


@dataclass
class ConcentrationReport:
    """Tail behaviour of the block l^p deviation statistic across n."""

    j: int
    block: int
    mu: float
    n_grid: tuple
    frequency: list
    wilson_upper: list
    envelope: list
    median_stat: list
    median_slope: float
    mu_sweep: list
    smallest_passing_mu: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "j": self.j,
            "block": self.block,
            "mu": self.mu,
            "n_grid": list(self.n_grid),
            "frequency": self.frequency,
            "wilson_upper": self.wilson_upper,
            "envelope": self.envelope,
            "median_stat": self.median_stat,
            "median_slope": self.median_slope,
            "mu_sweep": self.mu_sweep,
            "smallest_passing_mu": self.smallest_passing_mu,
            "passed": self.passed,
        }


def check_concentration(
    config: ExperimentConfig, j: int, block: int, mu: float
) -> ConcentrationReport:
    """Empirical frequency of large block deviations against the 4 n^{-p} tail.

    The gating event is block l^p deviation mean >= mu/2 * n^{-1/2} at the
    given mu; a sweep over smaller and larger mu is reported alongside (the
    theory guarantees only that a large enough mu works, not its value).
    The check passes when the observed frequency stays under the envelope
    for every n.
    """
    basis, density, signal = _materialize(config)
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    ns = tuple(int(n) for n in config.n_grid)
    p = config.p
    mu_sweep_factors = np.array([0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0])
    sweep_mus = sorted(set(np.round(mu * mu_sweep_factors, 10)) | {float(mu)}) if mu > 0 else [0.0]
    freqs, uppers, envs, medians = [], [], [], []
    sweep_rows = []
    for n in ns:
        grid = block_grid(n, p, basis.coarsest_level)
        if not grid.j_low <= j <= grid.j_high:
            raise ValueError(f"level {j} outside the estimator range at n={n}")
        edges = grid.boundaries(j)
        if not 0 <= block < len(edges) - 1:
            raise ValueError(f"block {block} out of range at level {j}, n={n}")
        lo, hi = edges[block], edges[block + 1]
        dev = coefficient_deviations(config, j, n, config.replications, basis, density, signal)
        stats = np.mean(np.abs(dev[:, lo:hi]) ** p, axis=1) ** (1.0 / p)
        cut = 0.5 * mu / math.sqrt(n)
        hits = int(np.count_nonzero(stats >= cut))
        R = len(stats)
        freqs.append(hits / R)
        uppers.append(wilson_upper(hits, R))
        envs.append(4.0 * n ** (-p))
        medians.append(float(np.median(stats)))
        sweep_rows.append(
            {
                "n": n,
                "mu": list(map(float, sweep_mus)),
                "frequency": [
                    float(np.mean(stats >= 0.5 * m / math.sqrt(n))) for m in sweep_mus
                ],
            }
        )
    if len(ns) >= 3:
        median_slope, _, _ = fit_rate(zip(ns, medians))
    else:
        median_slope = math.nan
    passed = all(f <= e for f, e in zip(freqs, envs))
    smallest = math.inf
    for m in sweep_mus:
        ok = all(
            row["frequency"][row["mu"].index(float(m))] <= 4.0 * row["n"] ** (-p)
            for row in sweep_rows
        )
        if ok:
            smallest = float(m)
            break
    return ConcentrationReport(
        j=j,
        block=block,
        mu=float(mu),
        n_grid=ns,
        frequency=freqs,
        wilson_upper=uppers,
        envelope=envs,
        median_stat=medians,
        median_slope=median_slope,
        mu_sweep=sweep_rows,
        smallest_passing_mu=smallest,
        passed=bool(passed),
    )


def calibrate_threshold(
    n: int = 4096,
    p: float = 2.0,
    replications: int = 2000,
    seed: int = 20240,
    candidates=(0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0),
) -> list:
    """Pure-noise false-keep rate per block for a sweep of threshold constants.

    Re-derives the default keep-or-kill constant: the default 4 must show a
    per-block false-keep rate below 1% on uniform-design pure noise.
    """
    config = ExperimentConfig(
        signal={"name": "zero"},
        n_grid=(n,),
        replications=replications,
        master_seed=seed,
        p=p,
    )
    basis, density, signal = _materialize(config)
    grid = block_grid(n, p, basis.coarsest_level)
    rows = []
    level_stats = {}
    for j in grid.levels():
        dev = coefficient_deviations(config, j, n, replications, basis, density, signal)
        edges = grid.boundaries(j)
        stats = [
            np.mean(np.abs(dev[:, lo:hi]) ** p, axis=1) ** (1.0 / p)
            for lo, hi in zip(edges[:-1], edges[1:])
        ]
        level_stats[j] = np.column_stack(stats)
    for d in candidates:
        cut = d / math.sqrt(n)
        keeps = total = 0
        for j, stats in level_stats.items():
            keeps += int(np.count_nonzero(stats >= cut))
            total += stats.size
        rows.append({"d": float(d), "false_keep_rate": keeps / total})
    return rows
