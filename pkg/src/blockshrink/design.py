"""Known design densities on [0, 1] and observation sampling.

The regression model is y_i = f(x_i) + z_i with x_i drawn i.i.d. from a known
density g (bounded away from 0 and infinity) and z_i independent standard
Gaussian noise.  Densities are limited to families with closed-form inverse
CDFs so that sampling is a deterministic transform of seeded uniforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class DesignDensity:
    """A known density on [0, 1] with evaluator, sampler and certified bounds."""

    kind: str
    g_min: float
    g_max: float
    slope: float = 0.0
    breaks: tuple = ()
    values: tuple = ()
    _cum: tuple = field(default=(), repr=False)

    def pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any((x < 0.0) | (x > 1.0)):
            raise ValueError("density evaluated outside [0, 1]")
        if self.kind == "uniform":
            return np.ones_like(x)
        if self.kind == "linear-tilt":
            return 1.0 - 0.5 * self.slope + self.slope * x
        edges = np.asarray(self.breaks)
        vals = np.asarray(self.values)
        return vals[np.searchsorted(edges, x, side="right")]

    def ppf(self, u) -> np.ndarray:
        """Inverse CDF; maps [0, 1) onto [0, 1)."""
        u = np.asarray(u, dtype=float)
        if self.kind == "uniform":
            return u
        if self.kind == "linear-tilt":
            a = self.slope
            b = 1.0 - 0.5 * a
            return (np.sqrt(b * b + 2.0 * a * u) - b) / a
        cum = np.asarray(self._cum)
        vals = np.asarray(self.values)
        lefts = np.concatenate(([0.0], np.asarray(self.breaks)))
        seg = np.clip(np.searchsorted(cum, u, side="right"), 0, len(vals) - 1)
        prev = np.where(seg > 0, cum[np.maximum(seg - 1, 0)], 0.0)
        return lefts[seg] + (u - prev) / vals[seg]

    def integral_check(self) -> float:
        """Quadrature value of the total mass, exact per linear segment."""
        edges = [0.0, 1.0] if self.kind != "piecewise" else [0.0, *self.breaks, 1.0]
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid = np.linspace(lo, hi, 257)[:-1] + (hi - lo) / 512.0
            total += float(np.mean(self.pdf(mid)) * (hi - lo))
        return total


def uniform_design() -> DesignDensity:
    return DesignDensity(kind="uniform", g_min=1.0, g_max=1.0)


def linear_tilt_design(slope: float) -> DesignDensity:
    """g(x) = 1 - slope/2 + slope * x; requires |slope| < 2 for positivity."""
    if not abs(slope) < 2.0:
        raise ValueError(f"slope={slope} leaves the density nonpositive somewhere")
    if slope == 0.0:
        return uniform_design()
    lo = 1.0 - 0.5 * abs(slope)
    hi = 1.0 + 0.5 * abs(slope)
    return DesignDensity(kind="linear-tilt", g_min=lo, g_max=hi, slope=float(slope))


def piecewise_design(breaks, values) -> DesignDensity:
    """Piecewise-constant density: values[i] on the i-th interval between breaks.

    ``breaks`` are the interior breakpoints; ``values`` has one more entry.
    The values must integrate to one.
    """
    breaks = tuple(float(b) for b in breaks)
    values = tuple(float(v) for v in values)
    if len(values) != len(breaks) + 1:
        raise ValueError("need exactly one more value than interior breakpoints")
    if any(not 0.0 < b < 1.0 for b in breaks) or any(
        b2 <= b1 for b1, b2 in zip(breaks, breaks[1:])
    ):
        raise ValueError("breakpoints must be strictly increasing inside (0, 1)")
    if min(values) <= 0.0:
        raise ValueError("density values must be positive")
    edges = np.array([0.0, *breaks, 1.0])
    masses = np.diff(edges) * np.asarray(values)
    if abs(masses.sum() - 1.0) > 1e-9:
        raise ValueError(f"piecewise density integrates to {masses.sum()!r}, not 1")
    return DesignDensity(
        kind="piecewise",
        g_min=min(values),
        g_max=max(values),
        breaks=breaks,
        values=values,
        _cum=tuple(np.cumsum(masses)),
    )


def density_from_spec(spec) -> DesignDensity:
    """Build a density from a config mapping or a compact string.

    Accepted forms: {"kind": "uniform"}, {"kind": "linear-tilt", "slope": s},
    {"kind": "piecewise", "breaks": [...], "values": [...]}, or the strings
    "uniform", "linear-tilt:<slope>", "piecewise:<b1,..>:<v1,..>".
    """
    if isinstance(spec, DesignDensity):
        return spec
    if isinstance(spec, str):
        parts = spec.split(":")
        name = parts[0]
        if name == "uniform":
            return uniform_design()
        if name == "linear-tilt":
            return linear_tilt_design(float(parts[1]))
        if name == "piecewise":
            breaks = [float(v) for v in parts[1].split(",") if v]
            values = [float(v) for v in parts[2].split(",")]
            return piecewise_design(breaks, values)
        raise ValueError(f"unknown density spec {spec!r}")
    kind = spec.get("kind")
    if kind == "uniform":
        return uniform_design()
    if kind == "linear-tilt":
        return linear_tilt_design(float(spec["slope"]))
    if kind == "piecewise":
        return piecewise_design(spec["breaks"], spec["values"])
    raise ValueError(f"unknown density kind {kind!r}")


@dataclass(frozen=True)
class Sample:
    """n observation pairs plus the seed that generated them."""

    n: int
    x: np.ndarray
    y: np.ndarray
    seed: int

    def __post_init__(self):
        if len(self.x) != self.n or len(self.y) != self.n:
            raise ValueError("x and y must both hold n values")
        if np.any((self.x < 0.0) | (self.x > 1.0)):
            raise ValueError("design points must lie in [0, 1]")


def _streams(seed: int):
    """Two decorrelated generators (design, noise) from one seed."""
    design_ss, noise_ss = np.random.SeedSequence(seed).spawn(2)
    return np.random.default_rng(design_ss), np.random.default_rng(noise_ss)


def sample_design(density: DesignDensity, n: int, seed: int) -> np.ndarray:
    """n i.i.d. draws from the density via inverse-CDF transform of uniforms."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng, _ = _streams(seed)
    return density.ppf(rng.random(n))


def generate_sample(
    f, density: DesignDensity, n: int, seed: int, noiseless: bool = False
) -> Sample:
    """Draw a regression sample y_i = f(x_i) + z_i.

    ``f`` is either a callable on [0, 1] or an array of midpoint-grid values
    (interpolated linearly).  ``noiseless=True`` replaces the Gaussian noise
    stream by zeros, a hook for oracle tests.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    design_rng, noise_rng = _streams(seed)
    x = density.ppf(design_rng.random(n))
    if callable(f):
        fx = np.asarray(f(x), dtype=float)
    else:
        vals = np.asarray(f, dtype=float)
        nodes = (np.arange(len(vals)) + 0.5) / len(vals)
        fx = np.interp(x, nodes, vals)
    y = fx if noiseless else fx + noise_rng.standard_normal(n)
    return Sample(n=n, x=x, y=np.asarray(y, dtype=float), seed=int(seed))


def write_sample_csv(path, sample: Sample) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x,y\n")
        for xv, yv in zip(sample.x, sample.y):
            fh.write(f"{float(xv)!r},{float(yv)!r}\n")


def read_sample_csv(path, seed: int = 0) -> Sample:
    data = np.genfromtxt(path, delimiter=",", names=True)
    x = np.atleast_1d(data["x"]).astype(float)
    y = np.atleast_1d(data["y"]).astype(float)
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)):
        raise ValueError(f"sample file {path} contains non-numeric entries")
    return Sample(n=len(x), x=x, y=y, seed=seed)
