"""Periodized compactly supported orthonormal wavelet bases on [0, 1].

The scaling function (father) and wavelet (mother) are tabulated on a dyadic
grid by cascade refinement of the two-scale relation; Haar is evaluated in
closed form.  Periodization wraps the integer translates around the unit
interval, which yields an orthonormal family once the resolution level is at
least ``coarsest_level`` (the first level at which the wrapped translates no
longer overlap themselves).

Grid convention: throughout the package, "function values on a grid of size
N" means values at the midpoints x_i = (i + 1/2)/N.  Integrals are the
periodic trapezoid rule on those samples, i.e. the plain mean.  Midpoint
sampling keeps the rule exact for piecewise-constant integrands with dyadic
breakpoints (every Haar computation), which node sampling cannot achieve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)

# Two-scale lowpass filters h with sum(h) = sqrt(2); phi is supported on
# [0, len(h) - 1].  The 4-tap filter is exact in closed form; the 6-tap
# values are the standard extremal-phase coefficients to double precision.
_FILTERS = {
    "haar": np.array([1.0, 1.0]) / SQRT2,
    "db4": np.array([1.0 + _SQRT3, 3.0 + _SQRT3, 3.0 - _SQRT3, 1.0 - _SQRT3]) / (4.0 * SQRT2),
    "db6": np.array(
        [
            0.3326705529509569,
            0.8068915093133388,
            0.4598775021193313,
            -0.13501102001039084,
            -0.08544127388224149,
            0.035226291882100656,
        ]
    ),
}

_ALIASES = {
    "haar": "haar",
    "db4": "db4",
    "daubechies-4": "db4",
    "db6": "db6",
    "daubechies-6": "db6",
}

SUPPORTED_FAMILIES = tuple(sorted(_FILTERS))


def midpoint_grid(n: int) -> np.ndarray:
    """Midpoint sample locations (i + 1/2)/n of the package grid convention."""
    return (np.arange(n) + 0.5) / n


def _integer_scaling_values(h: np.ndarray) -> np.ndarray:
    """Values of the scaling function at the integers 0 .. len(h)-1.

    These are the eigenvector (eigenvalue 1) of the transfer matrix
    M[i, j] = sqrt(2) h[2i - j], normalized so the values sum to one.
    """
    n = len(h)
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            k = 2 * i - j
            if 0 <= k < n:
                m[i, j] = SQRT2 * h[k]
    eigvals, eigvecs = np.linalg.eig(m)
    idx = int(np.argmin(np.abs(eigvals - 1.0)))
    v = np.real(eigvecs[:, idx])
    return v / v.sum()


def _refine(values: np.ndarray, h: np.ndarray, level: int) -> np.ndarray:
    """One cascade step: values on step 2^-level -> values on step 2^-(level+1).

    Applies phi(t) = sqrt(2) sum_k h_k phi(2t - k); since exact samples map to
    exact samples, iterating from the integer values gives the exact table.
    """
    n = len(h)
    shift = 1 << level
    out = np.zeros((n - 1) * (shift << 1) + 1)
    for k, hk in enumerate(h):
        lo = k * shift
        out[lo : lo + len(values)] += SQRT2 * hk * values
    return out


def _wavelet_table(phi: np.ndarray, h: np.ndarray, depth: int) -> np.ndarray:
    """Wavelet values on the phi grid via psi(t) = sqrt(2) sum_k g_k phi(2t - k),
    with the quadrature mirror filter g_k = (-1)^k h[n-1-k]."""
    n = len(h)
    g = np.array([(-1) ** k * h[n - 1 - k] for k in range(n)])
    size = len(phi)
    out = np.zeros(size)
    scale = 1 << depth
    u = np.arange(size)
    for k, gk in enumerate(g):
        src = 2 * u - k * scale
        ok = (src >= 0) & (src < size)
        out[ok] += SQRT2 * gk * phi[src[ok]]
    return out


@dataclass(eq=False)
class WaveletBasis:
    """Tabulated periodized wavelet pair on the unit interval.

    ``coarsest_level`` is the smallest level j at which the 2^j periodized
    translates form a genuine orthonormal family (2^j >= support_length).
    """

    family: str
    lowpass: np.ndarray
    support_length: int
    coarsest_level: int
    refine_depth: int
    phi_table: np.ndarray
    psi_table: np.ndarray

    @property
    def tau(self) -> int:
        return self.coarsest_level

    def table_grid(self) -> np.ndarray:
        """Abscissae of the tables: 0 .. support_length, step 2^-refine_depth."""
        return np.arange(len(self.phi_table)) / (1 << self.refine_depth)

    def _table_eval(self, table: np.ndarray, t: np.ndarray) -> np.ndarray:
        u = np.ldexp(t, self.refine_depth)
        i = np.floor(u).astype(np.int64)
        inside = (i >= 0) & (i < len(table) - 1)
        ic = np.clip(i, 0, len(table) - 2)
        frac = u - ic
        vals = table[ic] * (1.0 - frac) + table[ic + 1] * frac
        return np.where(inside, vals, 0.0)

    def base(self, kind: str, t) -> np.ndarray:
        """Unperiodized father/mother value at t (zero outside [0, support])."""
        t = np.asarray(t, dtype=float)
        if self.family == "haar":
            if kind == "father":
                return ((t >= 0.0) & (t < 1.0)).astype(float)
            # Jump convention: the positive lobe is closed on the right, so
            # psi(1/2) = +1; measure-zero choice, pinned by the eval contract.
            return np.where(
                (t >= 0.0) & (t <= 0.5), 1.0, np.where((t > 0.5) & (t < 1.0), -1.0, 0.0)
            )
        table = self.phi_table if kind == "father" else self.psi_table
        return self._table_eval(table, t)

    def eval(self, kind: str, j: int, k: int, x) -> np.ndarray:
        """Periodized basis function value: 2^{j/2} sum_l base(2^j (x - l) - k).

        ``kind`` is "father" or "mother"; requires j >= coarsest_level and
        0 <= k < 2^j.  x may be a scalar or array; values are 1-periodic.
        """
        if kind not in ("father", "mother"):
            raise ValueError(f"kind must be 'father' or 'mother', got {kind!r}")
        if j < self.coarsest_level:
            raise ValueError(
                f"level {j} below coarsest usable level {self.coarsest_level}"
            )
        if not 0 <= k < (1 << j):
            raise ValueError(f"translate k={k} out of range for level {j}")
        x = np.asarray(x, dtype=float)
        t = np.ldexp(np.mod(x, 1.0), j) - k
        total = np.zeros_like(t)
        for l in (-1, 0, 1):
            total += self.base(kind, t - l * (1 << j))
        return 2.0 ** (j / 2.0) * total


def make_basis(family: str, refine_depth: int = 12) -> WaveletBasis:
    """Construct a tabulated periodized basis for one of the built-in families.

    Raises ValueError for an unknown family or a refinement depth too small
    for the construction-time orthonormality checks.
    """
    key = _ALIASES.get(str(family).lower())
    if key is None:
        raise ValueError(
            f"unknown wavelet family {family!r}; supported: {', '.join(SUPPORTED_FAMILIES)}"
        )
    if refine_depth < 8:
        raise ValueError(
            f"refine_depth={refine_depth} too small: tabulation below depth 8 "
            "fails the orthonormality tolerance"
        )
    h = _FILTERS[key].copy()
    support = len(h) - 1
    tau = (support - 1).bit_length()
    if key == "haar":
        size = (1 << refine_depth) + 1
        t = np.arange(size) / (1 << refine_depth)
        phi = ((t >= 0.0) & (t < 1.0)).astype(float)
        psi = np.where((t <= 0.5), 1.0, -1.0)
        psi[-1] = 0.0
    else:
        phi = _integer_scaling_values(h)
        for lvl in range(refine_depth):
            phi = _refine(phi, h, lvl)
        psi = _wavelet_table(phi, h, refine_depth)
    basis = WaveletBasis(
        family=key,
        lowpass=h,
        support_length=support,
        coarsest_level=tau,
        refine_depth=refine_depth,
        phi_table=phi,
        psi_table=psi,
    )
    _validate_basis(basis)
    return basis


def _validate_basis(basis: WaveletBasis) -> None:
    h = basis.lowpass
    if abs(h.sum() - SQRT2) > 1e-12:
        raise ValueError(f"lowpass filter of {basis.family} does not sum to sqrt(2)")
    step = 0.5 ** basis.refine_depth
    tol = 2.0 ** (-basis.refine_depth / 2.0)
    phi_int = np.trapezoid(basis.phi_table, dx=step)
    psi_int = np.trapezoid(basis.psi_table, dx=step)
    if abs(phi_int - 1.0) > tol or abs(psi_int) > tol:
        raise ValueError(
            f"tabulated integrals of {basis.family} at depth {basis.refine_depth} "
            f"miss their targets (phi: {phi_int:.3e}, psi: {psi_int:.3e})"
        )
    # Orthonormality of the coarsest periodized scaling family.
    tau = basis.coarsest_level
    grid = 1 << min(tau + 12, 18)
    x = midpoint_grid(grid)
    mat = np.stack([basis.eval("father", tau, k, x) for k in range(1 << tau)])
    gram = mat @ mat.T / grid
    if np.max(np.abs(gram - np.eye(1 << tau))) > 1e-6:
        raise ValueError(
            f"periodized level-{tau} family of {basis.family} fails the "
            f"orthonormality check at depth {basis.refine_depth}"
        )


@dataclass(eq=False)
class CoefficientTree:
    """Wavelet coefficients: scaling at level j0, details on levels j0 .. jmax.

    ``jmax = j0 - 1`` encodes a tree with no detail levels.  ``beta[i]`` holds
    the 2^(j0+i) detail coefficients of level j0 + i.
    """

    j0: int
    jmax: int
    alpha: np.ndarray
    beta: list

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float)
        self.beta = [np.asarray(b, dtype=float) for b in self.beta]
        if len(self.alpha) != 1 << self.j0:
            raise ValueError(f"alpha must hold {1 << self.j0} values")
        if len(self.beta) != self.jmax - self.j0 + 1:
            raise ValueError("beta must hold one array per level j0..jmax")
        for i, b in enumerate(self.beta):
            if len(b) != 1 << (self.j0 + i):
                raise ValueError(f"level {self.j0 + i} must hold {1 << (self.j0 + i)} values")
        if not (np.all(np.isfinite(self.alpha)) and all(np.all(np.isfinite(b)) for b in self.beta)):
            raise ValueError("coefficients must be finite")

    def detail(self, j: int) -> np.ndarray:
        if not self.j0 <= j <= self.jmax:
            raise ValueError(f"level {j} outside [{self.j0}, {self.jmax}]")
        return self.beta[j - self.j0]

    def copy(self) -> "CoefficientTree":
        return CoefficientTree(
            self.j0, self.jmax, self.alpha.copy(), [b.copy() for b in self.beta]
        )


def _level_terms(basis: WaveletBasis, kind: str, j: int, x: np.ndarray):
    """Contributing (wrapped translate index, value) pairs of level j at x.

    By compact support, at most support_length + 1 translates are nonzero at
    any point; periodization is the wrap k mod 2^j.  Returns arrays of shape
    (support_length + 1, len(x)).
    """
    s = basis.support_length
    dim = 1 << j
    t = np.ldexp(x, j)
    k0 = np.floor(t).astype(np.int64)
    amp = 2.0 ** (j / 2.0)
    idx = np.empty((s + 1, x.size), dtype=np.int64)
    val = np.empty((s + 1, x.size))
    for m in range(s + 1):
        val[m] = amp * basis.base(kind, t - k0 + m)
        idx[m] = (k0 - m) % dim
    return idx, val


def _level_sums(
    basis: WaveletBasis,
    kind: str,
    j: int,
    x: np.ndarray,
    weights: np.ndarray,
    canonical: bool = False,
) -> np.ndarray:
    """Per-translate weighted sums sum_i w_i f_{j,k}(x_i) for k = 0 .. 2^j - 1.

    With ``canonical=True`` the terms are reduced in sorted (index, value)
    order, which makes the result bit-identical under any permutation of the
    input points.
    """
    dim = 1 << j
    idx, val = _level_terms(basis, kind, j, x)
    flat = idx.ravel()
    terms = (val * weights).ravel()
    out = np.zeros(dim)
    if canonical:
        order = np.lexsort((terms, flat))
        flat = flat[order]
        terms = terms[order]
        starts = np.flatnonzero(np.r_[True, flat[1:] != flat[:-1]])
        out[flat[starts]] = np.add.reduceat(terms, starts)
    else:
        out = np.bincount(flat, weights=terms, minlength=dim)
    return out


def evaluate_tree(basis: WaveletBasis, tree: CoefficientTree, x) -> np.ndarray:
    """Evaluate the finite wavelet series of ``tree`` at arbitrary points."""
    x = np.mod(np.asarray(x, dtype=float), 1.0)
    idx, val = _level_terms(basis, "father", tree.j0, x)
    out = np.einsum("mi,mi->i", tree.alpha[idx], val)
    for i, b in enumerate(tree.beta):
        idx, val = _level_terms(basis, "mother", tree.j0 + i, x)
        out += np.einsum("mi,mi->i", b[idx], val)
    return out


def synthesize(basis: WaveletBasis, tree: CoefficientTree, grid_size: int) -> np.ndarray:
    """Values of the wavelet series on the midpoint grid of ``grid_size`` points."""
    if grid_size < 1 << (max(tree.jmax, tree.j0) + 2):
        raise ValueError(
            f"grid_size={grid_size} cannot resolve levels up to {tree.jmax}"
        )
    return evaluate_tree(basis, tree, midpoint_grid(grid_size))


def exact_coefficients(
    basis: WaveletBasis, values: np.ndarray, j0: int, jmax: int
) -> CoefficientTree:
    """Quadrature coefficients of a function given by grid values.

    Serves as the ground-truth oracle for the regression estimators: each
    coefficient is the periodic trapezoid approximation of the integral of
    f against the corresponding basis function.
    """
    values = np.asarray(values, dtype=float)
    if not basis.coarsest_level <= j0 <= max(jmax, j0):
        raise ValueError(f"need coarsest_level <= j0, got j0={j0}")
    if jmax >= j0 and len(values) < 1 << (jmax + 6):
        raise ValueError(
            f"grid of {len(values)} points cannot resolve coefficients to level {jmax}"
        )
    grid = len(values)
    x = midpoint_grid(grid)
    w = values / grid
    alpha = _level_sums(basis, "father", j0, x, w)
    beta = [_level_sums(basis, "mother", j, x, w) for j in range(j0, jmax + 1)]
    return CoefficientTree(j0=j0, jmax=jmax, alpha=alpha, beta=beta)


def concentration_ratio(basis: WaveletBasis, j: int, m: float, grid_size: int) -> float:
    """Empirical constant of the level-j translate concentration bound.

    Returns max_x 2^{-jm/2} sum_k |psi_{j,k}(x)|^m over the midpoint grid.
    Compact support bounds this uniformly in j, so the returned value
    estimates the best constant of the bound sum_k |psi_{j,k}(x)|^m <= C 2^{jm/2}.
    """
    if j < basis.coarsest_level:
        raise ValueError(f"level {j} below coarsest usable level {basis.coarsest_level}")
    if m <= 0:
        raise ValueError("m must be positive")
    if grid_size < 1 << (j + 4):
        raise ValueError(f"grid_size={grid_size} too coarse for level {j}")
    x = midpoint_grid(grid_size)
    _, val = _level_terms(basis, "mother", j, x)
    # Distinct rows hit distinct translates for every j >= coarsest_level
    # (aliasing would need 2^j <= support_length with a nonzero wrapped term,
    # which the support inspection rules out for the built-in families).
    total = np.abs(val) ** m
    return float(total.sum(axis=0).max() * 2.0 ** (-j * m / 2.0))
