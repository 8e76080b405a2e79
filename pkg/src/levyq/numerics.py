"""Shared numeric substrate.

Uniform symmetric frequency grids, discrete inverse Fourier transforms of
band-limited spectra, and bracketed root finding.  Everything here is pure
and deterministic; adaptive quadrature is deliberately left to the test
oracles (scipy.integrate.quad) so the production path stays reproducible.

Fourier convention: the forward transform of f is F(u) = int e^{iux} f(x) dx,
hence the inverse used throughout is (1/2pi) int e^{-iux} F(u) du.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NoSolutionError

__all__ = [
    "FrequencyGrid",
    "SampledFunction",
    "inverse_fourier",
    "bracketed_root",
]


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass(frozen=True)
class FrequencyGrid:
    """Symmetric uniform grid on [-cutoff, cutoff].

    Parameters
    ----------
    cutoff : float
        Half-width of the frequency window (the reciprocal bandwidth 1/h
        when used for kernel-smoothed inversion).
    points : int
        Number of nodes, a power of two.
    offset : bool
        If True, use a midpoint (half-step-shifted) grid.  Both layouts
        omit u = 0; the offset layout additionally keeps every node at
        least half a step away from it, which is convenient for spectra
        with a removable singularity at the origin.

    Notes
    -----
    With ``offset=False`` the nodes are ``linspace(-cutoff, cutoff, points)``
    and ``spacing * (points - 1)`` spans exactly ``[-cutoff, cutoff]``;
    quadrature weights are composite trapezoid.  With ``offset=True`` the
    nodes sit at cell midpoints ``(j + 1/2) * spacing`` for
    ``j = -points/2 .. points/2 - 1`` with ``spacing = 2 * cutoff / points``;
    weights are the midpoint rule, and the cell edges span the same window.
    """

    cutoff: float
    points: int = 2 ** 14
    offset: bool = False

    def __post_init__(self):
        if not self.cutoff > 0:
            raise InputError(f"cutoff must be positive, got {self.cutoff}")
        if not _is_power_of_two(self.points) or self.points < 2:
            raise InputError(f"points must be a power of two >= 2, got {self.points}")

    @property
    def spacing(self) -> float:
        if self.offset:
            return 2.0 * self.cutoff / self.points
        return 2.0 * self.cutoff / (self.points - 1)

    @property
    def u(self) -> np.ndarray:
        """Node locations, symmetric about 0 and excluding 0."""
        if self.offset:
            j = np.arange(self.points) - self.points // 2
            return (j + 0.5) * self.spacing
        return np.linspace(-self.cutoff, self.cutoff, self.points)

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weights matching the node layout."""
        w = np.full(self.points, self.spacing)
        if not self.offset:
            w[0] *= 0.5
            w[-1] *= 0.5
        return w


@dataclass(frozen=True)
class SampledFunction:
    """A function tabulated on strictly increasing abscissae."""

    abscissae: np.ndarray
    ordinates: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.abscissae, dtype=float)
        y = np.asarray(self.ordinates)
        if x.ndim != 1 or y.ndim != 1 or x.size != y.size:
            raise InputError("abscissae and ordinates must be 1-d of equal length")
        if x.size > 1 and not np.all(np.diff(x) > 0):
            raise InputError("abscissae must be strictly increasing")
        object.__setattr__(self, "abscissae", x)
        object.__setattr__(self, "ordinates", y)


# number of target points transformed per chunk; bounds the size of the
# e^{-iux} work array to roughly chunk * points complex values
_CHUNK = 64


def inverse_fourier(spectrum, grid: FrequencyGrid, targets) -> SampledFunction:
    """Inverse Fourier transform of a band-limited spectrum.

    Evaluates (1/2pi) * sum_j w_j e^{-i u_j x} g(u_j) at each target x,
    where the u_j and w_j come from `grid`.  `spectrum` may be a callable
    of the node array or an array already aligned with ``grid.u``.
    """
    x = np.atleast_1d(np.asarray(targets, dtype=float))
    u = grid.u
    g = spectrum(u) if callable(spectrum) else np.asarray(spectrum)
    if g.shape != u.shape:
        raise InputError("spectrum array must match the grid nodes")
    wg = grid.weights * g
    out = np.empty(x.size, dtype=complex)
    for lo in range(0, x.size, _CHUNK):
        xs = x[lo : lo + _CHUNK, None]
        out[lo : lo + _CHUNK] = np.exp(-1j * xs * u[None, :]) @ wg
    out /= 2.0 * np.pi
    order = np.argsort(x, kind="stable")
    return SampledFunction(x[order], out[order])


def bracketed_root(f, lo: float, hi: float, tol: float = 1e-8) -> float:
    """Bisection root of f on [lo, hi] down to interval width <= tol.

    Requires a sign change: f(lo) * f(hi) <= 0.
    """
    if not hi > lo:
        raise InputError("need lo < hi")
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise NoSolutionError(f"no sign change on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
