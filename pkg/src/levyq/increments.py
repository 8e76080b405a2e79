"""Curvature estimation from equally spaced increments of the process.

Given n increments Y_k observed at time spacing delta, the empirical
characteristic function and its first two derivatives

    phi^(k)(u) = (1/n) sum_j (i Y_j)^k e^{i u Y_j},   k = 0, 1, 2,

combine into an estimate of the second derivative of the characteristic
exponent,

    psi2(u) = [phi''(u) phi(u) - phi'(u)^2] / (delta phi(u)^2),

kept only on the trust region |phi(u)| >= (delta n)^{-1/2} and set to 0
elsewhere.  The ratio is exactly invariant under adding a constant to every
increment (the e^{iuc} factors cancel), so no drift correction is needed.

`Psi2Estimate` is the common currency handed to the inversion stage by both
this scheme and the option-implied scheme.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = [
    "IncrementSample",
    "Psi2Estimate",
    "ecf_derivative",
    "psi2_from_increments",
    "read_increment_csv",
    "write_increment_csv",
]

_SCHEME_TAGS = ("direct", "option")


@dataclass(frozen=True)
class IncrementSample:
    """n real increments observed at uniform time spacing delta."""

    values: np.ndarray
    delta: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 1:
            raise InputError("increments must be a non-empty 1-d array")
        if not np.all(np.isfinite(vals)):
            raise InputError("increments must be finite")
        if not self.delta > 0:
            raise InputError(f"time spacing must be positive, got {self.delta}")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class Psi2Estimate:
    """An estimated exponent curvature u -> psi2(u).

    `eval` is a pure vectorized function of frequency returning complex
    values (Hermitian up to floating point).  `valid_cutoff` is the largest
    frequency the producing scheme considers usable (math.inf when the
    trust region is enforced pointwise inside `eval` itself).
    """

    eval: object
    valid_cutoff: float
    scheme_tag: str

    def __post_init__(self):
        if self.scheme_tag not in _SCHEME_TAGS:
            raise InputError(f"scheme_tag must be one of {_SCHEME_TAGS}")

    def __call__(self, u):
        return self.eval(u)


# cap on the size of the e^{iuY} work array (complex entries) per chunk
_WORK_ENTRIES = 2 ** 21


def _ecf_all(values: np.ndarray, u: np.ndarray):
    """Empirical cf and its first two derivatives, one sample pass per chunk.

    Returns (phi0, phi1, phi2) arrays aligned with u, where
    phi_k(u) = (1/n) sum (iY)^k e^{iuY}.
    """
    n = values.size
    w1 = 1j * values
    w2 = -(values * values)
    phi0 = np.empty(u.size, dtype=complex)
    phi1 = np.empty(u.size, dtype=complex)
    phi2 = np.empty(u.size, dtype=complex)
    chunk = max(1, _WORK_ENTRIES // max(n, 1))
    for lo in range(0, u.size, chunk):
        E = np.exp(1j * u[lo : lo + chunk, None] * values[None, :])
        phi0[lo : lo + chunk] = E.mean(axis=1)
        phi1[lo : lo + chunk] = E @ w1 / n
        phi2[lo : lo + chunk] = E @ w2 / n
    return phi0, phi1, phi2


def ecf_derivative(sample: IncrementSample, u, k: int):
    """k-th derivative of the empirical characteristic function at u.

    (1/n) sum_j (i Y_j)^k e^{i u Y_j} for k in {0, 1, 2}; vectorized in u.
    """
    if k not in (0, 1, 2):
        raise InputError(f"derivative order must be 0, 1 or 2, got {k}")
    u_arr = np.atleast_1d(np.asarray(u, dtype=float))
    out = _ecf_all(sample.values, u_arr)[k]
    return out[0] if np.isscalar(u) or np.ndim(u) == 0 else out


def _curvature_ratio(phi0, phi1, phi2, delta: float):
    """Exponent curvature from a cf and its derivatives.

    (phi2 phi0 - phi1^2) / (delta phi0^2); algebraically equals psi''(u)
    when phi_k are the true derivatives of e^{delta psi}.
    """
    return (phi2 * phi0 - phi1 * phi1) / (delta * phi0 * phi0)


def psi2_from_increments(sample: IncrementSample) -> Psi2Estimate:
    """Curvature estimate from increments, zeroed off the trust region.

    The trust region is |phi(u)| >= (delta n)^{-1/2}; outside it the
    estimate is exactly 0 so downstream integrals simply drop those
    frequencies.
    """
    if sample.n < 2:
        raise InputError("need at least 2 increments")
    values = sample.values
    delta = sample.delta
    threshold = 1.0 / math.sqrt(delta * sample.n)

    def evaluate(u):
        scalar = np.isscalar(u) or np.ndim(u) == 0
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        phi0, phi1, phi2 = _ecf_all(values, u_arr)
        trusted = np.abs(phi0) >= threshold
        # guard the division as well: off the trust region phi0 may be ~0
        safe0 = np.where(trusted, phi0, 1.0)
        vals = np.where(
            trusted, _curvature_ratio(safe0, phi1, phi2, delta), 0.0 + 0.0j
        )
        return vals[0] if scalar else vals

    return Psi2Estimate(eval=evaluate, valid_cutoff=math.inf, scheme_tag="direct")


def read_increment_csv(path, delta: float) -> IncrementSample:
    """Load increments from a one-column CSV with header ``increment``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        if [h.strip().lower() for h in header] != ["increment"]:
            raise InputError(
                f"{path}: expected single-column header 'increment', got {header!r}"
            )
        values = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 1:
                raise InputError(f"{path}:{lineno}: expected one column, got {len(row)}")
            try:
                values.append(float(row[0]))
            except ValueError:
                raise InputError(
                    f"{path}:{lineno}: not a number: {row[0]!r}"
                ) from None
    if not values:
        raise InputError(f"{path}: no increment rows")
    return IncrementSample(values=np.asarray(values), delta=delta)


def write_increment_csv(path, sample: IncrementSample) -> None:
    """Write increments in the format `read_increment_csv` accepts."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["increment"])
        for v in sample.values:
            writer.writerow([repr(float(v))])
