"""Sigmoidal negative-binomial regression of expression counts on pseudotime.

The mean curve is a scaled logistic function of pseudotime,

    tau(t) = 2*mu / (1 + exp(-k*(t - t0)))

so the expected count rises (k > 0) or falls (k < 0) from near 0 to near
2*mu, crossing mu at t = t0.  Counts are negative binomial in the mean
parameterization: mean tau, variance tau + tau^2/phi, with integer
dispersion phi >= 1.  Fitting minimizes the negative log-likelihood over
a box: t0 within the observed pseudotime range, 2*mu within the observed
count range, and user-supplied bounds on k and phi.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .pso import BoxDomain

# Floor on the sigmoid mean: keeps log(tau) finite when the exponential
# saturates, so the objective is finite everywhere on the box.
TAU_FLOOR = 1e-12
# Clamp on the exp argument to avoid overflow at extreme k*(t - t0).
EXP_CLAMP = 700.0
# Lower guard on the mu box when the smallest observed count is 0.
MU_FLOOR = 1e-6

DEFAULT_K_BOUNDS = (-20.0, 20.0)
DEFAULT_PHI_MAX = 200


@dataclass
class NbParams:
    """Model parameter vector (k_g, t_g, mu_g, phi_g).

    k_g: activation strength (sign gives up- vs down-regulation).
    t_g: activation time, in pseudotime units.
    mu_g: average peak expression; the curve ranges over (0, 2*mu_g).
    phi_g: integer negative-binomial dispersion, >= 1.
    """

    k_g: float
    t_g: float
    mu_g: float
    phi_g: int

    def __post_init__(self):
        self.k_g = float(self.k_g)
        self.t_g = float(self.t_g)
        self.mu_g = float(self.mu_g)
        if not float(self.phi_g).is_integer():
            raise ValueError(f"phi_g must be an integer, got {self.phi_g}")
        self.phi_g = int(self.phi_g)
        if self.mu_g <= 0:
            raise ValueError("mu_g must be positive")
        if self.phi_g < 1:
            raise ValueError("phi_g must be >= 1")


@dataclass(eq=False)
class Dataset:
    """Paired (pseudotime, count) observations for a single gene.

    Immutable after construction; log-gamma terms that depend only on the
    counts are cached so repeated likelihood evaluations stay cheap.
    """

    times: np.ndarray
    counts: np.ndarray
    _lg_counts1: np.ndarray = field(init=False, repr=False)
    _lg_cache: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        counts = np.asarray(self.counts)
        if self.times.ndim != 1 or counts.ndim != 1:
            raise ValueError("times and counts must be 1-d vectors")
        if self.times.size != counts.size or self.times.size < 1:
            raise ValueError("times and counts must have equal length >= 1")
        if not np.all(np.isfinite(self.times)):
            raise ValueError("times must be finite")
        if not np.issubdtype(counts.dtype, np.integer):
            if not np.all(np.isfinite(counts)) or np.any(counts != np.floor(counts)):
                raise ValueError("counts must be integers")
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        self.counts = counts.astype(np.int64)
        self._lg_counts1 = gammaln(self.counts + 1)
        self._lg_cache = {}

    def __len__(self) -> int:
        return self.times.size

    def _lg_counts_plus(self, phi: int) -> np.ndarray:
        cached = self._lg_cache.get(phi)
        if cached is None:
            cached = gammaln(self.counts + phi)
            self._lg_cache[phi] = cached
        return cached


def sigmoid_mean(t, params: NbParams):
    """Mean count at pseudotime t; accepts a scalar or an array.

    Floored at TAU_FLOOR so the result is strictly positive even when the
    sigmoid saturates toward 0.
    """
    z = np.clip(-params.k_g * (t - params.t_g), -EXP_CLAMP, EXP_CLAMP)
    return np.maximum(2.0 * params.mu_g / (1.0 + np.exp(z)), TAU_FLOOR)


def nb_log_pmf(y, tau, phi):
    """Log-probability of count y under NB(mean=tau, dispersion=phi).

    Computed in log space via log-gamma:

        lgamma(y+phi) - lgamma(y+1) - lgamma(phi)
            + y*log(tau/(tau+phi)) + phi*log(phi/(tau+phi))

    Accepts scalars or arrays (broadcast elementwise).
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0):
        raise ValueError("tau must be positive")
    if phi < 1:
        raise ValueError("phi must be >= 1")
    return (
        gammaln(y + phi)
        - gammaln(y + 1)
        - gammaln(phi)
        + y * np.log(tau / (tau + phi))
        + phi * np.log(phi / (tau + phi))
    )


def neg_log_likelihood(params: NbParams, data: Dataset) -> float:
    """Negative log-likelihood of the dataset under the given parameters.

    Finite for every valid parameter vector thanks to the sigmoid floor.
    Equivalent to -sum(nb_log_pmf(y_c, tau(t_c), phi)) but reuses the
    dataset's cached log-gamma terms.
    """
    phi = params.phi_g
    tau = sigmoid_mean(data.times, params)
    terms = (
        data._lg_counts_plus(phi)
        - data._lg_counts1
        - gammaln(phi)
        + data.counts * np.log(tau / (tau + phi))
        + phi * np.log(phi / (tau + phi))
    )
    return -float(np.sum(terms))


def build_domain(
    data: Dataset,
    k_bounds: tuple[float, float] = DEFAULT_K_BOUNDS,
    phi_max: int = DEFAULT_PHI_MAX,
) -> BoxDomain:
    """Feasible box for the fit, in coordinate order (k, t, mu, phi).

    The t box is the observed pseudotime range and the mu box is half the
    observed count range; k and phi bounds are caller-supplied knobs.  A
    zero minimum count would force mu to 0, so the mu lower bound is
    guarded at MU_FLOOR.
    """
    k_lo, k_hi = float(k_bounds[0]), float(k_bounds[1])
    if not k_lo < k_hi:
        raise ValueError("k_bounds must satisfy lower < upper")
    if phi_max < 1:
        raise ValueError("phi_max must be >= 1")
    t_lo = float(data.times.min())
    t_hi = float(data.times.max())
    y_min = int(data.counts.min())
    y_max = int(data.counts.max())
    mu_lo = max(y_min / 2.0, MU_FLOOR)
    mu_hi = y_max / 2.0
    if y_min == y_max:
        warnings.warn(
            "all counts are equal; the mu box degenerates to a point",
            stacklevel=2,
        )
        mu_hi = max(mu_hi, mu_lo)
    return BoxDomain(
        lower=np.array([k_lo, t_lo, mu_lo, 1.0]),
        upper=np.array([k_hi, t_hi, mu_hi, float(phi_max)]),
    )


def decode_position(x) -> NbParams:
    """Map a 4-d search vector to model parameters.

    The first three coordinates pass through; the dispersion coordinate is
    rounded half-up to the nearest integer and clamped below at 1, which
    makes the objective piecewise constant in that coordinate.
    """
    x = np.asarray(x, dtype=float)
    phi = max(1, int(math.floor(float(x[3]) + 0.5)))
    return NbParams(float(x[0]), float(x[1]), float(x[2]), phi)


def make_objective(data: Dataset) -> Callable[[np.ndarray], float]:
    """Objective over the 4-d search box: x -> NLL(decode_position(x), data).

    Pure and safe for concurrent invocation; permutation of the dataset
    rows leaves it unchanged pointwise.
    """

    def objective(x: np.ndarray) -> float:
        return neg_log_likelihood(decode_position(x), data)

    return objective


def save_dataset(data: Dataset, path) -> None:
    """Write the dataset as CSV with header ``t,y``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "y"])
        for t, y in zip(data.times, data.counts):
            writer.writerow([repr(float(t)), int(y)])


def load_dataset(path) -> Dataset:
    """Read a ``t,y`` CSV.  Row order is irrelevant to the likelihood."""
    times: list[float] = []
    counts: list[int] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "y"]:
            raise ValueError(f"{path}: expected CSV header 't,y'")
        for row in reader:
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}: malformed row {row!r}")
            times.append(float(row[0]))
            counts.append(int(row[1]))
    if not times:
        raise ValueError(f"{path}: no data rows")
    return Dataset(times=np.array(times), counts=np.array(counts))
