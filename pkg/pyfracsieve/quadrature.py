# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Nested integrals T_r weighting the switched upper bound of the sieve.

For r >= 4 and a lower exponent L,

    T_r = int ... int omega((1 - t_1 - ... - t_r) / t_r)
                      / (t_1 ... t_{r-1} t_r^2)  dt_r ... dt_1

over L <= t_1 <= 1/(r + 1), t_i <= t_{i+1} <= (1 - t_1 - ... - t_i)/(r - i + 1).

Substituting t_j = A_j / y_j, A_j being what the outer variables leave of 1,
every nested level depends on a single ratio, and

    Psi_1(y)     = int_1^{y-1} omega(v) dv
    Psi_{j+1}(y) = int_{j+1}^{y-1} Psi_j(v) / v dv
    T_r          = Psi_r(1 / L).

integrate_Tr evaluates the levels innermost first, each one by adaptive
piecewise Gauss-Legendre fits whose antiderivative feeds the next level.
integrate_Tr_qmc estimates the same integral from scrambled Sobol' points in
the original r variables.

"""

import logging
import math
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.polynomial import legendre
from scipy.stats import qmc

from .errors import ConfigurationError, ConsistencyError, ConvergenceError, DomainError
from .init import get_default_tables

logger = logging.getLogger(__name__)


__all__ = [
    "IntegralResult",
    "QuadSpec",
    "integrand",
    "integrand_support",
    "integrate_Tr",
    "integrate_Tr_qmc",
    "region_volume",
    "standard_lower_exponent",
]


NESTED_ADAPTIVE = "nested_adaptive"

QMC = "qmc"

#: Dimensions supported by the integrators.
MIN_R, MAX_R = 4, 7

#: Smallest sample size accepted by the quasi Monte Carlo estimator.
MIN_MC_SAMPLES = 10**4

#: Rounding slack on the faces of the region.
_REGION_SLACK = 1e-14

#: Slack on the argument of omega.
_OMEGA_SLACK = 1e-12


def standard_lower_exponent(r):
    """Lower exponent attached to r: 1/14 for r = 4 and 1/12 above."""
    return 1 / 14 if r == 4 else 1 / 12


@dataclass(frozen=True)
class QuadSpec:
    """Description of one T_r integral and of how to evaluate it.

    Attributes
    ----------
    r : int
        Dimension, 4 <= r <= 7.
    lower_exponent : float, optional
        Lower limit L of t_1. None selects standard_lower_exponent(r).
    rel_tol, abs_tol : float
        The nested driver targets an error below max(abs_tol, rel_tol |T_r|).
    max_depth : int
        Number of bisections allowed on each unit panel.
    gauss_order : int
        Number of nodes of the coarse Gauss-Legendre rule, the refined rule
        using twice as many.
    mc_samples : int
        Total number of quasi Monte Carlo points.
    mc_seed : int
        Seed of the Sobol' scramblings.
    mc_replicates : int
        Number of independent scramblings used for the uncertainty.
    mc_mapping : {"nested", "box"}
        Map the unit cube onto the region through the nested limits or
        sample the bounding box with an indicator.
    threads : int
        Worker threads used by the integrators. Results do not depend on it.

    """

    r: int
    lower_exponent: float | None = None
    rel_tol: float = 1e-5
    abs_tol: float = 1e-7
    max_depth: int = 12
    gauss_order: int = 8
    mc_samples: int = 2**20
    mc_seed: int = 0
    mc_replicates: int = 16
    mc_mapping: str = "nested"
    threads: int = field(default=1, compare=False)

    def __post_init__(self):
        if self.r not in range(MIN_R, MAX_R + 1):
            mess = "r must be between {} and {}, got {}"
            raise ConfigurationError(mess.format(MIN_R, MAX_R, self.r))
        if self.lower_exponent is not None and not 0 < self.lower_exponent < 1:
            mess = "The lower exponent must lie in (0, 1), got {}"
            raise ConfigurationError(mess.format(self.lower_exponent))
        if not (self.rel_tol >= 0 and self.abs_tol > 0):
            raise ConfigurationError("Tolerances must be positive")
        if self.max_depth < 0 or self.gauss_order < 2:
            raise ConfigurationError("max_depth must be >= 0 and gauss_order >= 2")
        if self.mc_replicates < 2:
            raise ConfigurationError("At least two replicates are needed")
        if self.mc_mapping not in ("nested", "box"):
            raise ConfigurationError("Unknown mapping {}".format(self.mc_mapping))
        if self.threads < 1:
            raise ConfigurationError("threads must be >= 1")

    @property
    def lower(self):
        """Effective lower exponent L."""
        if self.lower_exponent is None:
            return standard_lower_exponent(self.r)
        return self.lower_exponent

    @property
    def upper(self):
        """Upper limit 1/(r + 1) of the outermost variable."""
        return 1 / (self.r + 1)

    @property
    def omega_range(self):
        """Largest argument of omega met on the region, (1 - r L) / L."""
        return (1 - self.r * self.lower) / self.lower

    def for_r(self, r):
        """Same settings for another dimension, with its standard exponent."""
        return replace(self, r=r, lower_exponent=None)

    def cache_key(self):
        """Hashable summary of everything the value depends on."""
        return (
            self.r,
            self.lower,
            self.rel_tol,
            self.abs_tol,
            self.max_depth,
            self.gauss_order,
        )


@dataclass(frozen=True)
class IntegralResult:
    """Value of T_r together with its error estimate.

    provenance records the parameters the value depends on (dimension, lower
    exponent, tolerances or seed).

    """

    value: float
    error_estimate: float
    evaluations: int
    method: str
    provenance: dict = field(default_factory=dict, compare=False)


def integrand_support(t, spec):
    """Boolean mask of the points of an (n, r) array lying in the region."""
    t = np.atleast_2d(np.asarray(t, dtype=np.float64))
    sums = np.cumsum(t, axis=1)
    inside = (t[:, 0] >= spec.lower - _REGION_SLACK) & (
        t[:, 0] <= spec.upper + _REGION_SLACK
    )
    inside &= np.all(np.diff(t, axis=1) >= -_REGION_SLACK, axis=1)
    caps = (1.0 - sums[:, :-1]) / np.arange(spec.r, 1, -1)
    inside &= np.all(t[:, 1:] <= caps + _REGION_SLACK, axis=1)
    return inside


def integrand(t, spec, tables=None):
    """Integrand of T_r, zero outside the closed region.

    Parameters
    ----------
    t : array-like
        One point of shape (r,) or a batch of shape (n, r).
    spec : QuadSpec
        Dimension and lower exponent.
    tables : SieveTables, optional
        Tables used for omega, the default ones if omitted.

    Raises
    ------
    ConsistencyError : if a point of the region yields an omega argument
        below 1 by more than the rounding slack.

    """
    tables = tables or get_default_tables()
    t = np.asarray(t, dtype=np.float64)
    single = t.ndim == 1
    t = np.atleast_2d(t)
    r = spec.r
    if t.shape[1] != r:
        raise DomainError("Expected points of dimension {}, got {}".format(r, t.shape[1]))

    sums = np.cumsum(t, axis=1)
    inside = integrand_support(t, spec)

    out = np.zeros(len(t))
    if inside.any():
        ti = t[inside]
        arg = (1.0 - sums[inside, -1]) / ti[:, -1]
        if arg.min() < 1.0 - _OMEGA_SLACK:
            mess = "omega argument {!r} below 1 inside the region"
            raise ConsistencyError(mess.format(arg.min()))
        arg = np.maximum(arg, 1.0)
        out[inside] = tables.omega(arg) / (np.prod(ti[:, :-1], axis=1) * ti[:, -1] ** 2)
    return float(out[0]) if single else out


def region_volume(spec):
    """Volume of the integration region of T_r.

    The limits are linear in the outer variables so a nested Gauss-Legendre
    rule with r nodes per level is exact.

    """
    r, lower, upper = spec.r, spec.lower, spec.upper
    if upper <= lower:
        return 0.0
    x, w = legendre.leggauss(r)
    lo, hi = np.array([lower]), np.array([upper])
    weights, sums = np.ones(1), np.zeros(1)
    for i in range(r):
        half = np.maximum(hi - lo, 0.0) / 2
        t = (lo[:, None] + half[:, None] * (x + 1)).ravel()
        weights = (weights[:, None] * half[:, None] * w).ravel()
        sums = np.repeat(sums, len(x)) + t
        lo, hi = t, (1.0 - sums) / max(r - i, 1)
    return math.fsum(weights)


# --- Nested adaptive driver --------------------------------------------------


_Panel = namedtuple("_Panel", "start stop coeffs integral error evaluations")


class _Antiderivative(object):
    """Piecewise Legendre representation of G(x) = int_a^x g on [a, b]."""

    def __init__(self, panels):
        self.edges = np.array([p.start for p in panels] + [panels[-1].stop])
        self.coeffs = np.array([p.coeffs for p in panels]).T
        integrals = [p.integral for p in panels]
        self.offsets = np.concatenate(([0.0], np.cumsum(integrals[:-1])))
        self.total = math.fsum(integrals)
        self.error = math.fsum(p.error for p in panels)
        self.evaluations = sum(p.evaluations for p in panels)

    @property
    def start(self):
        return self.edges[0]

    @property
    def stop(self):
        return self.edges[-1]

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.size and x.max() > self.stop + 1e-9:
            mess = "Nested level evaluated at {!r} beyond its range {!r}"
            raise ConsistencyError(mess.format(x.max(), self.stop))
        x = np.clip(x, self.start, self.stop)
        idx = np.clip(np.searchsorted(self.edges, x, side="right") - 1, 0, len(self.offsets) - 1)
        a, b = self.edges[idx], self.edges[idx + 1]
        xi = (2 * x - a - b) / (b - a)
        local = legendre.legval(xi, self.coeffs[:, idx], tensor=False)
        return self.offsets[idx] + local


def _rules(order):
    return legendre.leggauss(order), legendre.leggauss(2 * order)


def _antiderivative_coeffs(values, nodes, weights, half):
    k = np.arange(len(nodes))
    coeffs = legendre.legvander(nodes, len(nodes) - 1).T @ (weights * values)
    coeffs *= (2 * k + 1) / 2
    return legendre.legint(coeffs, lbnd=-1) * half


def _fit_panel(g, start, stop, rules):
    (xc, wc), (xf, wf) = rules
    half = (stop - start) / 2
    coarse = _antiderivative_coeffs(g(start + half * (xc + 1)), xc, wc, half)
    fine = _antiderivative_coeffs(g(start + half * (xf + 1)), xf, wf, half)
    probe = np.concatenate((xf, [1.0]))
    error = float(np.max(np.abs(legendre.legval(probe, fine) - legendre.legval(probe, coarse))))
    integral = float(legendre.legval(1.0, fine))
    return _Panel(start, stop, fine, integral, error, len(xc) + len(xf))


def _refine(g, start, stop, tol, depth, rules, max_depth):
    panel = _fit_panel(g, start, stop, rules)
    if panel.error <= tol or depth >= max_depth:
        return [panel]
    mid = (start + stop) / 2
    return _refine(g, start, mid, tol / 2, depth + 1, rules, max_depth) + _refine(
        g, mid, stop, tol / 2, depth + 1, rules, max_depth
    )


def _unit_edges(start, stop):
    inner = np.arange(math.floor(start) + 1, math.ceil(stop))
    return np.concatenate(([start], inner[inner > start], [stop]))


def _integrate_level(g, start, stop, tol, rules, max_depth, executor):
    """Adaptive antiderivative of g on [start, stop] on unit panels."""
    edges = _unit_edges(start, stop)
    length = stop - start

    def work(bounds):
        a, b = bounds
        return _refine(g, a, b, tol * (b - a) / length, 0, rules, max_depth)

    bounds = list(zip(edges[:-1], edges[1:]))
    mapped = executor.map(work, bounds) if executor else map(work, bounds)
    return _Antiderivative([p for panels in mapped for p in panels])


def _first_level(tables, top):
    def psi(y):
        v = np.maximum(np.asarray(y, dtype=np.float64) - 1.0, 1.0)
        if v.size and v.max() > top + _OMEGA_SLACK:
            mess = "omega integrated up to {!r} beyond {!r}"
            raise ConsistencyError(mess.format(v.max(), top))
        return tables.omega_integral(np.minimum(v, max(top, 1.0)))

    return psi


def _level_function(antiderivative):
    def psi(y):
        return antiderivative(np.asarray(y, dtype=np.float64) - 1.0)

    return psi


def _nested_pass(spec, tables, budget, max_depth, executor):
    """Run all the levels once for a given error budget.

    Returns the value, its error bound and the number of evaluations.

    """
    r = spec.r
    inverse = 1.0 / spec.lower
    top = spec.omega_range
    # Level j integrates Psi_{j-1}(v) / v over [j, inverse - (r - j) - 1].
    stops = {j: inverse - (r - j) - 1 for j in range(2, r + 1)}
    gains = {j: max(math.log(stops[j] / j), 0.0) for j in range(2, r + 1)}

    def amplification(j):
        return math.prod(gains[i] for i in range(j + 1, r + 1))

    error = tables.tolerance * max(1.0, top - 1.0)
    table_share = error * amplification(1)
    quad_budget = max(budget - table_share, budget / 2) / (r - 1)

    rules = _rules(spec.gauss_order)
    psi = _first_level(tables, top)
    evaluations = 0
    for j in range(2, r + 1):
        amp = amplification(j)
        tol = quad_budget / amp if amp > 0 else math.inf

        def g(v, psi=psi):
            return psi(v) / v

        level = _integrate_level(g, float(j), stops[j], tol, rules, max_depth, executor)
        error = error * gains[j] + level.error
        evaluations += level.evaluations
        mess = "Level {} of T_{} on [{}, {:.6g}]: {} panels, error {:.3g}"
        logger.debug(mess.format(j, r, j, stops[j], len(level.offsets), level.error))
        psi = _level_function(level)
    return level.total, error, evaluations


def integrate_Tr(spec, tables=None):
    """Compute T_r with the nested adaptive driver.

    Parameters
    ----------
    spec : QuadSpec
        Integral description.
    tables : SieveTables, optional
        Tables used for omega, the default ones if omitted.

    Returns
    -------
    result : IntegralResult
        Value with an error estimate below max(abs_tol, rel_tol |value|).

    Raises
    ------
    ConvergenceError : if the budget is not met within max_depth bisections.
        The exception carries the best estimate.

    """
    tables = tables or get_default_tables()
    provenance = {
        "r": spec.r,
        "lower_exponent": spec.lower,
        "rel_tol": spec.rel_tol,
        "abs_tol": spec.abs_tol,
        "max_depth": spec.max_depth,
        "gauss_order": spec.gauss_order,
        "table_tolerance": tables.tolerance,
    }
    if 1.0 / spec.lower <= spec.r + 1:
        logger.debug("Empty region for T_{} with L = {}".format(spec.r, spec.lower))
        return IntegralResult(0.0, 0.0, 0, NESTED_ADAPTIVE, provenance)

    executor = ThreadPoolExecutor(spec.threads) if spec.threads > 1 else None
    try:
        estimate, _, evaluations = _nested_pass(spec, tables, math.inf, 0, executor)
        budget = max(spec.abs_tol, spec.rel_tol * abs(estimate))
        value, error, more = _nested_pass(spec, tables, budget, spec.max_depth, executor)
    finally:
        if executor:
            executor.shutdown()

    result = IntegralResult(value, error, evaluations + more, NESTED_ADAPTIVE, provenance)
    target = max(spec.abs_tol, spec.rel_tol * abs(value))
    if error > target:
        mess = "T_{} error {:.3g} exceeds the budget {:.3g} after {} bisections"
        raise ConvergenceError(mess.format(spec.r, error, target, spec.max_depth), result)
    logger.info("T_{} = {!r} +/- {:.3g}".format(spec.r, value, error))
    return result


# --- Quasi Monte Carlo -------------------------------------------------------


def _box_bounds(spec):
    r, lower = spec.r, spec.lower
    i = np.arange(1, r + 1)
    return np.full(r, lower), (1.0 - (i - 1) * lower) / (r - i + 2)


def _map_nested(u, spec):
    r = spec.r
    t = np.empty_like(u)
    jacobian = np.full(len(u), spec.upper - spec.lower)
    t[:, 0] = spec.lower + u[:, 0] * (spec.upper - spec.lower)
    sums = t[:, 0].copy()
    for i in range(1, r):
        lo = t[:, i - 1]
        width = np.maximum((1.0 - sums) / (r - i + 1) - lo, 0.0)
        t[:, i] = lo + u[:, i] * width
        jacobian *= width
        sums += t[:, i]
    return t, jacobian


def _map_box(u, spec):
    lo, hi = _box_bounds(spec)
    return qmc.scale(u, lo, hi), np.full(len(u), np.prod(hi - lo))


def integrate_Tr_qmc(spec, tables=None, function=None):
    """Estimate T_r from scrambled Sobol' points.

    mc_replicates independent scramblings, seeded from mc_seed, each provide
    an estimate; the result is their mean and the uncertainty their standard
    error.

    Parameters
    ----------
    spec : QuadSpec
        Integral description.
    tables : SieveTables, optional
        Tables used for omega, the default ones if omitted.
    function : callable, optional
        Replacement integrand taking an (n, r) array of points inside the
        region. Passing ``lambda t: np.ones(len(t))`` estimates the volume.

    """
    if spec.mc_samples < MIN_MC_SAMPLES:
        mess = "At least {} samples are needed, got {}"
        raise ConfigurationError(mess.format(MIN_MC_SAMPLES, spec.mc_samples))
    tables = tables or get_default_tables()
    replicates = spec.mc_replicates
    m = max(1, math.ceil(math.log2(spec.mc_samples / replicates)))
    provenance = {
        "r": spec.r,
        "lower_exponent": spec.lower,
        "mc_seed": spec.mc_seed,
        "mc_replicates": replicates,
        "mc_mapping": spec.mc_mapping,
        "points_per_replicate": 2**m,
    }
    if spec.upper <= spec.lower:
        return IntegralResult(0.0, 0.0, 0, QMC, provenance)

    mapping = _map_nested if spec.mc_mapping == "nested" else _map_box
    children = np.random.SeedSequence(spec.mc_seed).spawn(replicates)

    def estimate(child):
        sampler = qmc.Sobol(d=spec.r, scramble=True, seed=np.random.default_rng(child))
        t, weight = mapping(sampler.random_base2(m), spec)
        if function is None:
            values = integrand(t, spec, tables)
        else:
            values = np.asarray(function(t), dtype=np.float64)
            if spec.mc_mapping == "box":
                values = np.where(integrand_support(t, spec), values, 0.0)
        return math.fsum(values * weight) / len(t)

    if spec.threads > 1:
        with ThreadPoolExecutor(spec.threads) as executor:
            estimates = list(executor.map(estimate, children))
    else:
        estimates = [estimate(child) for child in children]

    value = math.fsum(estimates) / replicates
    error = float(np.std(estimates, ddof=1)) / math.sqrt(replicates)
    mess = "QMC T_{} = {!r} +/- {:.3g} from {} x {} points"
    logger.info(mess.format(spec.r, value, error, replicates, 2**m))
    return IntegralResult(value, error, replicates * 2**m, QMC, provenance)
