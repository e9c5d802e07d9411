"""
Contour quadrature oracle for MB integrals.

Each integration variable runs along a straight vertical line
z_j = r_j + i t_j. The real parts come from a linear program that keeps every
numerator Gamma argument at least a margin away from its poles. The line
integral is done with the trapezoid rule after the substitution
t = L sinh(u / L). Nodes are nearly even for |t| < L, where the poles sit
and slowly decaying ridges still carry weight, and thin out in the
exponentially decaying tails. The step is halved until nested grids agree.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from math import fsum
from typing import Mapping, Optional, Tuple

import numpy as np
from scipy.optimize import linprog
from scipy.special import loggamma

from .config.constants import (
    DEFAULT_QUAD_DELTA, DEFAULT_QUAD_T_LOW, DEFAULT_QUAD_H_LOW, DEFAULT_QUAD_T_HIGH,
    DEFAULT_QUAD_H_HIGH, QUAD_STEP_FRACTION_LOW, QUAD_STEP_FRACTION_HIGH, CONTOUR_BOUND,
    CONTOUR_MAX_MARGIN, POLE_EPS, QUAD_MAX_REFINEMENTS_HIGH, QUAD_MAX_REFINEMENTS_LOW, QUAD_RTOL_HIGH,
    QUAD_RTOL_LOW, QUAD_SCALE_HIGH, QUAD_SCALE_LOW,
)
from .errors import Infeasible, PoleAtNonpositiveInteger
from .mb_model import compile_integrand, CompiledIntegrand
from .models import MBIntegral

logger = logging.getLogger(__name__)

# tie-break weight pulling the contour towards the origin
_CENTERING_WEIGHT = 1e-3


def log_gamma(z: complex) -> complex:
    """
    Principal-branch log Γ(z).

    Raises:
        PoleAtNonpositiveInteger: z is 0, -1, -2, ...
    """
    z = complex(z)
    if abs(z.imag) < POLE_EPS and z.real <= 0.5 and abs(z.real - round(z.real)) < POLE_EPS:
        raise PoleAtNonpositiveInteger(f"log_gamma has a pole at {z.real:g}")
    return complex(loggamma(z))


@dataclass(frozen=True)
class ContourSpec:
    """Real parts of the straight contours and the margin they keep from every pole."""
    real_parts: Tuple[float, ...]
    margin: float

    def pole_distance(self, max_coeff: float) -> float:
        """Distance from the contour to the nearest pole, in units of the imaginary parts."""
        return self.margin / max(max_coeff, 1.0)


@dataclass
class QuadResult:
    """Result of a contour quadrature with its nested-grid error estimate."""
    value: complex
    error_estimate: float
    T: float
    h: float
    contour: Optional[ContourSpec] = None
    refinements: int = 0


def find_contour(m: MBIntegral, params: Mapping[str, complex], delta: float = DEFAULT_QUAD_DELTA) -> ContourSpec:
    """
    Real parts for which every numerator Gamma argument has real part >= delta.

    The margin is maximized (capped at 1) by a linear program; a small penalty
    on |r_j| picks the solution closest to the origin among equally good ones.

    Raises:
        Infeasible: no straight contours reach the requested margin
    """
    n = m.nvars
    if n == 0:
        return ContourSpec((), CONTOUR_MAX_MARGIN)
    numerators = m.numerators
    # variables: p_1..p_n, q_1..q_n (r = p - q), margin
    rows, bounds_rhs = [], []
    for arg in numerators:
        row = np.zeros(2 * n + 1)
        for index, coeff in arg.zcoeffs:
            row[index - 1] = -coeff
            row[n + index - 1] = coeff
        row[-1] = 1.0
        rows.append(row)
        bounds_rhs.append(arg.shift.evaluate(params).real)
    objective = np.concatenate([np.full(2 * n, _CENTERING_WEIGHT), [-1.0]])
    bounds = [(0.0, CONTOUR_BOUND)] * (2 * n) + [(None, CONTOUR_MAX_MARGIN)]
    result = linprog(objective, A_ub=np.array(rows) if rows else None,
                     b_ub=np.array(bounds_rhs) if rows else None, bounds=bounds, method='highs')
    if not result.success:
        raise Infeasible(f"contour search failed: {result.message}")
    real_parts = result.x[:n] - result.x[n:2 * n]
    margin = min((arg.shift.evaluate(params).real
                  + sum(c * real_parts[i - 1] for i, c in arg.zcoeffs) for arg in numerators),
                 default=CONTOUR_MAX_MARGIN)
    if margin < delta:
        raise Infeasible(f"best straight contours keep margin {margin:.4g} < {delta}")
    contour = ContourSpec(tuple(float(r) for r in real_parts), float(margin))
    logger.debug(f"contour {contour.real_parts} with margin {contour.margin:.4f}")
    return contour


def _max_coefficient(m: MBIntegral) -> float:
    return float(max((abs(c) for arg in m.numerators + m.denominators for _, c in arg.zcoeffs), default=1))


@dataclass(frozen=True)
class _Nodes:
    t: np.ndarray
    weight: np.ndarray
    coarse: np.ndarray
    inner: np.ndarray


def _nodes(T: float, h: float, scale: float = 1.0) -> _Nodes:
    """Trapezoid nodes for t = scale * sinh(u / scale) on [-T, T] with step h in u."""
    U = scale * math.asinh(T / scale)
    K = int(math.ceil(U / h))
    k = np.arange(-K, K + 1)
    u = k * h
    return _Nodes(
        t=scale * np.sinh(u / scale),
        weight=h * np.cosh(u / scale) / (2 * math.pi),
        coarse=(k % 2) == 0,
        inner=np.abs(u) <= scale * math.asinh(T / (2 * scale)) + 1e-12,
    )


def _weighted_sum(weighted: np.ndarray, mask: Optional[np.ndarray] = None) -> complex:
    part = weighted if mask is None else weighted[mask]
    return complex(fsum(part.real), fsum(part.imag))


class _SlabGrid:
    """Tensor grid over the trailing folds, reused for every node of the leading fold."""

    def __init__(self, nodes: _Nodes, nvars: int, contour: ContourSpec):
        self.nodes = nodes
        self.nvars = nvars
        self.real_parts = np.asarray(contour.real_parts)[:, None]
        dims = max(nvars - 1, 1)
        picks = [p.ravel() for p in np.meshgrid(*([np.arange(len(nodes.t))] * dims), indexing='ij')]
        self.t = np.array([nodes.t[p] for p in picks])
        self.weight = np.prod([nodes.weight[p] for p in picks], axis=0)
        self.coarse = np.logical_and.reduce([nodes.coarse[p] for p in picks])
        self.inner = np.logical_and.reduce([nodes.inner[p] for p in picks])

    def sums(self, compiled: CompiledIntegrand, outer: Optional[int]) -> Tuple[complex, complex, complex]:
        """(full, coarse, truncated) sums over the nodes whose leading coordinate is ``outer``.

        With ``outer`` None the grid covers a single fold completely.
        """
        weight, coarse, inner, t = self.weight, self.coarse, self.inner, self.t
        if outer is not None:
            nodes = self.nodes
            t = np.vstack([np.full((1, t.shape[1]), nodes.t[outer]), t])
            weight = weight * nodes.weight[outer]
            coarse = coarse & nodes.coarse[outer]
            inner = inner & nodes.inner[outer]
        weighted = compiled.values(self.real_parts + 1j * t) * weight
        return (_weighted_sum(weighted), 2.0 ** self.nvars * _weighted_sum(weighted, coarse),
                _weighted_sum(weighted, inner))


def _grid_sums(compiled: CompiledIntegrand, nodes: _Nodes, nvars: int, contour: ContourSpec,
               threads: int, deterministic: bool) -> Tuple[complex, complex, complex]:
    grid = _SlabGrid(nodes, nvars, contour)
    if nvars == 1:
        slabs = [grid.sums(compiled, None)]
    else:
        outers = range(len(nodes.t))
        if threads > 1 and deterministic:
            # pool.map returns slabs in grid order for any worker count
            with ThreadPoolExecutor(max_workers=threads) as pool:
                slabs = list(pool.map(lambda k: grid.sums(compiled, k), outers))
        elif threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [pool.submit(grid.sums, compiled, k) for k in outers]
                slabs = [f.result() for f in as_completed(futures)]
        else:
            slabs = [grid.sums(compiled, k) for k in outers]

    def combine(position: int) -> complex:
        if not deterministic:
            return complex(np.sum([s[position] for s in slabs]))
        return complex(fsum(s[position].real for s in slabs), fsum(s[position].imag for s in slabs))

    return combine(0), combine(1), combine(2)


def mb_quad(m: MBIntegral, params: Mapping[str, complex], point: Mapping[str, complex],
            contour: Optional[ContourSpec] = None, T: Optional[float] = None, h: Optional[float] = None,
            delta: float = DEFAULT_QUAD_DELTA, threads: int = 1, deterministic: bool = True,
            rtol: Optional[float] = None, max_refinements: Optional[int] = None) -> QuadResult:
    """
    Evaluate an MB integral, including its (2πi)^{-n} normalization.

    The step is halved until the returned sum and the sum on every second
    node agree to ``rtol``, or ``max_refinements`` halvings were spent.

    Args:
        m: integral to evaluate
        params: numeric parameter values
        point: numeric values of the point variables
        contour: straight contours; found with find_contour when omitted
        T: truncation of each imaginary part
        h: starting step in the mapped variable; defaults to the configured step,
            reduced in proportion to the pole distance of the contour
        delta: minimal margin when searching a contour
        threads: worker threads over outer-variable slabs
        deterministic: combine slabs in grid order with exact summation; otherwise
            in completion order with a plain sum, which is not bit-stable across
            thread counts
        rtol: relative target of the step-doubling difference
        max_refinements: most halvings of the starting step; 0 keeps it

    Returns:
        QuadResult for the finest grid. Its error estimate is the larger of
        the step-doubling difference and the change from halving T, both
        measured against the returned value.

    Raises:
        Infeasible: no contour found
        NonPositiveKernelBase, BranchCutViolation, Overflow: from integrand evaluation
    """
    compiled = compile_integrand(m, params, point)
    if m.nvars == 0:
        value = complex(compiled.values(np.zeros((0, 1)))[0])
        return QuadResult(value, 0.0, 0.0, 0.0, ContourSpec((), CONTOUR_MAX_MARGIN))

    contour = contour or find_contour(m, params, delta)
    high = m.nvars >= 3
    default_T, default_h = (DEFAULT_QUAD_T_HIGH, DEFAULT_QUAD_H_HIGH) if high else (DEFAULT_QUAD_T_LOW, DEFAULT_QUAD_H_LOW)
    T = T or default_T
    if h is None:
        fraction = QUAD_STEP_FRACTION_HIGH if high else QUAD_STEP_FRACTION_LOW
        h = min(default_h, fraction * contour.pole_distance(_max_coefficient(m)))
    if rtol is None:
        rtol = QUAD_RTOL_HIGH if high else QUAD_RTOL_LOW
    if max_refinements is None:
        max_refinements = QUAD_MAX_REFINEMENTS_HIGH if high else QUAD_MAX_REFINEMENTS_LOW
    scale = QUAD_SCALE_HIGH if high else QUAD_SCALE_LOW

    refinements = 0
    while True:
        nodes = _nodes(T, h, scale)
        logger.debug(f"quadrature: {m.nvars} folds, {len(nodes.t)} nodes per fold, T={T}, h={h:.4g}")
        full, coarse, inner = _grid_sums(compiled, nodes, m.nvars, contour, threads, deterministic)
        step_error = abs(full - coarse)
        if step_error <= rtol * abs(full) or refinements >= max_refinements:
            break
        h /= 2
        refinements += 1

    if step_error > rtol * abs(full):
        logger.warning(f"quadrature step error {step_error:.2e} above target after {refinements} halvings (h={h:.4g})")
    error = max(step_error, abs(full - inner))
    return QuadResult(full, error, T, h, contour, refinements)
