"""Chebyshev polynomials, the scaled reverse filter F_R and its matrix-free application."""

from __future__ import annotations

import math
from typing import Any, overload

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, model_validator

from revlab.errors import ArgumentError, FilterRangeError, GaplessError
from revlab.models import HamiltonianSpec
from revlab.spectral import apply_hamiltonian
from revlab.states import StateVector

OVERFLOW_GUARD = 1e150


@overload
def chebyshev_T(n: int, x: float) -> float: ...
@overload
def chebyshev_T(n: int, x: NDArray[Any]) -> NDArray[np.float64]: ...
def chebyshev_T(n: int, x: ArrayLike) -> float | NDArray[np.float64]:
    """``T_n(x)``: ``cos(n arccos x)`` on ``[-1, 1]``, ``sign(x)^n cosh(n arccosh|x|)`` outside.

    Raises:
        ArgumentError: If n is negative
    """
    if n < 0:
        raise ArgumentError(f"Chebyshev degree must be non-negative, got {n}")
    values = np.asarray(x, dtype=np.float64)
    magnitude = np.abs(values)
    with np.errstate(over="ignore"):
        inside = np.cos(n * np.arccos(np.clip(values, -1.0, 1.0)))
        outside = np.sign(values) ** n * np.cosh(n * np.arccosh(np.maximum(magnitude, 1.0)))
    result = np.where(magnitude <= 1.0, inside, outside)
    return float(result) if result.ndim == 0 else result


class FilterParams(BaseModel):
    """Degree, scale and damping of the reverse filter for one (model, region, q)."""

    model_config = ConfigDict(frozen=True)

    q: int
    k: int
    n0: int
    g: float
    L_size: int
    delta_e: float
    e_c: float
    xi: float
    lam: float

    @model_validator(mode="after")
    def _check_consistent(self) -> FilterParams:
        if self.n0 != self.q // self.k:
            raise ValueError(f"n0={self.n0} but q // k = {self.q // self.k}")
        e_c = self.g * self.L_size + 8.0 * self.g * self.k * self.n0
        if not math.isclose(self.e_c, e_c, rel_tol=1e-12):
            raise ValueError(f"E_c={self.e_c} does not match g|L| + 8gk n0 = {e_c}")
        if not math.isclose(self.xi, math.sqrt(1.0 + 2.0 * e_c / self.delta_e), rel_tol=1e-12):
            raise ValueError("xi does not match sqrt(1 + 2 E_c / dE)")
        if not math.isclose(self.lam, 1.0 / (4.0 * self.g * self.k), rel_tol=1e-12):
            raise ValueError("lambda does not match 1 / (4 g k)")
        return self

    @property
    def degenerate(self) -> bool:
        """True when q < k, which leaves the constant filter 1."""
        return self.n0 == 0

    @property
    def window_top(self) -> float:
        return 2.0 * self.e_c + self.delta_e

    @property
    def suppression(self) -> float:
        """``exp(-2 n0 / xi)``."""
        return math.exp(-2.0 * self.n0 / self.xi)

    @property
    def denominator(self) -> float:
        return chebyshev_T(self.n0, -self.delta_e / self.e_c - 1.0)


def filter_params(q: int, k: int, g: float, L_size: int, delta_e: float) -> FilterParams:
    """Compute ``n0 = q // k``, ``E_c = g|L| + 8gk n0``, ``xi = sqrt(1 + 2E_c/dE)``, ``lambda = 1/(4gk)``.

    Raises:
        GaplessError: If the gap is not positive
        ArgumentError: If q < 0, k < 1, g <= 0 or |L| < 1
    """
    if not delta_e > 0.0:
        raise GaplessError(f"spectral gap must be positive, got {delta_e}")
    if q < 0 or k < 1 or not g > 0.0 or L_size < 1:
        raise ArgumentError(f"invalid filter arguments q={q} k={k} g={g} |L|={L_size}")
    n0 = q // k
    e_c = g * L_size + 8.0 * g * k * n0
    return FilterParams(
        q=q,
        k=k,
        n0=n0,
        g=g,
        L_size=L_size,
        delta_e=delta_e,
        e_c=e_c,
        xi=math.sqrt(1.0 + 2.0 * e_c / delta_e),
        lam=1.0 / (4.0 * g * k),
    )


@overload
def eval_filter(params: FilterParams, x: float) -> float: ...
@overload
def eval_filter(params: FilterParams, x: NDArray[Any]) -> NDArray[np.float64]: ...
def eval_filter(params: FilterParams, x: ArrayLike) -> float | NDArray[np.float64]:
    """``F_R(x) = T_n0((x - dE)/E_c - 1) / T_n0(-dE/E_c - 1)``, so ``F_R(0) = 1``."""
    values = np.asarray(x, dtype=np.float64)
    if params.degenerate:
        result = np.ones_like(values)
    else:
        result = chebyshev_T(params.n0, (values - params.delta_e) / params.e_c - 1.0) / params.denominator
    return float(result) if np.ndim(result) == 0 else result


def apply_filter(params: FilterParams, spec: HamiltonianSpec, psi: StateVector) -> StateVector:
    """``F_R(H)|psi>`` by the three-term recurrence on ``Y = (H - dE)/E_c - I``.

    ``spec`` must already be shifted so that its ground energy is 0. Uses exactly ``n0``
    Hamiltonian applications.

    Raises:
        FilterRangeError: If an intermediate vector norm exceeds 1e150
    """
    if params.degenerate:
        return psi

    def mapped(vector: StateVector) -> StateVector:
        return (apply_hamiltonian(spec, vector) - vector * params.delta_e) / params.e_c - vector

    previous, current = psi, mapped(psi)
    for step in range(2, params.n0 + 1):
        previous, current = current, mapped(current) * 2.0 - previous
        if current.norm() > OVERFLOW_GUARD:
            raise FilterRangeError(
                f"recurrence norm passed {OVERFLOW_GUARD:g} at step {step}: spectrum reaches far beyond "
                f"2E_c + dE = {params.window_top:.6g}"
            )
    return current / params.denominator


class HighRangePoint(BaseModel):
    """Both sides of the damped-growth inequality at one energy above the window."""

    x: float
    lhs: float  # |F_R(x)| e^{-lambda (x - 2g|L|)}
    rhs: float  # e^{-2 n0/xi} e^{-lambda (x - 2g|L|) / 2}
    margin: float
    log_margin_2gl: float  # G(x) with the 2g|L| offset
    log_margin_6gl: float  # G(x) with the 6g|L| offset


class HighRangeReport(BaseModel):
    """Damped-growth check on a grid above ``2E_c + dE``."""

    points: list[HighRangePoint]
    closed_form_at_top: float  # -2 n0 - lambda dE / 2 + n0 log 2
    log_margin_2gl_at_top: float
    holds_2gl: bool
    holds_6gl: bool


def _log_margin(params: FilterParams, x: float, offset: float) -> float:
    growth = 0.0 if params.degenerate else params.n0 * math.log((2.0 * x - 2.0 * params.delta_e) / params.e_c - 2.0)
    return -params.lam / 2.0 * (x - offset) + growth


def high_range_product_check(params: FilterParams, g: float, L_size: int, x_grid: ArrayLike) -> HighRangeReport:
    """Evaluate ``|F_R(x)| e^{-lambda(x - 2g|L|)} <= e^{-2n0/xi} e^{-lambda(x - 2g|L|)/2}`` on ``x_grid``.

    Also reports the log-margin ``G(x) = -lambda/2 (x - c g|L|) + n0 log((2x - 2dE)/E_c - 2)`` for both
    offsets ``c = 2`` and ``c = 6``; ``G < 0`` certifies the inequality through the polynomial
    growth bound.

    Raises:
        ArgumentError: If a grid point lies below ``2E_c + dE``
    """
    grid = np.atleast_1d(np.asarray(x_grid, dtype=np.float64))
    if np.any(grid < params.window_top * (1.0 - 1e-12)):
        raise ArgumentError(f"grid must lie in [{params.window_top}, inf)")
    points = []
    for x in grid:
        damping = math.exp(-params.lam * (x - 2.0 * g * L_size))
        lhs = abs(eval_filter(params, float(x))) * damping
        rhs = params.suppression * math.sqrt(damping)
        points.append(
            HighRangePoint(
                x=float(x),
                lhs=lhs,
                rhs=rhs,
                margin=rhs - lhs,
                log_margin_2gl=_log_margin(params, float(x), 2.0 * g * L_size),
                log_margin_6gl=_log_margin(params, float(x), 6.0 * g * L_size),
            )
        )
    return HighRangeReport(
        points=points,
        closed_form_at_top=-2.0 * params.n0 - params.lam * params.delta_e / 2.0 + params.n0 * math.log(2.0),
        log_margin_2gl_at_top=_log_margin(params, params.window_top, 2.0 * g * L_size),
        holds_2gl=all(p.lhs <= p.rhs * (1.0 + 1e-12) for p in points),
        holds_6gl=all(p.log_margin_6gl < 0.0 for p in points),
    )


class FilterReport(BaseModel):
    """Window behaviour of F_R."""

    f_at_zero: float
    sampled_sup: float  # max |F_R| on [dE, 2E_c + dE]
    cap: float  # 2 e^{-2 n0 / xi}
    sample_count: int
    within_cap: bool
    high_range: HighRangeReport | None = None


def filter_report(params: FilterParams, samples: int = 10_000, high_grid: ArrayLike | None = None) -> FilterReport:
    """Sample ``|F_R|`` uniformly on the window and optionally run the high-range check."""
    window = np.linspace(params.delta_e, params.window_top, samples)
    sup = float(np.max(np.abs(eval_filter(params, window))))
    cap = 2.0 * params.suppression
    high = None
    if high_grid is not None:
        high = high_range_product_check(params, params.g, params.L_size, high_grid)
    return FilterReport(
        f_at_zero=eval_filter(params, 0.0),
        sampled_sup=sup,
        cap=cap,
        sample_count=samples,
        within_cap=sup <= cap,
        high_range=high,
    )


def filter_profile(params: FilterParams, x_grid: ArrayLike) -> pd.DataFrame:
    """Rows (x, F_R, bound): bound is ``2e^{-2n0/xi}`` in the window and the growth bound above it."""
    grid = np.asarray(x_grid, dtype=np.float64)
    values = eval_filter(params, grid)
    bound = np.full_like(grid, np.nan)
    in_window = (grid >= params.delta_e) & (grid <= params.window_top)
    above = grid > params.window_top
    bound[in_window] = 2.0 * params.suppression
    growth = (2.0 * grid[above] - 2.0 * params.delta_e) / params.e_c - 2.0
    bound[above] = growth**params.n0 * params.suppression
    return pd.DataFrame({"x": grid, "F_R": values, "bound": bound})


class ChebyshevBoundsReport(BaseModel):
    """Worst relative slack of the three Chebyshev bounds over sampled points."""

    n: int
    sample_count: int
    max_abs_inside: float
    inside_margin: float  # 1 - max |T_n| on [-1, 1]
    upper_margin: float  # min (bound - |T_n|) / bound for |x| >= 1
    lower_margin: float  # min (|T_n| - bound) / |T_n| for |x| >= 1
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


def verify_cheby_bounds(n: int, sample_count: int = 10_000, x_max: float = 10.0) -> ChebyshevBoundsReport:
    """Check ``|T_n| <= 1`` on [-1, 1] and ``e^{2n sqrt((|x|-1)/(|x|+1))}/2 <= |T_n(x)| <= (2|x|)^n/2`` beyond.

    Comparisons allow 1e-12 relative slack for the cases where a bound is attained.

    Raises:
        ArgumentError: If n < 1
    """
    if n < 1:
        raise ArgumentError(f"bounds need n >= 1, got {n}")
    slack = 1e-12
    inside = chebyshev_T(n, np.linspace(-1.0, 1.0, sample_count))
    half = sample_count // 2
    magnitudes = np.concatenate([np.linspace(1.0, x_max, sample_count - half), np.linspace(1.0, x_max, half)])
    outside_x = np.concatenate([magnitudes[: sample_count - half], -magnitudes[sample_count - half :]])
    t_abs = np.abs(chebyshev_T(n, outside_x))
    abs_x = np.abs(outside_x)
    upper = (2.0 * abs_x) ** n / 2.0
    lower = np.exp(2.0 * n * np.sqrt((abs_x - 1.0) / (abs_x + 1.0))) / 2.0
    max_inside = float(np.max(np.abs(inside)))
    violations = int(np.count_nonzero(np.abs(inside) > 1.0 + slack))
    violations += int(np.count_nonzero(t_abs > upper * (1.0 + slack)))
    violations += int(np.count_nonzero(t_abs < lower * (1.0 - slack)))
    return ChebyshevBoundsReport(
        n=n,
        sample_count=sample_count,
        max_abs_inside=max_inside,
        inside_margin=1.0 - max_inside,
        upper_margin=float(np.min((upper - t_abs) / upper)),
        lower_margin=float(np.min((t_abs - lower) / t_abs)),
        violations=violations,
    )
