"""Quadrature engines for the semi-infinite, principal-value, and
Matsubara-sum integrals used throughout the package.

Three engines serve ``integrate_semi_infinite``:

* ``tanh_sinh`` (default): double-exponential nodes on [0, inf) through the
  substitution x = s*exp(pi*sinh(k*h)), which is the tanh-sinh rule composed
  with the algebraic map x = s*t/(1-t).  Smooth integrands with exponential
  or algebraic tails converge at machine precision with a few hundred nodes.
* ``mapped_gauss``: composite Gauss-Legendre on the mapped variable
  t = x/(s+x), refined by panel doubling.
* ``adaptive_subdivision``: globally adaptive bisection with an embedded
  Gauss-Legendre error estimate, for integrands with interior structure.

The error estimate of every engine is the difference of the last two
refinement levels inflated by a factor 2 (plus a machine-rounding floor), so
reported errors stay on the safe side of the truth.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .core import EnergyResult

__all__ = [
    "QuadratureSpec",
    "MatsubaraSpec",
    "QuadratureError",
    "integrate_semi_infinite",
    "integrate_interval",
    "integrate_pv",
    "matsubara_sum",
]

_EPS = np.finfo(float).eps

# |k*h| cap for the double-exponential node ladder: pi*sinh(6.1) ~ 700 keeps
# x = s*exp(pi*sinh(kh)) inside double range.
_DE_CUTOFF = 6.1
_MAX_LEVELS = 13


class QuadratureError(RuntimeError):
    """Budget exhausted, NaN integrand, or non-convergent tail."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Method, tolerances, and budget for one integration task.

    ``decay_scale`` is a frequency hint: the [0, inf) maps place half of
    their nodes below it.  ``None`` lets the caller of each physics module
    pick a scale from the model (falling back to 1.0).
    """

    method: str = "tanh_sinh"
    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    max_evals: int = 10**6
    decay_scale: float | None = None

    def __post_init__(self) -> None:
        if self.method not in ("tanh_sinh", "mapped_gauss", "adaptive_subdivision"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_evals < 100:
            raise ValueError("max_evals must be >= 100")
        if self.decay_scale is not None and self.decay_scale <= 0:
            raise ValueError("decay_scale must be positive")


@dataclass(frozen=True)
class MatsubaraSpec:
    """Tail control for thermal sums over xi_n = 2*pi*n*k_B*T."""

    rel_tol: float = 1e-9
    n_max: int = 10**5
    consecutive_small: int = 3

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.rel_tol <= 0:
            raise ValueError("rel_tol must be positive")
        if self.consecutive_small < 1:
            raise ValueError("consecutive_small must be >= 1")


@lru_cache(maxsize=32)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _tolerance(spec: QuadratureSpec, value: float) -> float:
    return max(spec.abs_tol, spec.rel_tol * abs(value))


class _EvalCounter:
    __slots__ = ("f", "count", "budget")

    def __init__(self, f: Callable[[float], float], budget: int):
        self.f = f
        self.count = 0
        self.budget = budget

    def __call__(self, x: float) -> float:
        if self.count >= self.budget:
            raise QuadratureError(
                f"quadrature budget of {self.budget} evaluations exhausted"
            )
        self.count += 1
        y = self.f(x)
        if math.isnan(y):
            raise QuadratureError(f"integrand returned NaN at x={x!r}")
        return y


def _exp_sinh_level(f: _EvalCounter, scale: float, h: float, odd_only: bool
                     ) -> tuple[float, float]:
    """One refinement level of the double-exponential ladder.

    Returns (sum of w*f contributions without the h factor, sum of |w*f|).
    """
    terms: list[float] = []
    k_max = int(_DE_CUTOFF / h)
    peak = 0.0
    for direction in (1, -1):
        start = 1 if odd_only or direction < 0 else 0
        step = 2 if odd_only else 1
        dead = 0
        for k in range(start, k_max + 1, step):
            kh = direction * k * h
            z = 0.5 * math.pi * math.sinh(kh)
            x = scale * math.exp(2.0 * z)
            if x == 0.0 or math.isinf(x):
                break
            w = math.pi * math.cosh(kh) * x
            t = w * f(x)
            terms.append(t)
            peak = max(peak, abs(t))
            # truncate a direction once its terms sit far under the peak
            if peak > 0.0 and abs(t) <= 1e-17 * peak:
                dead += 1
                if dead >= 3:
                    break
            else:
                dead = 0
    return math.fsum(terms), math.fsum(abs(t) for t in terms)


def _integrate_exp_sinh(f: _EvalCounter, spec: QuadratureSpec, scale: float
                         ) -> EnergyResult:
    h = 0.5
    total, total_abs = _exp_sinh_level(f, scale, h, odd_only=False)
    value = h * total
    prev = math.inf
    for level in range(1, _MAX_LEVELS + 1):
        h *= 0.5
        add, add_abs = _exp_sinh_level(f, scale, h, odd_only=True)
        total += add
        total_abs += add_abs
        prev, value = value, h * total
        diff = abs(value - prev)
        err = max(2.0 * diff, 4.0 * _EPS * h * total_abs)
        if level >= 2 and err <= _tolerance(spec, value):
            return EnergyResult(value, err, f.count)
    raise QuadratureError(
        f"tanh_sinh failed to reach tolerance within {f.count} evaluations"
    )


def _panel_values(f: _EvalCounter, lo: float, hi: float, order: int
                   ) -> tuple[float, float]:
    """Embedded Gauss-Legendre pair on one panel: (value, error estimate)."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    xs_lo, ws_lo = _leggauss(order)
    xs_hi, ws_hi = _leggauss(2 * order)
    v_lo = half * math.fsum(w * f(mid + half * x) for x, w in zip(xs_lo, ws_lo))
    v_hi = half * math.fsum(w * f(mid + half * x) for x, w in zip(xs_hi, ws_hi))
    return v_hi, abs(v_hi - v_lo)


def _integrate_adaptive(f: _EvalCounter, lo: float, hi: float,
                        spec: QuadratureSpec, order: int = 12) -> EnergyResult:
    """Globally adaptive bisection on a finite interval, deterministic order."""
    v, e = _panel_values(f, lo, hi, order)
    seq = 0
    heap = [(-e, seq, lo, hi, v, e)]
    while True:
        total = math.fsum(item[4] for item in heap)
        total_err = math.fsum(item[5] for item in heap)
        if 2.0 * total_err <= _tolerance(spec, total):
            break
        worst = heapq.heappop(heap)
        a, b = worst[2], worst[3]
        if worst[5] < _EPS * abs(total) or (b - a) < 64 * _EPS * max(abs(a), abs(b), 1.0):
            # worst panel is at rounding level: cannot do better
            heapq.heappush(heap, worst)
            break
        m = 0.5 * (a + b)
        for panel_lo, panel_hi in ((a, m), (m, b)):
            seq += 1
            pv, pe = _panel_values(f, panel_lo, panel_hi, order)
            heapq.heappush(heap, (-pe, seq, panel_lo, panel_hi, pv, pe))
    segments = sorted(heap, key=lambda item: item[2])
    value = math.fsum(s[4] for s in segments)
    err = max(2.0 * math.fsum(s[5] for s in segments),
              4.0 * _EPS * math.fsum(abs(s[4]) for s in segments))
    return EnergyResult(value, err, f.count)


def _integrate_mapped_gauss(f_mapped: _EvalCounter, spec: QuadratureSpec
                             ) -> EnergyResult:
    """Composite Gauss-Legendre on [0,1] refined by panel doubling."""
    xs, ws = _leggauss(16)
    prev = math.inf
    value = math.inf
    panels = 4
    for _ in range(_MAX_LEVELS):
        edges = np.linspace(0.0, 1.0, panels + 1)
        terms = []
        for lo, hi in zip(edges[:-1], edges[1:]):
            half = 0.5 * (hi - lo)
            mid = 0.5 * (hi + lo)
            terms.extend(w * half * f_mapped(mid + half * x) for x, w in zip(xs, ws))
        prev, value = value, math.fsum(terms)
        if not math.isinf(prev):
            err = max(2.0 * abs(value - prev),
                      4.0 * _EPS * math.fsum(abs(t) for t in terms))
            if err <= _tolerance(spec, value):
                return EnergyResult(value, err, f_mapped.count)
        panels *= 2
    raise QuadratureError(
        f"mapped_gauss failed to reach tolerance within {f_mapped.count} evaluations"
    )


def integrate_semi_infinite(f: Callable[[float], float],
                            spec: QuadratureSpec | None = None) -> EnergyResult:
    """Integrate ``f`` over [0, inf).

    ``f`` must be finite on (0, inf) and decay integrably; the origin itself
    is never evaluated.  Raises :class:`QuadratureError` when the evaluation
    budget runs out or ``f`` returns NaN.
    """
    spec = spec or QuadratureSpec()
    scale = spec.decay_scale or 1.0
    if spec.method == "tanh_sinh":
        return _integrate_exp_sinh(_EvalCounter(f, spec.max_evals), spec, scale)

    def mapped(t: float) -> float:
        u = 1.0 - t
        if u < 1e-100:
            return 0.0
        x = scale * t / u
        return f(x) * scale / (u * u)

    counter = _EvalCounter(mapped, spec.max_evals)
    if spec.method == "mapped_gauss":
        return _integrate_mapped_gauss(counter, spec)
    return _integrate_adaptive(counter, 0.0, 1.0, spec)


def integrate_interval(f: Callable[[float], float], lo: float, hi: float,
                       spec: QuadratureSpec | None = None) -> EnergyResult:
    """Adaptive integration of ``f`` over the finite interval [lo, hi]."""
    spec = spec or QuadratureSpec()
    if not hi > lo:
        raise ValueError("need hi > lo")
    counter = _EvalCounter(f, spec.max_evals)
    return _integrate_adaptive(counter, lo, hi, spec)


def integrate_pv(f_regular: Callable[[float], float], pole: float,
                 window: float | None = None,
                 spec: QuadratureSpec | None = None) -> EnergyResult:
    """Principal value of  integral_0^inf f_regular(w) / (pole^2 - w^2) dw.

    The singularity at w = pole is removed by subtraction: over the window
    [pole-window, pole+window] the integrand is replaced by
    (f(w) - f(pole))/(pole^2 - w^2), which is finite, and the subtracted
    piece is restored through the analytic principal value

        PV int_{a-D}^{a+D} dw/(a^2 - w^2) = ln((2a+D)/(2a-D)) / (2a).

    Outside the window the integrand is regular and integrated directly.
    """
    spec = spec or QuadratureSpec()
    a = pole
    if a <= 0:
        raise ValueError("pole must be positive")
    delta = 0.5 * a if window is None else window
    if not 0 < delta < a:
        raise ValueError("window must satisfy 0 < window < pole")

    f_at_pole = f_regular(a)
    results = []

    def whole(w: float) -> float:
        return f_regular(w) / ((a - w) * (a + w))

    if a - delta > 0:
        results.append(integrate_interval(whole, 0.0, a - delta, spec))

    def subtracted(w: float) -> float:
        return (f_regular(w) - f_at_pole) / ((a - w) * (a + w))

    results.append(integrate_interval(subtracted, a - delta, a, spec))
    results.append(integrate_interval(subtracted, a, a + delta, spec))

    analytic = f_at_pole * math.log((2 * a + delta) / (2 * a - delta)) / (2 * a)

    def tail(x: float) -> float:
        return whole(a + delta + x)

    tail_scale = spec.decay_scale or a
    tail_spec = QuadratureSpec(method="tanh_sinh", rel_tol=spec.rel_tol,
                               abs_tol=spec.abs_tol, max_evals=spec.max_evals,
                               decay_scale=tail_scale)
    results.append(integrate_semi_infinite(tail, tail_spec))

    value = math.fsum(r.value for r in results) + analytic
    err = math.fsum(r.error_estimate for r in results) + 4.0 * _EPS * abs(analytic)
    evals = sum(r.evaluations for r in results) + 1
    return EnergyResult(value, err, evals)


def matsubara_sum(g: Callable[[float], float], temperature: float,
                  spec: MatsubaraSpec | None = None) -> EnergyResult:
    """Thermal sum  k_B T * [ g(0)/2 + sum_{n>=1} g(2 pi n k_B T) ].

    Terms are accumulated until ``consecutive_small`` successive terms fall
    below ``rel_tol`` times the running sum, or ``n_max`` is reached.  The
    remainder is restored by the midpoint integral estimate
    (1/2pi) * int_{xi_(N+1/2)}^inf g(xi) dxi, whose own accuracy is gauged
    against the trapezoidal association and reported in the error.
    """
    spec = spec or MatsubaraSpec()
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    t_step = 2.0 * math.pi * temperature
    terms = [0.5 * g(0.0)]
    partial = terms[0]
    small_run = 0
    n = 0
    while n < spec.n_max:
        n += 1
        term = g(n * t_step)
        terms.append(term)
        partial += term
        if abs(term) < spec.rel_tol * max(abs(partial), 1e-300):
            small_run += 1
            if small_run >= spec.consecutive_small:
                break
        else:
            small_run = 0

    xi_mid = (n + 0.5) * t_step
    xi_next = (n + 1.0) * t_step
    tail_spec = QuadratureSpec(method="tanh_sinh", rel_tol=spec.rel_tol,
                               abs_tol=1e-300, decay_scale=max(xi_mid, t_step))
    try:
        mid = integrate_semi_infinite(lambda x: g(xi_mid + x), tail_spec)
        trap = integrate_semi_infinite(lambda x: g(xi_next + x), tail_spec)
    except QuadratureError as exc:
        raise QuadratureError(
            f"matsubara tail did not converge after n_max={n}: {exc}") from exc
    g_next = g(xi_next)
    tail_mid = mid.value / (2.0 * math.pi)
    tail_trap = trap.value / (2.0 * math.pi) + 0.5 * temperature * g_next
    value = temperature * math.fsum(terms) + tail_mid
    err = (2.0 * abs(tail_mid - tail_trap)
           + (mid.error_estimate + trap.error_estimate) / (2.0 * math.pi)
           + 4.0 * _EPS * temperature * math.fsum(abs(t) for t in terms))
    evals = len(terms) + mid.evaluations + trap.evaluations + 1
    return EnergyResult(value, err, evals)
