"""N-atom dispersion free energies from the coupled-dipole determinant.

Each atom is a polarizable point dipole; the 3N x 3N interaction matrix
couples distinct atoms through the Green tensor (self-blocks are exactly
zero, so single-atom self-energies never enter).  The interaction free
energy at T = 0 is

    (1/2 pi) int_0^inf d(xi)  log det [ 1 + A(i xi) T(i xi) ]

with A the block-diagonal polarizability matrix.  Finite temperature
replaces the integral by the standard thermal frequency sum with a
half-weighted zero term.  The determinant is evaluated through the
symmetrized product sqrt(A) T sqrt(A), whose real eigenvalues make the log
branch explicit: any eigenvalue crossing -1 means the coupled ground state
is unstable and the calculation refuses to continue.

``normal_mode_energy`` is the independent oracle for the electrostatic
limit: identical single-resonance atoms give mode frequencies
omega0 sqrt(1 + alpha_static t_k) over the eigenvalues t_k of the static
interaction matrix, and the half-sum of mode shifts must reproduce the
determinant route.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Callable, Sequence

import numpy as np

from .core import EnergyResult, SPEED_OF_LIGHT, separation
from .green import dyadic_green_imag, static_green
from .pairwise import PairSpec, PairValidity, validity_check
from .polarizability import KramersHeisenberg, PolarizabilityModel
from .quadrature import (
    MatsubaraSpec,
    QuadratureSpec,
    integrate_semi_infinite,
    matsubara_sum,
)

__all__ = [
    "StrongCouplingError",
    "SystemGeometry",
    "build_T",
    "dressed_susceptibility",
    "free_energy_T0",
    "free_energy_finiteT",
    "second_order_energy",
    "normal_mode_energy",
    "phf_lambda_integral",
]


class StrongCouplingError(RuntimeError):
    """Coupling strong enough to destabilize the coupled ground state."""


class SystemGeometry:
    """Immutable collection of polarizable sites.

    ``sites`` is a sequence of (position, model) pairs; positions are
    3-vectors in bohr.  Coincident sites are rejected outright; close
    approaches that strain the point-dipole picture are reported by
    :meth:`validity_reports` rather than rejected.
    """

    def __init__(self, sites: Sequence[tuple[Sequence[float],
                                             PolarizabilityModel]]):
        positions = []
        models = []
        for position, model in sites:
            p = np.asarray(position, dtype=float)
            if p.shape != (3,):
                raise ValueError("site positions must be 3-vectors")
            positions.append(p)
            models.append(model)
        self._positions = np.array(positions, dtype=float)
        self._positions.setflags(write=False)
        self._models = tuple(models)
        for i in range(self.n_sites):
            for j in range(i + 1, self.n_sites):
                separation(self._positions[i], self._positions[j])

    @property
    def n_sites(self) -> int:
        return len(self._models)

    @property
    def positions(self) -> np.ndarray:
        return self._positions

    @property
    def models(self) -> tuple[PolarizabilityModel, ...]:
        return self._models

    def validity_reports(self) -> tuple[tuple[int, int, PairValidity], ...]:
        """Point-dipole validity verdict for every pair."""
        reports = []
        for i in range(self.n_sites):
            for j in range(i + 1, self.n_sites):
                r, _ = separation(self._positions[i], self._positions[j])
                pair = PairSpec(self._models[i], self._models[j], r)
                reports.append((i, j, validity_check(pair)))
        return tuple(reports)

    def lowest_transition(self) -> float:
        """Smallest transition frequency present, or 1.0 if none."""
        lows = [min(t.omega_sg for t in m.transitions)
                for m in self._models
                if isinstance(m, KramersHeisenberg) and m.transitions]
        return min(lows) if lows else 1.0

    def min_separation(self) -> float:
        dists = [separation(self._positions[i], self._positions[j])[0]
                 for i in range(self.n_sites)
                 for j in range(i + 1, self.n_sites)]
        return min(dists) if dists else math.inf


def build_T(geom: SystemGeometry, xi: float) -> np.ndarray:
    """Interaction matrix: off-diagonal blocks -G(r_n, r_m, i xi).

    xi = 0 selects the electrostatic tensor (I - 3 rhat rhat)/r^3; the
    diagonal blocks are exactly zero.
    """
    if xi < 0:
        raise ValueError("imaginary-axis frequency must be >= 0")
    n = geom.n_sites
    t = np.zeros((3 * n, 3 * n))
    for i in range(n):
        for j in range(i + 1, n):
            if xi == 0.0:
                block = -static_green(geom.positions[i], geom.positions[j])
            else:
                block = -dyadic_green_imag(geom.positions[i],
                                           geom.positions[j], xi)
            t[3 * i:3 * i + 3, 3 * j:3 * j + 3] = block
            t[3 * j:3 * j + 3, 3 * i:3 * i + 3] = block
    return t


def _alpha_values(geom: SystemGeometry, xi: float) -> np.ndarray:
    return np.array([m.alpha_imag(xi) for m in geom.models])


def _log_det_stable(geom: SystemGeometry, xi: float,
                    t: np.ndarray) -> float:
    """log det[1 + A T] through sqrt(A) T sqrt(A), branch-checked."""
    alphas = _alpha_values(geom, xi)
    if np.any(alphas < 0):
        raise StrongCouplingError("negative polarizability is not supported")
    s = np.repeat(np.sqrt(alphas), 3)
    sym = (s[:, None] * s[None, :]) * t
    mu = np.linalg.eigvalsh(sym)
    if np.any(mu <= -1.0):
        raise StrongCouplingError(
            f"strong-coupling/overlap regime at xi={xi!r}: "
            "an interaction mode crosses the stability boundary")
    return math.fsum(math.log1p(m) for m in mu)


def dressed_susceptibility(geom: SystemGeometry, xi: float) -> np.ndarray:
    """Interaction-dressed susceptibility M = A [1 + A T]^{-1}.

    Self-interaction stays excluded: T has zero diagonal blocks, so M
    reduces to A itself for a single atom.  log det[M] - log det[A] equals
    -log det[1 + A T] whenever A is invertible.
    """
    t = build_T(geom, xi)
    alphas = _alpha_values(geom, xi)
    a = np.diag(np.repeat(alphas, 3))
    system = np.eye(3 * geom.n_sites) + a @ t
    eigs = np.linalg.eigvals(system)
    if np.min(eigs.real) <= 0.0:
        raise StrongCouplingError(
            f"unbounded-spectrum: 1 + A T is singular or negative at xi={xi!r}")
    return a @ np.linalg.inv(system)


def _decay_scale(geom: SystemGeometry, nonretarded: bool) -> float:
    scale = geom.lowest_transition()
    r_min = geom.min_separation()
    if not nonretarded and math.isfinite(r_min):
        scale = min(scale, SPEED_OF_LIGHT / r_min)
    return scale


def _logdet_function(geom: SystemGeometry, nonretarded: bool
                     ) -> Callable[[float], float]:
    static_t = build_T(geom, 0.0)
    if nonretarded:
        if all(m == geom.models[0] for m in geom.models):
            # identical scalar polarizabilities commute with T: the
            # eigenproblem factorizes and needs solving only once
            t_eigs = np.linalg.eigvalsh(static_t)
            model = geom.models[0]

            def g_identical(xi: float) -> float:
                alpha = model.alpha_imag(xi)
                scaled = alpha * t_eigs
                if scaled.min() <= -1.0:
                    raise StrongCouplingError(
                        f"strong-coupling/overlap regime at xi={xi!r}: "
                        "an interaction mode crosses the stability boundary")
                return math.fsum(math.log1p(m) for m in scaled)

            return g_identical
        return lambda xi: _log_det_stable(geom, xi, static_t)

    def g(xi: float) -> float:
        t = static_t if xi == 0.0 else build_T(geom, xi)
        return _log_det_stable(geom, xi, t)

    return g


def free_energy_T0(geom: SystemGeometry, quad: QuadratureSpec | None = None,
                   nonretarded: bool = False) -> EnergyResult:
    """Zero-temperature interaction energy of the full cluster.

    ``nonretarded=True`` freezes the interaction matrix at its
    electrostatic form for every frequency (the regime where the
    normal-mode oracle applies).
    """
    if geom.n_sites < 2:
        return EnergyResult(0.0, 0.0, 0)
    quad = quad or QuadratureSpec()
    if quad.decay_scale is None:
        quad = replace(quad, decay_scale=_decay_scale(geom, nonretarded))
    g = _logdet_function(geom, nonretarded)
    res = integrate_semi_infinite(g, quad)
    pref = 1.0 / (2.0 * math.pi)
    return EnergyResult(pref * res.value, pref * res.error_estimate,
                        res.evaluations)


def free_energy_finiteT(geom: SystemGeometry, temperature: float,
                        tail: MatsubaraSpec | None = None,
                        nonretarded: bool = False) -> EnergyResult:
    """Interaction free energy at temperature T (Hartree units).

    Thermal sum over xi_n = 2 pi n T with the n = 0 term half-weighted;
    converges to :func:`free_energy_T0` as T -> 0.
    """
    if geom.n_sites < 2:
        if temperature <= 0:
            raise ValueError("temperature must be positive")
        return EnergyResult(0.0, 0.0, 0)
    g = _logdet_function(geom, nonretarded)
    return matsubara_sum(g, temperature, tail)


def second_order_energy(geom: SystemGeometry,
                        quad: QuadratureSpec | None = None) -> EnergyResult:
    """Pairwise-additive truncation of the cluster energy.

    -(1/4 pi) int d(xi) sum over ordered pairs of alpha_n alpha_m
    Tr[G_nm G_mn]; the full determinant differs from this at third order
    in the polarizabilities.
    """
    if geom.n_sites < 2:
        return EnergyResult(0.0, 0.0, 0)
    quad = quad or QuadratureSpec()
    if quad.decay_scale is None:
        quad = replace(quad, decay_scale=_decay_scale(geom, nonretarded=False))
    pairs = [(i, j) for i in range(geom.n_sites)
             for j in range(i + 1, geom.n_sites)]

    def integrand(xi: float) -> float:
        alphas = _alpha_values(geom, xi)
        terms = []
        for i, j in pairs:
            if xi == 0.0:
                g_block = -static_green(geom.positions[i], geom.positions[j])
            else:
                g_block = -dyadic_green_imag(geom.positions[i],
                                             geom.positions[j], xi)
            # ordered pairs count each unordered pair twice
            terms.append(2.0 * alphas[i] * alphas[j]
                         * float(np.sum(g_block * g_block)))
        return math.fsum(terms)

    res = integrate_semi_infinite(integrand, quad)
    pref = 1.0 / (4.0 * math.pi)
    return EnergyResult(-pref * res.value, pref * res.error_estimate,
                        res.evaluations)


def _identical_single_resonance(geom: SystemGeometry) -> tuple[float, float]:
    first = geom.models[0]
    for model in geom.models:
        if not isinstance(model, KramersHeisenberg) \
                or len(model.transitions) != 1 \
                or model.transitions != first.transitions:
            raise ValueError(
                "normal-mode route needs identical single-resonance models")
    (t,) = first.transitions
    alpha_static = (2.0 / 3.0) * t.d2 / t.omega_sg
    return alpha_static, t.omega_sg


def normal_mode_energy(geom: SystemGeometry, nonretarded: bool = True
                       ) -> EnergyResult:
    """Sum of zero-point mode shifts of coupled identical dipoles.

    The electrostatic coupled-oscillator problem diagonalizes exactly:
    mode frequencies are omega0 sqrt(1 + alpha_static t_k) over the 3N
    eigenvalues t_k of the static interaction matrix.  Returns
    (1/2) sum_s omega_s - (3N/2) omega0.
    """
    if not nonretarded:
        raise ValueError(
            "only the electrostatic (nonretarded) normal-mode problem "
            "diagonalizes in closed form")
    alpha_static, omega0 = _identical_single_resonance(geom)
    t_eigs = np.linalg.eigvalsh(build_T(geom, 0.0))
    if np.any(1.0 + alpha_static * t_eigs <= 0.0):
        raise StrongCouplingError(
            "Hamiltonian unbounded below: a coupled mode frequency "
            "would be imaginary")
    # expm1(log1p(c)/2) = sqrt(1+c) - 1 without cancellation at small c
    value = 0.5 * omega0 * math.fsum(
        math.expm1(0.5 * math.log1p(alpha_static * t)) for t in t_eigs)
    err = 8.0 * np.finfo(float).eps * 1.5 * geom.n_sites * omega0
    return EnergyResult(value, err, 1)


def phf_lambda_integral(x, nodes: int = 64) -> float:
    """Coupling-constant integral int_0^1 (dl/l) Tr[l^2 x (1 - l^2 x)^{-1}].

    Gauss-Legendre on the unit interval; equals -(1/2) Tr log(1 - x) for
    spectral radius below one, which is the identity the free-energy
    derivation rests on.
    """
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 0
    if scalar:
        radius = abs(float(x))
    else:
        if x.ndim != 2 or x.shape[0] != x.shape[1]:
            raise ValueError("x must be a scalar or a square matrix")
        radius = float(np.max(np.abs(np.linalg.eigvals(x))))
    if radius >= 1.0:
        raise ValueError("spectral radius must be < 1")
    glx, glw = np.polynomial.legendre.leggauss(nodes)
    lam = 0.5 * (glx + 1.0)
    w = 0.5 * glw
    terms = []
    eye = None if scalar else np.eye(x.shape[0])
    for l_k, w_k in zip(lam, w):
        m = l_k * l_k * x
        if scalar:
            val = float(m / (1.0 - m))
        else:
            val = float(np.trace(np.linalg.solve(eye - m, m)))
        terms.append(w_k * val / l_k)
    return math.fsum(terms)
