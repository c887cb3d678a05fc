"""Retarded dyadic Green tensor between point dipoles.

The tensor connecting a source dipole at ``rm`` to the field at ``rn`` in a
homogeneous medium of real refractive index n is

    G(r, omega) = (omega^2 k / c^2) * exp(i k r)
                  * [ (I - p)/(k r) + (I - 3 p)(i/(k r)^2 - 1/(k r)^3) ]

with k = n omega / c and p the outer product of the unit separation vector
with itself.  One complex kernel serves the real axis, the positive
imaginary axis (where every entry is exactly real), and the static limit.
Entries carry units of inverse volume in Hartree atomic units.
"""

from __future__ import annotations

import numpy as np

from .core import SPEED_OF_LIGHT, separation

__all__ = [
    "f_tensor",
    "dyadic_green",
    "dyadic_green_imag",
    "static_green",
    "im_coincidence",
]

_IDENTITY = np.eye(3)


def _projectors(rhat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p = np.outer(rhat, rhat)
    return _IDENTITY - p, _IDENTITY - 3.0 * p


def f_tensor(x: float, rhat: np.ndarray) -> np.ndarray:
    """Dimensionless angular tensor of dipole radiation exchange.

    F(x) = (I - p) sin(x)/x + (I - 3p)(cos(x)/x^2 - sin(x)/x^3), which
    tends to (2/3) I as x -> 0 and to the transverse projector times
    sin(x)/x in the far zone.
    """
    if x <= 0:
        raise ValueError("dimensionless distance x must be positive")
    rhat = np.asarray(rhat, dtype=float)
    if abs(np.dot(rhat, rhat) - 1.0) > 1e-12:
        raise ValueError("rhat must be a unit vector")
    transverse, static = _projectors(rhat)
    sx, cx = np.sin(x), np.cos(x)
    return transverse * (sx / x) + static * (cx / x**2 - sx / x**3)


def _green_kernel(omega: complex, r: float, rhat: np.ndarray,
                  n_index: float) -> np.ndarray:
    """Shared kernel for both frequency axes; omega may be complex."""
    k = n_index * omega / SPEED_OF_LIGHT
    kr = k * r
    transverse, static = _projectors(rhat)
    bracket = (transverse / kr
               + static * (1j / (kr * kr) - 1.0 / (kr * kr * kr)))
    prefactor = omega * omega * k / SPEED_OF_LIGHT**2
    return prefactor * np.exp(1j * kr) * bracket


def dyadic_green(rn: np.ndarray, rm: np.ndarray, omega: float,
                 n_index: float = 1.0) -> np.ndarray:
    """Green tensor at real frequency; complex 3x3 array.

    The static limit (omega r/c -> 0) is (3 p - I)/(n^2 r^3); the far zone
    keeps only the transverse 1/(k r) term.
    """
    if omega <= 0:
        raise ValueError("frequency must be positive")
    if n_index < 1.0:
        raise ValueError("refractive index must be >= 1")
    r, rhat = separation(rn, rm)
    return _green_kernel(complex(omega), r, rhat, n_index)


def dyadic_green_imag(rn: np.ndarray, rm: np.ndarray, xi: float) -> np.ndarray:
    """Green tensor on the positive imaginary axis (vacuum); real 3x3 array.

    Entries equal -exp(-x) [ (xi/c)^2 (I-p)/r + (xi/c)(I-3p)/r^2
    + (I-3p)/r^3 ] with x = xi r / c: every term real, decaying as exp(-x).
    """
    if xi <= 0:
        raise ValueError("imaginary-axis frequency must be positive")
    r, rhat = separation(rn, rm)
    g = _green_kernel(complex(0.0, xi), r, rhat, 1.0)
    # purely imaginary omega makes every entry exactly real in IEEE terms
    return g.real


def static_green(rn: np.ndarray, rm: np.ndarray) -> np.ndarray:
    """Zero-frequency (longitudinal) limit (3 p - I)/r^3 in vacuum."""
    r, rhat = separation(rn, rm)
    return (3.0 * np.outer(rhat, rhat) - _IDENTITY) / r**3


def im_coincidence(omega: float, n_index: float = 1.0) -> float:
    """Imaginary part of the Green tensor at coincident points.

    Returns the full scalar coefficient 2 n omega^3 / c^3, the finite trace
    of Im G as both points merge; each diagonal Cartesian component carries
    one third of it.  The divergent real part is never computed.
    """
    if omega <= 0:
        raise ValueError("frequency must be positive")
    if n_index < 1.0:
        raise ValueError("refractive index must be >= 1")
    return 2.0 * n_index * omega**3 / SPEED_OF_LIGHT**3
