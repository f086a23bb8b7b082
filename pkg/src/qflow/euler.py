"""Angle arithmetic and ZYZ Euler extraction for single-qubit unitaries.

Angles are normalized to (-pi, pi] and snapped exactly onto the pi/2 lattice
when within 1e-9 of a lattice point; exact lattice membership is what the
stabilizer backend and peephole cancellation key on.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

__all__ = [
    "normalize_angle",
    "snap_angle",
    "lattice_power",
    "zyz_angles",
    "zyz_from_cells",
    "SNAP_TOL",
]

SNAP_TOL = 1e-9
_HALF_PI = math.pi / 2
_TWO_PI = 2 * math.pi

# |sin(theta/2)| (resp. |cos|) below this selects the gimbal-degenerate branch
_DEGENERATE_TOL = 1e-12


def normalize_angle(a: float) -> float:
    """Wrap into (-pi, pi]."""
    a = math.fmod(a, _TWO_PI)
    if a > math.pi:
        a -= _TWO_PI
    elif a <= -math.pi:
        a += _TWO_PI
    return a


def snap_angle(a: float, tol: float = SNAP_TOL) -> float:
    """Normalize, then snap to an exact multiple of pi/2 when within tol."""
    a = normalize_angle(a)
    k = round(a / _HALF_PI)
    lattice = k * _HALF_PI
    if abs(a - lattice) <= tol:
        return normalize_angle(lattice) if k == -2 else lattice + 0.0
    return a


def lattice_power(a: float, tol: float = SNAP_TOL) -> int | None:
    """k in {0,1,2,3} with a = k*pi/2 (mod 2*pi), or None if off-lattice."""
    k = round(a / _HALF_PI)
    if abs(a - k * _HALF_PI) > tol:
        return None
    return k % 4


def zyz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """Euler angles with u proportional to U3(theta, phi, lam).

    Total over all 2x2 unitaries. In the gimbal-degenerate cases
    (theta near 0 or pi) the z-rotation is folded into phi and lam is 0.
    """
    return zyz_from_cells(
        complex(u[0, 0]), complex(u[0, 1]), complex(u[1, 0]), complex(u[1, 1])
    )


def zyz_from_cells(
    a00: complex, a01: complex, a10: complex, a11: complex
) -> tuple[float, float, float]:
    """ZYZ extraction on row-major matrix cells (allocation-free hot path)."""
    c = abs(a00)
    s = abs(a10)
    if s <= _DEGENERATE_TOL:
        return 0.0, normalize_angle(cmath.phase(a11) - cmath.phase(a00)), 0.0
    if c <= _DEGENERATE_TOL:
        return math.pi, normalize_angle(cmath.phase(a10) - cmath.phase(-a01)), 0.0
    theta = 2.0 * math.atan2(s, c)
    phi = normalize_angle(cmath.phase(a10) - cmath.phase(a00))
    lam = normalize_angle(cmath.phase(-a01) - cmath.phase(a00))
    return theta, phi, lam
