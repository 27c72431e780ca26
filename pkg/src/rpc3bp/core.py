"""Coordinate charts, Hamiltonians and vector fields for the planar circular
restricted three-body problem (RPC3BP).

Charts
------
cartesian : inertial position/momentum (q, p) with the primaries on circular
    orbits of radius mu and 1-mu.
polar     : (r, alpha, y, G) with y the radial momentum, G the angular momentum.
rotating  : rescaled synodic chart (r, phi, y, G).  Radii are measured in units
    of g0^2, momenta in 1/g0, time in g0^3, and phi = alpha - t is the angle
    relative to the primaries.  In this chart the system is an autonomous
    two-degree-of-freedom Hamiltonian and the energy level of interest is
    H = -g0^3 (the Jacobi-constant level J = -g0 of the original variables).

State layout for array-based work is ``[r, phi, y, G]`` (rotating chart).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import atan2, cos, hypot, pi, sin, sqrt

import numpy as np

__all__ = [
    "CollisionError",
    "PrecisionError",
    "ResolutionError",
    "SectionTimeoutError",
    "Params",
    "CartesianState",
    "PolarState",
    "RotatingState",
    "McGeheeState",
    "collision_radius",
    "hamiltonian_cartesian",
    "hamiltonian_polar",
    "hamiltonian_rotating",
    "jacobi_constant",
    "potential_V",
    "potential_V_dr",
    "potential_V_dphi",
    "cartesian_to_polar",
    "polar_to_cartesian",
    "polar_to_rotating",
    "rotating_to_polar",
    "vector_field_rotating",
    "involution_R",
    "mcgehee_local_field",
    "mcgehee_lambda",
]

# Denominators below this are treated as a primary collision.
_COLLISION_EPS = 1e-12

# Validity cutoff of the local chart at infinity (x = sqrt(2/r)).
MCGEHEE_X_CUTOFF = 0.5


class CollisionError(ValueError):
    """State too close to one of the primaries."""


class PrecisionError(RuntimeError):
    """Requested accuracy is below what the arithmetic can deliver."""


class ResolutionError(RuntimeError):
    """Sampling too coarse for the requested analysis."""


class SectionTimeoutError(RuntimeError):
    """No Poincare-section crossing found within the integration horizon."""

    def __init__(self, msg, last_state=None):
        super().__init__(msg)
        self.last_state = last_state


@dataclass(frozen=True)
class Params:
    """Physical parameters: mass ratio mu and angular-momentum level g0.

    mu is the mass of the smaller primary (total mass 1), so mu in [0, 1/2].
    g0 > 1 is the rescaled angular-momentum / Jacobi-constant level; the
    asymptotic regime of interest is g0 large.
    """

    mu: float
    g0: float

    def __post_init__(self):
        if not 0.0 <= self.mu <= 0.5:
            raise ValueError(f"mu must be in [0, 1/2], got {self.mu}")
        if not self.g0 > 1.0:
            raise ValueError(f"g0 must exceed 1, got {self.g0}")


@dataclass(frozen=True)
class CartesianState:
    q: tuple[float, float]
    p: tuple[float, float]
    t: float = 0.0


@dataclass(frozen=True)
class PolarState:
    r: float
    alpha: float
    y: float
    G: float
    t: float = 0.0


@dataclass(frozen=True)
class RotatingState:
    """Point of the rescaled rotating chart; fields are (r, phi, y, G)."""

    r: float
    phi: float
    y: float
    G: float

    def to_array(self) -> np.ndarray:
        return np.array([self.r, self.phi, self.y, self.G], dtype=float)

    @staticmethod
    def from_array(z) -> "RotatingState":
        return RotatingState(float(z[0]), float(z[1]), float(z[2]), float(z[3]))


@dataclass(frozen=True)
class McGeheeState:
    """Local chart at infinity: x = sqrt(2/r) >= 0, radial variable y, angle theta."""

    x: float
    y: float
    theta: float


def collision_radius(p: Params) -> float:
    """Conservative rotating-chart radius cutoff: twice the largest primary
    distance that carries mass.

    Only primaries with nonzero mass are singular, so at mu = 0 the cutoff is
    twice the distance of the (massless) small primary, which lets the
    unperturbed separatrix pass its perihelion r = 1/2 at any g0.
    """
    radii = 0.0
    if p.mu > 0.0:
        radii = max(radii, (1.0 - p.mu) / p.g0**2)
    if p.mu < 1.0:
        radii = max(radii, p.mu / p.g0**2)
    return 2.0 * radii


# ---------------------------------------------------------------------------
# Hamiltonians and the Jacobi constant
# ---------------------------------------------------------------------------

def hamiltonian_cartesian(s: CartesianState, p: Params) -> float:
    """Energy |p|^2/2 - (1-mu)/|q + mu*q0(t)| - mu/|q - (1-mu)*q0(t)|,
    with q0(t) = (cos t, sin t) the primaries' circular motion."""
    q1, q2 = s.q
    p1, p2 = s.p
    c, sn = cos(s.t), sin(s.t)
    d1 = hypot(q1 + p.mu * c, q2 + p.mu * sn)
    d2 = hypot(q1 - (1.0 - p.mu) * c, q2 - (1.0 - p.mu) * sn)
    # only primaries carrying mass are singular
    if (p.mu < 1.0 and d1 < _COLLISION_EPS) or (p.mu > 0.0 and d2 < _COLLISION_EPS):
        raise CollisionError("state at a primary")
    out = 0.5 * (p1 * p1 + p2 * p2)
    if p.mu < 1.0:
        out -= (1.0 - p.mu) / d1
    if p.mu > 0.0:
        out -= p.mu / d2
    return out


def _newton_potential_polar(r: float, phi_rel: float, mu: float) -> float:
    # phi_rel = alpha - t: the angle from the axis pointing toward the
    # smaller primary at (1-mu) q0(t).  The larger primary sits at -mu q0(t),
    # so its distance term carries the opposite cosine sign.
    d1sq = r * r + 2.0 * mu * r * cos(phi_rel) + mu * mu
    d2sq = r * r - 2.0 * (1.0 - mu) * r * cos(phi_rel) + (1.0 - mu) ** 2
    if ((mu < 1.0 and d1sq < _COLLISION_EPS**2)
            or (mu > 0.0 and d2sq < _COLLISION_EPS**2)):
        raise CollisionError("state at a primary")
    out = 0.0
    if mu < 1.0:
        out += (1.0 - mu) / sqrt(d1sq)
    if mu > 0.0:
        out += mu / sqrt(d2sq)
    return out


def hamiltonian_polar(s: PolarState, p: Params) -> float:
    if s.r <= 0.0:
        raise CollisionError("r must be positive")
    pot = _newton_potential_polar(s.r, s.alpha - s.t, p.mu)
    return 0.5 * s.y * s.y + s.G * s.G / (2.0 * s.r * s.r) - pot


def jacobi_constant(s: PolarState, p: Params) -> float:
    """Conserved combination H - G of the polar chart."""
    return hamiltonian_polar(s, p) - s.G


def potential_V(r: float, phi: float, p: Params) -> float:
    """Rescaled perturbation potential of the rotating chart.

    V(r, phi) = (1-mu)/d1 + mu/d2 - 1/r with the primaries at distances
    mu/g0^2 and (1-mu)/g0^2 from the origin.  Even in phi; identically zero
    at mu = 0; pi-periodic in phi at mu = 1/2.  Size O(mu/(g0^4 r^3)) for
    r away from the primaries.
    """
    m1 = p.mu / p.g0**2
    m2 = (1.0 - p.mu) / p.g0**2
    cp = cos(phi)
    d1sq = r * r - 2.0 * m1 * r * cp + m1 * m1
    d2sq = r * r + 2.0 * m2 * r * cp + m2 * m2
    if d1sq < _COLLISION_EPS**2 or d2sq < _COLLISION_EPS**2:
        raise CollisionError("rotating state at a primary")
    return (1.0 - p.mu) / sqrt(d1sq) + p.mu / sqrt(d2sq) - 1.0 / r


def potential_V_dr(r: float, phi: float, p: Params) -> float:
    """Radial derivative of potential_V."""
    m1 = p.mu / p.g0**2
    m2 = (1.0 - p.mu) / p.g0**2
    cp = cos(phi)
    d1sq = r * r - 2.0 * m1 * r * cp + m1 * m1
    d2sq = r * r + 2.0 * m2 * r * cp + m2 * m2
    if d1sq < _COLLISION_EPS**2 or d2sq < _COLLISION_EPS**2:
        raise CollisionError("rotating state at a primary")
    d13 = d1sq * sqrt(d1sq)
    d23 = d2sq * sqrt(d2sq)
    return (-(1.0 - p.mu) * (r - m1 * cp) / d13
            - p.mu * (r + m2 * cp) / d23
            + 1.0 / (r * r))


def potential_V_dphi(r: float, phi: float, p: Params) -> float:
    """Angular derivative of potential_V; equals
    mu(1-mu)/g0^2 * r sin(phi) * (1/d2^3 - 1/d1^3)."""
    m1 = p.mu / p.g0**2
    m2 = (1.0 - p.mu) / p.g0**2
    cp = cos(phi)
    d1sq = r * r - 2.0 * m1 * r * cp + m1 * m1
    d2sq = r * r + 2.0 * m2 * r * cp + m2 * m2
    if d1sq < _COLLISION_EPS**2 or d2sq < _COLLISION_EPS**2:
        raise CollisionError("rotating state at a primary")
    d13 = d1sq * sqrt(d1sq)
    d23 = d2sq * sqrt(d2sq)
    return (p.mu * (1.0 - p.mu) / p.g0**2) * r * sin(phi) * (1.0 / d23 - 1.0 / d13)


def hamiltonian_rotating(s: RotatingState, p: Params) -> float:
    """Autonomous two-degree-of-freedom energy of the rotating chart:
    y^2/2 - g0^3 G + G^2/(2 r^2) - 1/r - V(r, phi).

    Relates to the polar-chart Jacobi constant by H = g0^2 * J, so the
    working energy shell H = -g0^3 corresponds to J = -g0.
    """
    if s.r <= 0.0:
        raise CollisionError("r must be positive")
    return (0.5 * s.y * s.y - p.g0**3 * s.G + s.G * s.G / (2.0 * s.r * s.r)
            - 1.0 / s.r - potential_V(s.r, s.phi, p))


# ---------------------------------------------------------------------------
# Chart transforms
# ---------------------------------------------------------------------------

def cartesian_to_polar(s: CartesianState) -> PolarState:
    q1, q2 = s.q
    p1, p2 = s.p
    r = hypot(q1, q2)
    if r <= 0.0:
        raise CollisionError("origin has no polar chart")
    alpha = atan2(q2, q1)
    y = (q1 * p1 + q2 * p2) / r
    G = q1 * p2 - q2 * p1
    return PolarState(r, alpha, y, G, s.t)


def polar_to_cartesian(s: PolarState) -> CartesianState:
    c, sn = cos(s.alpha), sin(s.alpha)
    q = (s.r * c, s.r * sn)
    p = (s.y * c - s.G / s.r * sn, s.y * sn + s.G / s.r * c)
    return CartesianState(q, p, s.t)


def polar_to_rotating(s: PolarState, p: Params) -> RotatingState:
    """Rescale and pass to the synodic angle phi = alpha - t + pi.

    The pi offset places the larger primary at phi-distance cos(phi) as the
    rotating-chart potential is written (larger mass toward phi = 0), keeping
    every chart consistent with the Cartesian primary positions.
    """
    return RotatingState(s.r / p.g0**2, s.alpha - s.t + pi, s.y * p.g0,
                         s.G / p.g0)


def rotating_to_polar(s: RotatingState, t: float, p: Params) -> PolarState:
    """Inverse of polar_to_rotating at original-variables time t."""
    return PolarState(s.r * p.g0**2, s.phi + t - pi, s.y / p.g0, s.G * p.g0, t)


# ---------------------------------------------------------------------------
# Vector field, reversibility, local chart at infinity
# ---------------------------------------------------------------------------

def vector_field_rotating(s: RotatingState, p: Params) -> np.ndarray:
    """d/ds of (r, phi, y, G) under the rotating-chart Hamiltonian flow.

    Returns (y, G/r^2 - g0^3, G^2/r^3 - 1/r^2 + dV/dr, dV/dphi).  The energy
    hamiltonian_rotating is a first integral.  At mu = 0 the G component is
    identically zero.
    """
    if s.r < collision_radius(p):
        raise CollisionError(f"r={s.r} inside collision cutoff")
    return np.array([
        s.y,
        s.G / (s.r * s.r) - p.g0**3,
        s.G * s.G / s.r**3 - 1.0 / (s.r * s.r) + potential_V_dr(s.r, s.phi, p),
        potential_V_dphi(s.r, s.phi, p),
    ])


def involution_R(s: RotatingState) -> RotatingState:
    """Reversing symmetry (r, phi, y, G) -> (r, -phi, -y, G); an involution.

    Conjugates the flow to its time reversal, and maps the unstable manifold
    of infinity onto the stable one.  Fixed points have y = 0, phi in {0, pi}.
    """
    return RotatingState(s.r, -s.phi, -s.y, s.G)


def mcgehee_lambda(theta: float, mu: float) -> float:
    """Angular coefficient (3/32) mu (1-mu) (1 - 3 cos^2 theta) of the x^8 term."""
    c = cos(theta)
    return (3.0 / 32.0) * mu * (1.0 - mu) * (1.0 - 3.0 * c * c)


def mcgehee_local_field(m: McGeheeState, J: float, p: Params) -> tuple[float, float, float]:
    """Truncated local vector field at infinity in the chart r = 2/x^2.

    With K = J - mu(1-mu):

        dx/dtheta = x^3 y / 4 + K x^7 y / 32
        dy/dtheta = x^4/4 - K^2 x^6/32 + 3 K x^6 y^2/16 - lambda(theta) x^8
        dtheta/dtheta = 1

    Only the displayed polynomial orders are modeled (the order-10 remainder
    is dropped), so the chart is for qualitative/initialization use within
    |x|, |y| <= MCGEHEE_X_CUTOFF.  x = 0 is the invariant parabolic set.
    """
    if m.x < 0.0:
        raise ValueError("x must be nonnegative")
    if abs(m.x) > MCGEHEE_X_CUTOFF or abs(m.y) > MCGEHEE_X_CUTOFF:
        raise ValueError(
            f"local chart valid for |x|,|y| <= {MCGEHEE_X_CUTOFF}: got ({m.x}, {m.y})")
    K = J - p.mu * (1.0 - p.mu)
    x, y = m.x, m.y
    x3 = x**3
    x6 = x**6
    dx = x3 * y / 4.0 + K * x6 * x * y / 32.0
    dy = (x3 * x / 4.0 - K * K * x6 / 32.0 + 3.0 * K * x6 * y * y / 16.0
          - mcgehee_lambda(m.theta, p.mu) * x6 * x * x)
    return (dx, dy, 1.0)
