"""Finite-horizon demonstration of oscillatory-type motion near the tangle.

Orbits seeded close to a transversal homoclinic point of the manifolds of
infinity make repeated large radial excursions followed by returns to a
bounded region.  This module iterates the section return map by direct
integration, logging the radial maximum between consecutive returns, and
classifies termination (iteration budget, hyperbolic escape, or a parabolic
departure that never returns).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi

import numpy as np

from .core import CollisionError, Params, RotatingState, hamiltonian_rotating
from .integrate import flow, refine_to_section, section_event
from .manifolds import lift_to_shell

__all__ = ["ExcursionLog", "ReturnRecord", "oscillation_demo", "HYPERBOLIC_EXCESS"]

# two-body energy threshold classifying an outgoing orbit as hyperbolic
HYPERBOLIC_EXCESS = 1e-6


@dataclass(frozen=True)
class ReturnRecord:
    s: float                # accumulated flow time at the return
    r: float
    y: float
    G: float
    max_r_since_last: float


@dataclass
class ExcursionLog:
    params: Params
    phi0: float
    seed: tuple[float, float]
    r_out: float
    r_in: float
    returns: list[ReturnRecord] = field(default_factory=list)
    excursions: list[tuple[float, float]] = field(default_factory=list)  # (max r, return r)
    escaped: bool = False
    escape_kind: str = ""   # "hyperbolic" | "parabolic_or_escape"
    energy_residual: float = 0.0

    @property
    def n_excursions(self) -> int:
        return len(self.excursions)


def _two_body_energy(z) -> float:
    r, _, y, G = z
    return 0.5 * y * y - 1.0 / r + G * G / (2.0 * r * r)


def oscillation_demo(p: Params, seed: tuple[float, float], n_iter: int,
                     r_out: float, r_in: float, phi0: float = 0.0,
                     tol: float = 1e-11) -> ExcursionLog:
    """Iterate section returns from a seed near the homoclinic tangle.

    Logs every return to {phi = phi0 (mod 2pi)} together with the maximum
    radius reached since the previous drop below r_in; an excursion is a
    radial maximum above r_out followed by a return below r_in.  Long
    flights are integrated straight through (the radial maximum is located
    by the y = 0 turning-point event, not by section counting).  Terminates
    after n_iter returns, on hyperbolic escape (two-body energy above
    HYPERBOLIC_EXCESS at r > 10 r_out), or on a parabolic/undecided
    departure past the same horizon.  Deterministic for fixed inputs.
    """
    if not r_out > r_in > 1.0:
        raise ValueError("need r_out > r_in > 1")
    if seed[0] >= r_out:
        raise ValueError("seed must start inside r_out")
    z = lift_to_shell(seed[0], seed[1], phi0, p).to_array()
    h0 = hamiltonian_rotating(RotatingState.from_array(z), p)
    log = ExcursionLog(params=p, phi0=phi0, seed=(float(seed[0]), float(seed[1])),
                       r_out=r_out, r_in=r_in)

    sec = section_event(phi0)
    sec.terminal = True

    def going_out(s_, z_):
        return z_[0] - r_out
    going_out.terminal = True
    going_out.direction = 1.0

    def coming_back(s_, z_):
        return z_[0] - 0.98 * r_out
    coming_back.terminal = True
    coming_back.direction = -1.0

    def apo(s_, z_):
        return z_[2]
    apo.terminal = False
    apo.direction = -1.0

    r_horizon = 10.0 * r_out

    def far(s_, z_):
        return z_[0] - r_horizon
    far.terminal = True
    far.direction = 1.0

    s_acc = 0.0
    max_r = float(z[0])
    synodic = 2.0 * pi / p.g0**3
    flight_horizon = 60.0 * synodic + 6.0 * pi * (2.0 * r_horizon) ** 1.5
    h_final = h0
    n_returns = 0

    while n_returns < n_iter:
        # inside region: run to the next section crossing, bailing into
        # excursion mode if the orbit climbs past r_out first
        try:
            pre = flow(z, (0.0, 0.05 * synodic), tol, p)
            z1 = pre.y[:, -1]
            max_r = max(max_r, float(np.max(pre.y[0])))
            sol = flow(z1, (0.0, 4.0 * synodic), tol, p, events=[sec, going_out])
        except CollisionError:
            break
        if len(sol.t_events[1]) == 0 and len(sol.t_events[2]) > 0:
            # excursion: integrate straight through, no section counting
            z_ex = sol.y_events[2][0]
            s_acc += 0.05 * synodic + float(sol.t_events[2][0])
            try:
                ex = flow(z_ex, (0.0, flight_horizon), tol, p,
                          events=[coming_back, apo, far])
            except CollisionError:
                break
            if len(ex.y_events[3]) > 0 or len(ex.t_events[1]) == 0:
                zf = (ex.y_events[3][0] if len(ex.y_events[3]) > 0
                      else ex.y[:, -1])
                e2 = _two_body_energy(zf)
                log.escaped = True
                log.escape_kind = ("hyperbolic" if e2 > HYPERBOLIC_EXCESS
                                  else "parabolic_or_escape")
                max_r = max(max_r, float(zf[0]))
                break
            if len(ex.t_events[2]) > 0:
                max_r = max(max_r, float(np.max(ex.y_events[2][:, 0])))
            z = ex.y_events[1][0]
            s_acc += float(ex.t_events[1][0])
            max_r = max(max_r, r_out)
            continue
        if len(sol.t_events[1]) == 0:
            log.escaped = True
            log.escape_kind = "parabolic_or_escape"
            break
        z = refine_to_section(sol.y_events[1][0], phi0, p)
        max_r = max(max_r, float(z[0]))
        s_acc += 0.05 * synodic + float(sol.t_events[1][0])
        n_returns += 1
        log.returns.append(ReturnRecord(s=s_acc, r=float(z[0]), y=float(z[2]),
                                        G=float(z[3]), max_r_since_last=max_r))
        h_final = hamiltonian_rotating(RotatingState.from_array(z), p)
        if z[0] < r_in:
            if max_r > r_out:
                log.excursions.append((max_r, float(z[0])))
            max_r = float(z[0])

    log.energy_residual = abs(h_final - h0)
    return log
