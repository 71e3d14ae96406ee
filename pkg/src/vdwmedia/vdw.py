"""Two-atom van der Waals potential across a planar interface (atoms on the normal).

Reduced units (``hbar = c = 1``, frequencies in ``omega_ref``). The full
potential is

    U_AB = -(1/2pi) int_0^inf dxi alpha_A alpha_B [2 H_par^2 + H_perp^2],

with ``H = xi^2 G`` from :mod:`vdwmedia.greens`, which keeps the integrand
finite at ``xi = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .greens import AtomPositions, rescaled_batch
from .materials import AtomModel, characteristic_frequencies
from .planar_optics import HalfSpacePair
from .quadrature import (
    NonConvergenceError,
    QuadratureSpec,
    integrate_product_2d,
    integrate_semi_infinite,
)

__all__ = [
    "InterfaceSystem",
    "PotentialResult",
    "vdw_full",
    "vdw_nonretarded",
    "london_integral_analytic",
    "vdw_retarded",
    "vdw_single_medium",
    "ratio_scan",
    "nonretarded_ratio_scan",
]


@dataclass(frozen=True)
class InterfaceSystem:
    pair: HalfSpacePair
    atom_a: AtomModel
    atom_b: AtomModel
    pos: AtomPositions

    def mirrored(self) -> "InterfaceSystem":
        """Reflect through the interface: media, atoms and positions swap roles."""
        return InterfaceSystem(self.pair.swapped(), self.atom_b, self.atom_a, self.pos.mirrored())

    def frequency_window(self) -> tuple[float, float]:
        return characteristic_frequencies(
            [self.pair.medium1, self.pair.medium2], [self.atom_a, self.atom_b]
        )


@dataclass
class PotentialResult:
    value: float
    abs_err: float = 0.0
    n_evals: int = 0
    converged: bool = True


def _finish(res, pref: float, spec: QuadratureSpec, inner_ok: bool = True) -> PotentialResult:
    ok = res.converged and inner_ok
    if spec.strict and not ok:
        raise NonConvergenceError("potential quadrature did not converge", res.history)
    return PotentialResult(pref * float(res.value), abs(pref) * float(res.err_est), res.n_evals, ok)


def vdw_full(sys: InterfaceSystem, quad: QuadratureSpec | None = None) -> PotentialResult:
    """On-axis potential with full retardation and dispersion."""
    quad = quad or QuadratureSpec()
    inner = replace(quad.tighter(1e-2), vector_floor=1e-3)
    _, w_max = sys.frequency_window()
    z = sys.pos.separation
    state = {"ok": True}

    def f(xi):
        hp, hz, ok, _, _ = rescaled_batch(sys.pair, sys.pos, xi, inner)
        state["ok"] &= ok
        return sys.atom_a.alpha(xi) * sys.atom_b.alpha(xi) * (2.0 * hp * hp + hz * hz)

    res = integrate_semi_infinite(f, min(w_max, 1.0 / z), quad)
    return _finish(res, -1.0 / (2.0 * math.pi), quad, state["ok"])


def vdw_nonretarded(sys: InterfaceSystem, quad: QuadratureSpec | None = None) -> PotentialResult:
    """Short-distance limit ``-(3/(pi Z^6)) int dxi alpha_A alpha_B / eps_bar^2``."""
    quad = quad or QuadratureSpec()
    _, w_max = sys.frequency_window()
    m1, m2 = sys.pair.medium1, sys.pair.medium2

    def f(xi):
        eps_bar = 0.5 * (m1.eps(xi) + m2.eps(xi))
        return sys.atom_a.alpha(xi) * sys.atom_b.alpha(xi) / eps_bar**2

    res = integrate_semi_infinite(f, w_max, quad)
    return _finish(res, -3.0 / (math.pi * sys.pos.separation**6), quad)


def london_integral_analytic(atom_a: AtomModel, atom_b: AtomModel, eps_bar: float = 1.0) -> float:
    """``int_0^inf alpha_A alpha_B dxi / eps_bar^2`` for constant ``eps_bar``.

    Equals ``pi a_A a_B w_A w_B / (2 (w_A + w_B))``, i.e. ``pi a^2 w / 4`` for
    identical atoms.
    """
    wa, wb = atom_a.resonance, atom_b.resonance
    return math.pi * atom_a.alpha_static * atom_b.alpha_static * wa * wb / (2.0 * (wa + wb)) / eps_bar**2


def _static_p_kernel(pair: HalfSpacePair):
    e1, u1 = pair.medium1.eps_static, pair.medium1.mu_static
    e2, u2 = pair.medium2.eps_static, pair.medium2.mu_static
    ratio = (e2 * u2) / (e1 * u1)

    def g(p):
        s = np.sqrt(p * p - 1.0 + ratio)
        g_par = u2 * p / (u2 * p + u1 * s) + p * p * e1 * s / (e2 * p + e1 * s)
        g_perp = 2.0 * (1.0 - p * p) * e1 * p / (e2 * p + e1 * s)
        return g_par, g_perp, s

    return g


def vdw_retarded(sys: InterfaceSystem, quad: QuadratureSpec | None = None) -> PotentialResult:
    """Large-distance potential from static material and atomic constants.

    ``-(360/pi) a_A(0) a_B(0) / (eps1^2 n1) * int int dp dp'
    [2 g_par g_par' + g_perp g_perp'] / [(s + s') z_B - (p + p') z_A]^7``.
    """
    quad = quad or QuadratureSpec()
    g = _static_p_kernel(sys.pair)
    za, zb = sys.pos.z_a, sys.pos.z_b
    z = sys.pos.separation

    def f(p, pp):
        gp1, gz1, s1 = g(p)
        gp2, gz2, s2 = g(pp)
        denom = ((s1 + s2) * zb - (p + pp) * za) / z
        return (2.0 * gp1 * gp2 + gz1 * gz2) / denom**7

    res = integrate_product_2d(f, (1.0, 1.0), quad, lowers=(1.0, 1.0))
    m1 = sys.pair.medium1
    pref = (
        -(360.0 / math.pi)
        * sys.atom_a.alpha_static
        * sys.atom_b.alpha_static
        / (m1.eps_static**2 * m1.n_static * z**7)
    )
    return _finish(res, pref, quad)


def vdw_single_medium(n0: float, eps0: float, atom_a: AtomModel, atom_b: AtomModel, z: float) -> PotentialResult:
    """Retarded potential in one homogeneous medium: ``-23 a_A a_B / (4 pi eps^2 n Z^7)``."""
    if not (n0 > 0 and eps0 > 0 and z > 0):
        raise ValueError("need n0, eps0, z > 0")
    value = -23.0 * atom_a.alpha_static * atom_b.alpha_static / (4.0 * math.pi * eps0**2 * n0 * z**7)
    return PotentialResult(value)


def _positions(fraction: float, z: float) -> AtomPositions:
    if not 0 < fraction < 1:
        raise ValueError("z_B/Z must lie in (0, 1)")
    return AtomPositions(-(1.0 - fraction) * z, fraction * z)


def ratio_scan(
    pair: HalfSpacePair,
    fractions,
    z: float | None = None,
    atom_a: AtomModel | None = None,
    atom_b: AtomModel | None = None,
    quad: QuadratureSpec | None = None,
) -> list[tuple[float, float]]:
    """``U_AB / U^(1)_AB`` in the retarded regime versus ``z_B / Z``.

    The reference is the single-medium potential of medium 1 at the same
    ``Z``. With ``z=None`` the separation is ``1e3 / w_min``.
    """
    atom_a = atom_a or AtomModel(1.0, 1.0)
    atom_b = atom_b or atom_a
    if z is None:
        w_min, _ = characteristic_frequencies([pair.medium1, pair.medium2], [atom_a, atom_b])
        z = 1e3 / w_min
    m1 = pair.medium1
    ref = vdw_single_medium(m1.n_static, m1.eps_static, atom_a, atom_b, z).value
    out = []
    for fr in fractions:
        sys = InterfaceSystem(pair, atom_a, atom_b, _positions(float(fr), z))
        out.append((float(fr), vdw_retarded(sys, quad).value / ref))
    return out


def nonretarded_ratio_scan(
    pair: HalfSpacePair,
    fractions,
    z: float = 1e-3,
    atom_a: AtomModel | None = None,
    atom_b: AtomModel | None = None,
    quad: QuadratureSpec | None = None,
) -> list[tuple[float, float]]:
    """``vdw_full / vdw_nonretarded`` at short ``Z`` versus ``z_B / Z``."""
    atom_a = atom_a or AtomModel(1.0, 1.0)
    atom_b = atom_b or atom_a
    out = []
    for fr in fractions:
        sys = InterfaceSystem(pair, atom_a, atom_b, _positions(float(fr), z))
        out.append((float(fr), vdw_full(sys, quad).value / vdw_nonretarded(sys, quad).value))
    return out
