"""On-axis Green functions for two atoms on either side of a planar interface.

With both atoms on the interface normal the Green tensor is diagonal,
``G = G_par (xx + yy) + G_perp zz``, and each component is a single
in-plane wavenumber integral. At ``omega = i xi`` the product
``k_1 k_2 = -n_1 n_2 xi^2``, so

    G_par  = (mu1/2) int dk k/kappa1 [t^s + kappa1 kappa2 t^p/(n1 n2 xi^2)] e^{kappa1 zA - kappa2 zB}
    G_perp = -mu1    int dk k^3/kappa1   t^p/(n1 n2 xi^2)                    e^{kappa1 zA - kappa2 zB}

Both blow up like ``1/xi^2`` as ``xi -> 0``; the potential only needs the
finite products ``H = xi^2 G``, which is what the batch routines return.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .planar_optics import HalfSpacePair, P, S, transmission
from .quadrature import (
    NonConvergenceError,
    QuadratureSpec,
    integrate_semi_infinite,
    integrate_product_2d,
)

__all__ = [
    "AtomPositions",
    "GreenComponents",
    "green_on_axis",
    "green_single_medium_closed",
    "green_rescaled",
    "rescaled_batch",
    "green_p_representation",
    "trace_space_integral",
    "trace_space_brute_force",
    "trace_tensor_product",
]


@dataclass(frozen=True)
class AtomPositions:
    """Atom A at ``z_a < 0`` (medium 1), atom B at ``z_b > 0`` (medium 2)."""

    z_a: float
    z_b: float

    def __post_init__(self):
        if not (self.z_a < 0 < self.z_b):
            raise ValueError(f"need z_a < 0 < z_b, got z_a={self.z_a}, z_b={self.z_b}")

    @property
    def separation(self) -> float:
        return self.z_b - self.z_a

    def mirrored(self) -> "AtomPositions":
        return AtomPositions(-self.z_b, -self.z_a)


@dataclass(frozen=True)
class GreenComponents:
    g_par: float
    g_perp: float
    err_par: float = 0.0
    err_perp: float = 0.0
    converged: bool = True


def _h_integrand(pair: HalfSpacePair, z_a, z_b, xi, k):
    """Integrands of ``xi^2 G_par`` and ``xi^2 G_perp`` (broadcast over ``xi``, ``k``)."""
    eps1, mu1, eps2, mu2 = pair.constants(xi)
    n1n2 = np.sqrt(eps1 * mu1 * eps2 * mu2)
    k1 = np.sqrt(eps1 * mu1 * xi * xi + k * k)
    k2 = np.sqrt(eps2 * mu2 * xi * xi + k * k)
    tp = transmission(P, eps1, mu1, eps2, mu2, k1, k2)
    ts = transmission(S, eps1, mu1, eps2, mu2, k1, k2)
    decay = np.exp(k1 * z_a - k2 * z_b)
    h_par = 0.5 * mu1 * k / k1 * (xi * xi * ts + k1 * k2 * tp / n1n2) * decay
    h_perp = -mu1 * k**3 / k1 * tp / n1n2 * decay
    return h_par, h_perp


def _k_scale(pair: HalfSpacePair, pos: AtomPositions, xi_max: float) -> float:
    z = pos.separation
    n = max(math.sqrt(pair.medium1.n2(0.0)), math.sqrt(pair.medium2.n2(0.0)))
    return 1.0 / z + math.sqrt(n * xi_max / z)


def rescaled_batch(pair: HalfSpacePair, pos: AtomPositions, xi, spec: QuadratureSpec):
    """``(xi^2 G_par, xi^2 G_perp, converged)`` for an array of ``xi > 0``.

    All ``xi`` share one adaptive ``k`` partition.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    m = xi.size

    def f(k):
        hp, hz = _h_integrand(pair, pos.z_a, pos.z_b, xi[None, :], k[:, None])
        return np.concatenate([hp, hz], axis=1)

    res = integrate_semi_infinite(f, _k_scale(pair, pos, float(xi.max())), spec)
    val = np.asarray(res.value)
    err = np.asarray(res.err_est)
    return val[:m], val[m:], res.converged, err[:m], err[m:]


def green_on_axis(pair: HalfSpacePair, pos: AtomPositions, xi: float, quad: QuadratureSpec | None = None) -> GreenComponents:
    """``G_par`` and ``G_perp`` by direct ``k`` quadrature (``xi > 0``)."""
    quad = quad or QuadratureSpec()
    if not xi > 0:
        raise ValueError("green_on_axis needs xi > 0; use green_rescaled at xi = 0")
    hp, hz, ok, ep, ez = rescaled_batch(pair, pos, [xi], quad)
    x2 = xi * xi
    return GreenComponents(hp[0] / x2, hz[0] / x2, ep[0] / x2, ez[0] / x2, ok)


def green_single_medium_closed(n: float, mu: float, xi: float, z: float) -> GreenComponents:
    """Closed-form components in a homogeneous medium of index ``n``."""
    if not (n > 0 and z > 0 and xi > 0):
        raise ValueError("need n > 0, z > 0, xi > 0")
    u = 1.0 / (n * xi * z)
    decay = math.exp(-n * xi * z)
    g_par = mu / z * (1.0 + u + u * u) * decay
    g_perp = -2.0 * mu / z * u * (1.0 + u) * decay
    return GreenComponents(g_par, g_perp)


def green_rescaled(pair: HalfSpacePair, pos: AtomPositions, xi: float, quad: QuadratureSpec | None = None) -> GreenComponents:
    """``H = xi^2 G``, finite down to ``xi = 0``.

    At ``xi = 0`` the integral is elementary:
    ``H_par = 2/((eps1+eps2) Z^3)`` and ``H_perp = -4/((eps1+eps2) Z^3)``.
    """
    quad = quad or QuadratureSpec()
    if xi < 0:
        raise ValueError("xi must be >= 0")
    if xi == 0:
        s = pair.medium1.eps(0.0) + pair.medium2.eps(0.0)
        z3 = pos.separation**3
        return GreenComponents(2.0 / (s * z3), -4.0 / (s * z3))
    hp, hz, ok, ep, ez = rescaled_batch(pair, pos, [xi], quad)
    return GreenComponents(hp[0], hz[0], ep[0], ez[0], ok)


def _g_of_p(pair: HalfSpacePair, xi, p):
    """``(g_par, g_perp, s)`` of the ``kappa1 = n1 xi p`` representation."""
    eps1, mu1, eps2, mu2 = pair.constants(xi)
    ratio = (eps2 * mu2) / (eps1 * mu1)
    s = np.sqrt(p * p - 1.0 + ratio)
    g_par = mu2 * p / (mu2 * p + mu1 * s) + p * p * eps1 * s / (eps2 * p + eps1 * s)
    g_perp = 2.0 * (1.0 - p * p) * eps1 * p / (eps2 * p + eps1 * s)
    return g_par, g_perp, s


def green_p_representation(pair: HalfSpacePair, pos: AtomPositions, xi: float, quad: QuadratureSpec | None = None) -> GreenComponents:
    """Same components via the substitution ``kappa1 = n1 xi p``, ``p`` in ``[1, inf)``."""
    quad = quad or QuadratureSpec()
    if not xi > 0:
        raise ValueError("xi must be > 0")
    mu1 = pair.medium1.mu(xi)
    n1 = math.sqrt(pair.medium1.n2(xi))
    a = n1 * xi

    def f(p):
        gp, gz, s = _g_of_p(pair, xi, p)
        decay = np.exp(-a * (s * pos.z_b - p * pos.z_a))
        return np.stack([gp * decay, gz * decay], axis=1)

    scale = 1.0 / (a * pos.separation) if a * pos.separation > 0 else 1.0
    res = integrate_semi_infinite(f, min(max(scale, 1e-3), 1e6), quad, lower=1.0)
    val, err = np.asarray(res.value), np.asarray(res.err_est)
    pref = mu1 * a
    return GreenComponents(pref * val[0], pref * val[1], pref * err[0], pref * err[1], res.converged)


def _trace_integrand(pair: HalfSpacePair, z_a, xi, k, rescaled: bool):
    """Integrand (per ``dk``, angle done) of the trace integral after the ``z_B`` integration."""
    eps1, mu1, eps2, mu2 = pair.constants(xi)
    n1sq, n2sq = eps1 * mu1, eps2 * mu2
    k1 = np.sqrt(n1sq * xi * xi + k * k)
    k2 = np.sqrt(n2sq * xi * xi + k * k)
    tp = transmission(P, eps1, mu1, eps2, mu2, k1, k2)
    ts = transmission(S, eps1, mu1, eps2, mu2, k1, k2)
    pol = (k1 * k1 + k * k) * (k2 * k2 + k * k) / (n1sq * n2sq)
    x4 = xi**4
    if rescaled:
        bracket = tp * tp * pol + x4 * ts * ts
    else:
        bracket = tp * tp * pol / x4 + ts * ts
    return 2.0 * math.pi * k * (mu1 / k1) ** 2 * bracket * np.exp(2.0 * k1 * z_a) / (2.0 * k2)


def trace_space_integral(pair: HalfSpacePair, z_a: float, xi: float, quad: QuadratureSpec | None = None, rescaled: bool = False):
    """``int d^2k/(2pi)^2 int_0^inf dz_B Tr[G(k) . G^T(-k)]`` in reduced form.

    The ``z_B`` integral is done analytically, leaving one ``k`` quadrature.
    With ``rescaled`` the result is multiplied by ``xi^4``.
    Returns ``(value, err_est, converged)``.
    """
    quad = quad or QuadratureSpec()
    if not z_a < 0:
        raise ValueError("z_a must be < 0")
    if not xi > 0:
        raise ValueError("xi must be > 0")
    res = integrate_semi_infinite(lambda k: _trace_integrand(pair, z_a, xi, k, rescaled), 0.5 / abs(z_a), quad)
    return res.value, res.err_est, res.converged


def _green_k_tensor(pair: HalfSpacePair, xi, k, z_a, z_b, phi, sign: float):
    """``xi^2 G(sign * k; z_a, z_b)`` as complex 3x3 tensors, built from the dyadic form.

    Shapes broadcast over ``xi``, ``k``, ``z_b``; the tensor axes are last.
    """
    eps1, mu1, eps2, mu2 = pair.constants(xi)
    n1, n2 = np.sqrt(eps1 * mu1), np.sqrt(eps2 * mu2)
    k1 = np.sqrt(n1 * n1 * xi * xi + k * k)
    k2 = np.sqrt(n2 * n2 * xi * xi + k * k)
    tp = transmission(P, eps1, mu1, eps2, mu2, k1, k2)
    ts = transmission(S, eps1, mu1, eps2, mu2, k1, k2)
    khat = sign * np.array([math.cos(phi), math.sin(phi), 0.0])
    zhat = np.array([0.0, 0.0, 1.0])
    ehat = np.cross(khat, zhat)
    kk = np.asarray(k)[..., None]
    a = 1j * np.asarray(k1)[..., None] * khat + kk * zhat
    b = 1j * np.asarray(k2)[..., None] * khat + kk * zhat
    # xi^2 / (k_1 k_2) with k_i = i n_i xi
    pol_weight = -1.0 / (n1 * n2)
    dyad_p = np.einsum("...i,...j->...ij", a, b)
    dyad_s = np.einsum("i,j->ij", ehat, ehat)
    pref = 2.0 * math.pi * mu1 / k1 * np.exp(k1 * z_a - k2 * z_b)
    t_p = (pref * tp * pol_weight)[..., None, None]
    t_s = (pref * ts * xi * xi)[..., None, None]
    return t_p * dyad_p + t_s * dyad_s


def trace_tensor_product(pair: HalfSpacePair, xi, k, z_a, z_b, phi: float = 0.0):
    """``xi^4 Tr[G(k) . G^T(-k)]`` from explicit tensors (real part; imaginary part is zero)."""
    g_fwd = _green_k_tensor(pair, xi, k, z_a, z_b, phi, +1.0)
    g_bwd = _green_k_tensor(pair, xi, k, z_a, z_b, phi, -1.0)
    tr = np.einsum("...ij,...ij->...", g_fwd, g_bwd)
    return tr.real, tr.imag


def trace_space_brute_force(pair: HalfSpacePair, z_a: float, xi: float, quad: QuadratureSpec | None = None, rescaled: bool = False):
    """The same integral as :func:`trace_space_integral` by 2D ``(k, z_B)`` quadrature
    of the explicit tensor trace. Returns ``(value, err_est, converged)``."""
    quad = quad or QuadratureSpec()

    def f(k, zb):
        return k * trace_tensor_product(pair, xi, k, z_a, zb)[0]

    res = integrate_product_2d(f, (0.5 / abs(z_a), abs(z_a)), quad)
    # d^2k = k dk dphi; the phi integral gives 2 pi against the (2 pi)^2
    scale = 1.0 / (2.0 * math.pi)
    if not rescaled:
        scale /= xi**4
    value = scale * res.value
    if quad.strict and not res.converged:
        raise NonConvergenceError("brute-force trace integral did not converge", res.history)
    return value, abs(scale) * res.err_est, res.converged
