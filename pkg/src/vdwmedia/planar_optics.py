"""Perpendicular wave numbers and planar reflection/transmission at ``omega = i xi``.

On the imaginary axis every quantity is real, so plain float arithmetic is
used. ``kappa_i = sqrt(n_i^2 xi^2 + k^2)`` is the evanescent decay constant
in medium ``i`` and, for ``q`` in ``{p, s}``,

    gamma^p_12 = eps1/eps2,  gamma^s_12 = mu1/mu2,
    r^q_12 = (kappa1 - gamma^q kappa2) / (kappa1 + gamma^q kappa2),
    t^q_12 = sqrt(gamma^q/gamma^s) (1 + r^q_12).

Expanded quantities come in pairs (exact, first order) so expansion claims
can be tested instead of assumed.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Protocol

import numpy as np

from .materials import (
    EXPANSION_THRESHOLD,
    AtomModel,
    ExpansionWarning,
    MaterialModel,
    MixtureSpec,
    effective_polarizability,
    mixture_eps,
)

__all__ = [
    "Polarization",
    "P",
    "S",
    "HalfSpacePair",
    "DegenerateWavevector",
    "kappa",
    "fresnel_r",
    "fresnel_t",
    "reflection",
    "transmission",
    "thin_slab_r",
    "slab_r_first_order",
    "slab_kappa_expansion",
    "composite_mirror_R",
    "mirror_density_term",
    "composite_mirror_delta",
    "Mirror",
    "PerfectMirror",
    "InterfaceMirror",
    "CompositeMirror",
]


class Polarization(enum.Enum):
    P = "p"
    S = "s"


P = Polarization.P
S = Polarization.S


class DegenerateWavevector(ValueError):
    pass


@dataclass(frozen=True)
class HalfSpacePair:
    """Medium 1 fills ``z < 0``, medium 2 fills ``z > 0``."""

    medium1: MaterialModel
    medium2: MaterialModel

    def swapped(self) -> "HalfSpacePair":
        return HalfSpacePair(self.medium2, self.medium1)

    def constants(self, xi):
        """``(eps1, mu1, eps2, mu2)`` at ``i xi``."""
        return (self.medium1.eps(xi), self.medium1.mu(xi), self.medium2.eps(xi), self.medium2.mu(xi))


def _kappa(n2, xi, k):
    return np.sqrt(n2 * xi * xi + k * k)


def kappa(m: MaterialModel, xi, k):
    """Perpendicular decay constant ``sqrt(n^2 xi^2 + k^2)``."""
    xi = np.asarray(xi, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any((xi == 0) & (k == 0)):
        raise DegenerateWavevector("degenerate wavevector: xi = k = 0")
    if np.any(xi < 0) or np.any(k < 0):
        raise ValueError("xi and k must be >= 0")
    out = _kappa(m.n2(xi), xi, k)
    return out if out.ndim else float(out)


def reflection(q: Polarization, eps1, mu1, eps2, mu2, kap1, kap2):
    """``r^q_12`` from material constants and decay constants."""
    if q is P:
        return (eps2 * kap1 - eps1 * kap2) / (eps2 * kap1 + eps1 * kap2)
    return (mu2 * kap1 - mu1 * kap2) / (mu2 * kap1 + mu1 * kap2)


def transmission(q: Polarization, eps1, mu1, eps2, mu2, kap1, kap2):
    """``t^q_12 = sqrt(gamma^q/gamma^s) 2 kappa1 / (kappa1 + gamma^q kappa2)``."""
    if q is P:
        pref = np.sqrt((eps1 * mu2) / (eps2 * mu1))
        return pref * 2.0 * eps2 * kap1 / (eps2 * kap1 + eps1 * kap2)
    return 2.0 * mu2 * kap1 / (mu2 * kap1 + mu1 * kap2)


def _pair_state(pair: HalfSpacePair, xi, k):
    eps1, mu1, eps2, mu2 = pair.constants(xi)
    k1 = kappa(pair.medium1, xi, k)
    k2 = kappa(pair.medium2, xi, k)
    return eps1, mu1, eps2, mu2, k1, k2


def fresnel_r(pair: HalfSpacePair, q: Polarization, xi, k):
    """Reflection coefficient ``r^q_12`` for a wave in medium 1."""
    return reflection(q, *_pair_state(pair, xi, k))


def fresnel_t(pair: HalfSpacePair, q: Polarization, xi, k):
    """Transmission coefficient ``t^q_12`` from medium 1 into medium 2."""
    return transmission(q, *_pair_state(pair, xi, k))


class SlabReflection(NamedTuple):
    exact: float
    linearized: float


def thin_slab_r(host: MaterialModel, slab_eps, slab_mu, q: Polarization, xi, k, thickness, delta_eps=None):
    """Reflection from a slab of thickness ``d_s`` embedded in ``host``.

    ``exact`` is the Airy sum ``r_1s (1 - e^{-2 kappa_s d_s}) / (1 - r_1s^2 e^{-2 kappa_s d_s})``;
    ``linearized`` is ``2 r_1s kappa_s d_s``. Passing ``delta_eps = slab_eps - eps_host``
    (with ``slab_mu`` equal to the host permeability) evaluates ``r_1s``
    without subtractive cancellation for nearly index-matched slabs.
    """
    if not thickness > 0:
        raise ValueError("slab thickness must be > 0")
    eps1, mu1 = host.eps(xi), host.mu(xi)
    k1 = kappa(host, xi, k)
    if delta_eps is not None:
        slab_eps = eps1 + delta_eps
        slab_mu = mu1
    ks = np.sqrt(slab_eps * slab_mu * xi * xi + k * k)
    if np.any(ks * thickness > 0.1):
        warnings.warn("kappa_s * d_s > 0.1: thin-slab linearization is inaccurate", ExpansionWarning, stacklevel=2)
    if delta_eps is None:
        r1s = reflection(q, eps1, mu1, slab_eps, slab_mu, k1, ks)
    else:
        dk = delta_eps * mu1 * xi * xi / (ks + k1)
        if q is P:
            r1s = (delta_eps * k1 - eps1 * dk) / (slab_eps * k1 + eps1 * ks)
        else:
            r1s = -dk / (k1 + ks)
    x = ks * thickness
    decay = np.exp(-2.0 * x)
    exact = r1s * (-np.expm1(-2.0 * x)) / (1.0 - r1s * r1s * decay)
    return SlabReflection(exact, 2.0 * r1s * x)


def slab_kappa_expansion(host_kappa, alpha_eff, density, mu_host, xi):
    """First-order ``kappa_s = kappa_1 (1 + 2 pi N alpha_eff mu_1 xi^2 / kappa_1^2)``."""
    if np.any(np.asarray(host_kappa) <= 0):
        raise ValueError("host_kappa must be > 0")
    return host_kappa * (1.0 + 2.0 * math.pi * density * alpha_eff * mu_host * xi * xi / host_kappa**2)


def slab_r_first_order(host: MaterialModel, alpha_eff, density, q: Polarization, xi, k):
    """Host-to-doped-slab reflection ``r^q_1s`` to first order in ``N alpha_eff``."""
    eps1, mu1 = host.eps(xi), host.mu(xi)
    k1 = kappa(host, xi, k)
    small = math.pi * density * alpha_eff
    if q is P:
        return (2.0 * small / eps1) * (1.0 - host.n2(xi) * xi * xi / (2.0 * k1 * k1))
    return -small * mu1 * xi * xi / (k1 * k1)


class MirrorReflection(NamedTuple):
    exact: float
    first_order: float


def mirror_density_term(pair: HalfSpacePair, dopant: AtomModel, q: Polarization, xi, k):
    """Derivative of the composite-mirror coefficient with respect to dopant density.

    For ``p``: ``t^p_12 t^p_21 pi alpha_eff mu2 (2 kappa2^2 - n2^2 xi^2) / (n2^2 kappa2^2)``;
    for ``s``: ``-t^s_12 t^s_21 pi alpha_eff mu2 xi^2 / kappa2^2``, with
    ``alpha_eff = alpha ((eps2 + 2)/3)^2``. The ``p`` factor is written
    without dividing by ``xi^2`` so it stays finite at ``xi = 0``.
    """
    eps1, mu1, eps2, mu2, k1, k2 = _pair_state(pair, xi, k)
    alpha_eff = effective_polarizability(eps2, dopant.alpha(xi))
    t12 = transmission(q, eps1, mu1, eps2, mu2, k1, k2)
    t21 = transmission(q, eps2, mu2, eps1, mu1, k2, k1)
    if q is P:
        n22 = eps2 * mu2
        return t12 * t21 * math.pi * alpha_eff * mu2 * (2.0 * k2 * k2 - n22 * xi * xi) / (n22 * k2 * k2)
    return -t12 * t21 * math.pi * alpha_eff * mu2 * xi * xi / (k2 * k2)


def composite_mirror_R(pair: HalfSpacePair, dopant: AtomModel, density: float, q: Polarization, xi, k):
    """Reflection of medium 2 doped with ``density`` atoms, seen from medium 1.

    ``exact`` uses the Clausius-Mossotti mixture permittivity; ``first_order``
    is ``r^q_12 + density * mirror_density_term``.
    """
    if density * dopant.alpha_static > EXPANSION_THRESHOLD:
        warnings.warn("N_B alpha_B exceeds the first-order threshold", ExpansionWarning, stacklevel=2)
    eps1, mu1, eps2, mu2, k1, k2 = _pair_state(pair, xi, k)
    r12 = reflection(q, eps1, mu1, eps2, mu2, k1, k2)
    if density == 0:
        return MirrorReflection(r12, r12)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExpansionWarning)
        eps_m = mixture_eps(MixtureSpec(pair.medium2, dopant, density), xi)
    km = np.sqrt(eps_m * mu2 * xi * xi + k * k)
    exact = reflection(q, eps1, mu1, eps_m, mu2, k1, km)
    first = r12 + density * mirror_density_term(pair, dopant, q, xi, k)
    return MirrorReflection(exact, first)


def composite_mirror_delta(pair: HalfSpacePair, dopant: AtomModel, density: float, q: Polarization, xi, k):
    """``R^q_exact - r^q_12`` for the doped mirror, free of subtractive cancellation."""
    eps1, mu1, eps2, mu2, k1, k2 = _pair_state(pair, xi, k)
    if density == 0:
        return np.zeros(np.broadcast(xi, k).shape)
    delta_eps = 4.0 * math.pi * density * effective_polarizability(eps2, dopant.alpha(xi))
    eps_m = eps2 + delta_eps
    km = np.sqrt(eps_m * mu2 * xi * xi + k * k)
    dk = delta_eps * mu2 * xi * xi / (km + k2)
    if q is P:
        cross = eps1 * k1 * (delta_eps * k2 - eps2 * dk)
        return 2.0 * cross / ((eps_m * k1 + eps1 * km) * (eps2 * k1 + eps1 * k2))
    cross = -mu1 * mu2 * k1 * dk
    return 2.0 * cross / ((mu2 * k1 + mu1 * km) * (mu2 * k1 + mu1 * k2))


class Mirror(Protocol):
    """Anything that returns ``R^q(i xi, k)`` seen from medium 1."""

    def __call__(self, q: Polarization, xi, k): ...


class PerfectMirror:
    """Ideal conductor: ``R^p = 1``, ``R^s = -1``."""

    def __call__(self, q, xi, k):
        return np.full(np.broadcast(xi, k).shape, 1.0 if q is P else -1.0)


@dataclass(frozen=True)
class InterfaceMirror:
    """Bare half-space: ``R^q = r^q_12``."""

    pair: HalfSpacePair

    def __call__(self, q, xi, k):
        return fresnel_r(self.pair, q, xi, k)


@dataclass(frozen=True)
class CompositeMirror:
    """Doped half-space.

    ``mode`` is ``"exact"`` or ``"first_order"`` for the full coefficient,
    ``"delta"`` for ``R_exact - r_12`` and ``"density_term"`` for the
    first-order change per unit density.
    """

    pair: HalfSpacePair
    dopant: AtomModel
    density: float
    mode: str = "exact"

    def __call__(self, q, xi, k):
        if self.mode == "delta":
            return composite_mirror_delta(self.pair, self.dopant, self.density, q, xi, k)
        if self.mode == "density_term":
            return mirror_density_term(self.pair, self.dopant, q, xi, k)
        res = composite_mirror_R(self.pair, self.dopant, self.density, q, xi, k)
        if self.mode == "exact":
            return res.exact
        if self.mode == "first_order":
            return res.first_order
        raise ValueError(f"unknown mirror mode {self.mode!r}")
