"""Material and atomic response on the imaginary frequency axis.

Units are reduced throughout: frequencies in ``omega_ref``, lengths in
``c / omega_ref``, energies in ``hbar * omega_ref``. Polarizabilities carry
``(c / omega_ref)**3`` and number densities its inverse, so ``4 pi N alpha``
is dimensionless.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

__all__ = [
    "OscillatorTerm",
    "MaterialModel",
    "AtomModel",
    "MixtureSpec",
    "VACUUM",
    "ClausiusMossottiDivergence",
    "ExpansionWarning",
    "EXPANSION_THRESHOLD",
    "eval_eps",
    "eval_mu",
    "eval_alpha",
    "effective_polarizability",
    "mixture_eps",
    "characteristic_frequencies",
]

EXPANSION_THRESHOLD = 1e-2


class ClausiusMossottiDivergence(ValueError):
    """The Clausius-Mossotti denominator is not positive."""


class ExpansionWarning(UserWarning):
    """A first-order expansion parameter exceeds its validity threshold."""


@dataclass(frozen=True)
class OscillatorTerm:
    strength: float
    resonance: float
    damping: float = 0.0

    def __post_init__(self):
        if not self.strength >= 0:
            raise ValueError(f"oscillator strength must be >= 0, got {self.strength}")
        if not self.resonance > 0:
            raise ValueError(f"oscillator resonance must be > 0, got {self.resonance}")
        if not self.damping >= 0:
            raise ValueError(f"oscillator damping must be >= 0, got {self.damping}")

    def at(self, xi):
        w2 = self.resonance**2
        return self.strength * w2 / (w2 + xi * xi + self.damping * xi)


def _oscillator_sum(terms, xi):
    xi = np.asarray(xi, dtype=float)
    out = np.ones_like(xi)
    for term in terms:
        out = out + term.at(xi)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class MaterialModel:
    """Lorentz-oscillator permittivity and permeability.

    ``eps(i xi) = 1 + sum s w0^2 / (w0^2 + xi^2 + g xi)``, likewise for
    ``mu``. An empty ``mu_terms`` means a nonmagnetic medium.
    """

    eps_terms: tuple[OscillatorTerm, ...] = ()
    mu_terms: tuple[OscillatorTerm, ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "eps_terms", tuple(self.eps_terms))
        object.__setattr__(self, "mu_terms", tuple(self.mu_terms))

    @classmethod
    def constant(cls, eps: float = 1.0, mu: float = 1.0, name: str = "") -> "MaterialModel":
        """Dispersionless-looking medium with a very high resonance.

        The single oscillator sits at ``1e12 omega_ref`` so the response is
        flat over any practical integration range yet still decays at
        infinity as the passivity invariants require.
        """
        if eps < 1 or mu < 1:
            raise ValueError("eps and mu must be >= 1 on the imaginary axis")
        eps_terms = (OscillatorTerm(eps - 1.0, 1e12),) if eps > 1 else ()
        mu_terms = (OscillatorTerm(mu - 1.0, 1e12),) if mu > 1 else ()
        return cls(eps_terms, mu_terms, name)

    @property
    def eps_static(self) -> float:
        return 1.0 + sum(t.strength for t in self.eps_terms)

    @property
    def mu_static(self) -> float:
        return 1.0 + sum(t.strength for t in self.mu_terms)

    @property
    def n_static(self) -> float:
        return math.sqrt(self.eps_static * self.mu_static)

    def eps(self, xi):
        return _oscillator_sum(self.eps_terms, xi)

    def mu(self, xi):
        return _oscillator_sum(self.mu_terms, xi)

    def n2(self, xi):
        return self.eps(xi) * self.mu(xi)

    def resonances(self) -> list[float]:
        return [t.resonance for t in self.eps_terms + self.mu_terms]


VACUUM = MaterialModel(name="vacuum")


@dataclass(frozen=True)
class AtomModel:
    """Single-oscillator ground-state polarizability ``a0 w0^2/(w0^2 + xi^2)``."""

    alpha_static: float
    resonance: float = 1.0
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.alpha_static > 0:
            raise ValueError("alpha_static must be > 0")
        if not self.resonance > 0:
            raise ValueError("resonance must be > 0")

    def alpha(self, xi):
        xi = np.asarray(xi, dtype=float)
        w2 = self.resonance**2
        out = self.alpha_static * w2 / (w2 + xi * xi)
        return out if out.ndim else float(out)

    def scaled(self, factor: float) -> "AtomModel":
        return AtomModel(self.alpha_static * factor, self.resonance, self.name)


@dataclass(frozen=True)
class MixtureSpec:
    """Host medium doped with a number density of foreign atoms."""

    host: MaterialModel
    dopant: AtomModel
    number_density: float

    def __post_init__(self):
        if not self.number_density >= 0:
            raise ValueError("number_density must be >= 0")
        if self.expansion_parameter > EXPANSION_THRESHOLD:
            warnings.warn(
                f"N*alpha = {self.expansion_parameter:.3g} exceeds {EXPANSION_THRESHOLD:g}; "
                "first-order density expansions lose accuracy",
                ExpansionWarning,
                stacklevel=3,
            )

    @property
    def expansion_parameter(self) -> float:
        return self.number_density * self.dopant.alpha_static


def eval_eps(m: MaterialModel, xi):
    """Permittivity ``eps(i xi)``."""
    _check_xi(xi)
    return m.eps(xi)


def eval_mu(m: MaterialModel, xi):
    """Permeability ``mu(i xi)``."""
    _check_xi(xi)
    return m.mu(xi)


def eval_alpha(a: AtomModel, xi):
    """Vacuum polarizability ``alpha(i xi)``."""
    _check_xi(xi)
    return a.alpha(xi)


def _check_xi(xi):
    if np.any(np.asarray(xi) < 0):
        raise ValueError("imaginary frequency xi must be >= 0")


def effective_polarizability(
    host_eps,
    alpha,
    density: float = 0.0,
    order: Literal["linear", "exact"] = "linear",
):
    """Local-field corrected polarizability of an atom in a Clausius-Mossotti host.

    The linear form ``alpha ((eps + 2)/3)**2`` is the small-density limit of
    the exact expression, which additionally divides by
    ``1 - (4 pi / 3) N alpha (eps + 2) / 3``.
    """
    host_eps = np.asarray(host_eps, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    factor = (host_eps + 2.0) / 3.0
    linear = alpha * factor**2
    if order == "linear":
        return linear if linear.ndim else float(linear)
    if order != "exact":
        raise ValueError(f"order must be 'linear' or 'exact', got {order!r}")
    denom = 1.0 - (4.0 * math.pi / 3.0) * density * alpha * factor
    if np.any(denom <= 0):
        raise ClausiusMossottiDivergence(
            "Clausius-Mossotti divergence: 1 - (4pi/3) N alpha (eps+2)/3 <= 0"
        )
    out = linear / denom
    return out if out.ndim else float(out)


def mixture_eps(mix: MixtureSpec, xi, order: Literal["linear", "exact"] = "linear"):
    """Permittivity ``eps_host + 4 pi N alpha_eff`` of a doped host."""
    host = eval_eps(mix.host, xi)
    if mix.number_density == 0:
        return host
    alpha_eff = effective_polarizability(host, mix.dopant.alpha(xi), mix.number_density, order)
    return host + 4.0 * math.pi * mix.number_density * alpha_eff


def characteristic_frequencies(
    materials: Sequence[MaterialModel], atoms: Sequence[AtomModel]
) -> tuple[float, float]:
    """Smallest and largest resonance among the given media and atoms.

    Used only to pick integration scales. Falls back to ``(1, 1)`` when
    nothing in the system has a resonance.
    """
    freqs = [w for m in materials for w in m.resonances() if w < 1e11]
    freqs += [a.resonance for a in atoms]
    if not freqs:
        return 1.0, 1.0
    return min(freqs), max(freqs)
