"""Atom-medium potentials and forces, and the local-field consistency check.

Sign convention for forces: the returned value is the ``z`` component of
the force on the atom (or slab), with the mirror / medium 2 on the positive
side. Attraction is therefore positive. It is the same quantity as
``-dU/dz_A`` for an atom at ``z_A = -d_A``.

All ``xi`` integrands are written in forms that stay finite at ``xi = 0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .greens import trace_tensor_product
from .materials import (
    EXPANSION_THRESHOLD,
    AtomModel,
    ExpansionWarning,
    MaterialModel,
    MixtureSpec,
    characteristic_frequencies,
    effective_polarizability,
)
from .planar_optics import (
    CompositeMirror,
    HalfSpacePair,
    InterfaceMirror,
    Mirror,
    P,
    S,
    thin_slab_r,
    transmission,
)
from .quadrature import (
    NonConvergenceError,
    QuadratureSpec,
    integrate_product_2d,
    integrate_semi_infinite,
)
from .vdw import PotentialResult

__all__ = [
    "DistributionSystem",
    "SlabSystem",
    "ForceResult",
    "ResonantDenominator",
    "cp_distribution_potential",
    "cp_distribution_gradient",
    "cp_pairwise_oracle",
    "cp_atom_force",
    "slab_force",
    "force_decomposition",
    "composite_remainder",
    "ForceDecomposition",
    "local_field_consistency",
    "ConsistencyReport",
]


class ResonantDenominator(ValueError):
    """``|r R e^{-2 kappa d}| >= 1`` in the slab-force series."""


@dataclass
class ForceResult:
    value: float
    abs_err: float = 0.0
    n_evals: int = 0
    converged: bool = True


@dataclass(frozen=True)
class DistributionSystem:
    """Atom A at ``z_a < 0`` in medium 1; atoms B at density ``density_b`` filling medium 2."""

    pair: HalfSpacePair
    atom_a: AtomModel
    atom_b: AtomModel
    z_a: float
    density_b: float

    def __post_init__(self):
        if not self.z_a < 0:
            raise ValueError("z_a must be < 0")
        if not self.density_b >= 0:
            raise ValueError("density_b must be >= 0")
        if self.density_b * self.atom_b.alpha_static > EXPANSION_THRESHOLD:
            warnings.warn("N_B alpha_B exceeds the first-order threshold", ExpansionWarning, stacklevel=3)

    def at(self, z_a: float) -> "DistributionSystem":
        return DistributionSystem(self.pair, self.atom_a, self.atom_b, z_a, self.density_b)

    def frequency_window(self):
        return characteristic_frequencies([self.pair.medium1, self.pair.medium2], [self.atom_a, self.atom_b])


@dataclass(frozen=True)
class SlabSystem:
    """Thin doped slab (host + ``slab_mixture`` dopants) at distance ``d`` from a mirror."""

    host: MaterialModel
    slab_mixture: MixtureSpec
    mirror: Mirror
    d: float
    thickness: float
    cm_order: str = field(default="exact")

    def __post_init__(self):
        if not (self.d > 0 and self.thickness > 0):
            raise ValueError("d and thickness must be > 0")


def _alpha_fn(atom: AtomModel, host: MaterialModel, local_field: bool) -> Callable:
    if not local_field:
        return atom.alpha
    return lambda xi: effective_polarizability(host.eps(xi), atom.alpha(xi))


def _raise_or_flag(res, spec: QuadratureSpec, what: str):
    if spec.strict and not res.converged:
        raise NonConvergenceError(f"{what} did not converge", res.history)


def _distribution_kernel(pair: HalfSpacePair, z_a, xi, k):
    """``xi^4 [(2k1^2/n1^2 xi^2 - 1)(2k2^2/n2^2 xi^2 - 1) t^p t^p + t^s t^s] k mu1 mu2 / kappa2^2``
    and ``kappa1``, the common part of potential and force integrands."""
    eps1, mu1, eps2, mu2 = pair.constants(xi)
    n1sq, n2sq = eps1 * mu1, eps2 * mu2
    x2 = xi * xi
    k1 = np.sqrt(n1sq * x2 + k * k)
    k2 = np.sqrt(n2sq * x2 + k * k)
    tp12 = transmission(P, eps1, mu1, eps2, mu2, k1, k2)
    tp21 = transmission(P, eps2, mu2, eps1, mu1, k2, k1)
    ts12 = transmission(S, eps1, mu1, eps2, mu2, k1, k2)
    ts21 = transmission(S, eps2, mu2, eps1, mu1, k2, k1)
    pol = (2.0 * k1 * k1 - n1sq * x2) * (2.0 * k2 * k2 - n2sq * x2) / (n1sq * n2sq)
    bracket = pol * tp12 * tp21 + x2 * x2 * ts12 * ts21
    return mu1 * mu2 * k / (k2 * k2) * bracket * np.exp(2.0 * k1 * z_a), k1


def _scales(sys: DistributionSystem, z_a: float):
    _, w_max = sys.frequency_window()
    return min(w_max, 1.0 / abs(z_a)), 0.5 / abs(z_a)


def cp_distribution_potential(
    sys: DistributionSystem, quad: QuadratureSpec | None = None, local_field: bool = False
) -> PotentialResult:
    """Potential of atom A due to the uniform B distribution in medium 2.

    ``U = -N_B int dxi alpha_A alpha_B int dk (...) e^{2 kappa1 z_A} / (2 kappa1)``.
    ``local_field`` replaces both polarizabilities by their Clausius-Mossotti
    effective values in the respective host.
    """
    quad = quad or QuadratureSpec()
    if sys.density_b == 0:
        return PotentialResult(0.0)
    alpha_a = _alpha_fn(sys.atom_a, sys.pair.medium1, local_field)
    alpha_b = _alpha_fn(sys.atom_b, sys.pair.medium2, local_field)

    def f(xi, k):
        kern, k1 = _distribution_kernel(sys.pair, sys.z_a, xi, k)
        return alpha_a(xi) * alpha_b(xi) * kern / (2.0 * k1)

    res = integrate_product_2d(f, _scales(sys, sys.z_a), quad)
    _raise_or_flag(res, quad, "distribution potential")
    pref = -sys.density_b
    return PotentialResult(pref * res.value, abs(pref) * res.err_est, res.n_evals, res.converged)


def cp_distribution_gradient(
    sys: DistributionSystem, quad: QuadratureSpec | None = None, local_field: bool = False
) -> PotentialResult:
    """``dU/dz_A`` by quadrature of the differentiated integrand (``e^{2 kappa1 z_A}`` gives ``2 kappa1``)."""
    quad = quad or QuadratureSpec()
    if sys.density_b == 0:
        return PotentialResult(0.0)
    alpha_a = _alpha_fn(sys.atom_a, sys.pair.medium1, local_field)
    alpha_b = _alpha_fn(sys.atom_b, sys.pair.medium2, local_field)

    def f(xi, k):
        kern, _ = _distribution_kernel(sys.pair, sys.z_a, xi, k)
        return alpha_a(xi) * alpha_b(xi) * kern

    res = integrate_product_2d(f, _scales(sys, sys.z_a), quad)
    _raise_or_flag(res, quad, "distribution gradient")
    pref = -sys.density_b
    return PotentialResult(pref * res.value, abs(pref) * res.err_est, res.n_evals, res.converged)


def cp_pairwise_oracle(sys: DistributionSystem, quad: QuadratureSpec | None = None) -> PotentialResult:
    """Brute-force pairwise sum ``N_B int_{z_B > 0} d^3 r_B U_AB``.

    The lateral integral becomes ``int d^2k/(2pi)^2 Tr[G(k) . G^T(-k)]`` with
    tensors assembled explicitly; ``z_B``, ``k`` and ``xi`` are all done by
    nested quadrature (no analytic reduction).
    """
    quad = quad or QuadratureSpec()
    if sys.density_b == 0:
        return PotentialResult(0.0)
    xi_scale, k_scale = _scales(sys, sys.z_a)
    za = sys.z_a
    mid = replace(quad.tighter(0.1), vector_floor=1e-3)
    inner = replace(quad.tighter(0.01), vector_floor=1e-3)
    state = {"ok": True, "evals": 0}

    def over_xi(xi):
        xi_row = xi[None, :]

        def over_k(k):
            kk = k[:, None]
            # z_B enters both tensors only through exp(-kappa2 z_B); the trace
            # is taken once at z_B = 0 and the z_B integral done numerically.
            weighted = (kk * trace_tensor_product(sys.pair, xi_row, kk, za, 0.0)[0]).ravel()
            k2 = np.sqrt(sys.pair.medium2.n2(xi_row) * xi_row**2 + kk * kk).ravel()

            def over_zb(zb):
                return weighted[None, :] * np.exp(-2.0 * k2[None, :] * zb[:, None])

            r = integrate_semi_infinite(over_zb, abs(za), inner)
            state["ok"] &= r.converged
            state["evals"] += r.n_evals
            return np.asarray(r.value).reshape(k.size, xi.size)

        r = integrate_semi_infinite(over_k, k_scale, mid)
        state["ok"] &= r.converged
        state["evals"] += r.n_evals
        return sys.atom_a.alpha(xi) * sys.atom_b.alpha(xi) * np.asarray(r.value)

    res = integrate_semi_infinite(over_xi, xi_scale, quad)
    ok = res.converged and state["ok"]
    if quad.strict and not ok:
        raise NonConvergenceError("pairwise oracle did not converge", res.history)
    # -(N/2pi) int dxi xi^4 a a (1/2pi) int k dk int dz_B Tr
    pref = -sys.density_b / (2.0 * math.pi) / (2.0 * math.pi)
    return PotentialResult(pref * res.value, abs(pref) * res.err_est, res.n_evals + state["evals"], ok)


def cp_atom_force(
    host: MaterialModel,
    atom: AtomModel,
    mirror: Mirror,
    d_a: float,
    quad: QuadratureSpec | None = None,
    local_field: bool = True,
    xi_scale: float | None = None,
) -> ForceResult:
    """Force on an atom at distance ``d_a`` from a mirror, through ``host``.

    ``f = (1/pi) int dxi mu1 alpha_eff int dk k e^{-2 kappa1 d}
    [(2 kappa1^2 - n1^2 xi^2)/n1^2 R^p - xi^2 R^s]``.
    """
    quad = quad or QuadratureSpec()
    if not d_a > 0:
        raise ValueError("d_a must be > 0")
    alpha = _alpha_fn(atom, host, local_field)
    if xi_scale is None:
        _, w_max = characteristic_frequencies([host], [atom])
        xi_scale = min(w_max, 1.0 / d_a)

    def f(xi, k):
        eps1, mu1 = host.eps(xi), host.mu(xi)
        n1sq = eps1 * mu1
        x2 = xi * xi
        k1 = np.sqrt(n1sq * x2 + k * k)
        bracket = (2.0 * k1 * k1 - n1sq * x2) / n1sq * mirror(P, xi, k) - x2 * mirror(S, xi, k)
        return mu1 * alpha(xi) * k * np.exp(-2.0 * k1 * d_a) * bracket

    res = integrate_product_2d(f, (xi_scale, 0.5 / d_a), quad)
    _raise_or_flag(res, quad, "atom force")
    return ForceResult(res.value / math.pi, res.err_est / math.pi, res.n_evals, res.converged)


def slab_force(sys: SlabSystem, quad: QuadratureSpec | None = None, linear_in_r: bool = False) -> ForceResult:
    """Force on a slab in ``host`` at distance ``d`` from ``mirror``.

    ``f_s = (1/2pi^2) int dxi int dk k kappa1 sum_q r R e^{-2 kappa1 d} / (1 - r R e^{-2 kappa1 d})``
    with the exact finite-slab ``r`` built from the Clausius-Mossotti slab
    permittivity. The geometric-series denominator is kept unless
    ``linear_in_r``.
    """
    quad = quad or QuadratureSpec()
    host, mix = sys.host, sys.slab_mixture
    _, w_max = characteristic_frequencies([host], [mix.dopant])
    d = sys.d

    def f(xi, k):
        eps_h = host.eps(xi)
        delta = 4.0 * math.pi * mix.number_density * effective_polarizability(
            eps_h, mix.dopant.alpha(xi), mix.number_density, sys.cm_order
        )
        mu_s = host.mu(xi)
        k1 = np.sqrt(host.n2(xi) * xi * xi + k * k)
        decay = np.exp(-2.0 * k1 * d)
        total = 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ExpansionWarning)
            for q in (P, S):
                r = thin_slab_r(host, eps_h + delta, mu_s, q, xi, k, sys.thickness, delta_eps=delta).exact
                loop = r * sys.mirror(q, xi, k) * decay
                if np.any(np.abs(loop) >= 1.0):
                    raise ResonantDenominator("resonant denominator: |r R exp(-2 kappa d)| >= 1")
                total = total + (loop if linear_in_r else loop / (1.0 - loop))
        return k * k1 * total

    res = integrate_product_2d(f, (min(w_max, 1.0 / d), 0.5 / d), quad)
    _raise_or_flag(res, quad, "slab force")
    pref = 1.0 / (2.0 * math.pi**2)
    return ForceResult(pref * res.value, pref * res.err_est, res.n_evals, res.converged)


@dataclass
class ForceDecomposition:
    f_medium2: ForceResult
    f_distribution: ForceResult

    @property
    def total(self) -> float:
        return self.f_medium2.value + self.f_distribution.value


def force_decomposition(
    sys: DistributionSystem, d_a: float | None = None, quad: QuadratureSpec | None = None
) -> ForceDecomposition:
    """Split the force near the doped medium 2 into bare-interface and dopant parts.

    The dopant part is ``N_B`` times the force computed with the first-order
    density term of the mirror coefficients in place of ``R^q``.
    """
    quad = quad or QuadratureSpec()
    d_a = abs(sys.z_a) if d_a is None else d_a
    xi_scale, _ = _scales(sys, -d_a)
    host = sys.pair.medium1
    f2 = cp_atom_force(host, sys.atom_a, InterfaceMirror(sys.pair), d_a, quad, xi_scale=xi_scale)
    if sys.density_b == 0:
        return ForceDecomposition(f2, ForceResult(0.0))
    term = CompositeMirror(sys.pair, sys.atom_b, sys.density_b, mode="density_term")
    fb = cp_atom_force(host, sys.atom_a, term, d_a, quad, xi_scale=xi_scale)
    n = sys.density_b
    return ForceDecomposition(f2, ForceResult(n * fb.value, n * fb.abs_err, fb.n_evals, fb.converged))


def composite_remainder(sys: DistributionSystem, d_a: float | None = None, quad: QuadratureSpec | None = None) -> ForceResult:
    """Force from ``R_exact - r_12`` minus the first-order dopant force, as one integral."""
    quad = quad or QuadratureSpec()
    d_a = abs(sys.z_a) if d_a is None else d_a
    xi_scale, _ = _scales(sys, -d_a)
    delta = CompositeMirror(sys.pair, sys.atom_b, sys.density_b, mode="delta")
    term = CompositeMirror(sys.pair, sys.atom_b, sys.density_b, mode="density_term")
    n = sys.density_b

    def remainder(q, xi, k):
        return delta(q, xi, k) - n * term(q, xi, k)

    return cp_atom_force(sys.pair.medium1, sys.atom_a, remainder, d_a, quad, xi_scale=xi_scale)


@dataclass
class ConsistencyReport:
    z_a: float
    force_distribution: float
    gradient_fd: float
    gradient_integrand: float
    rel_discrepancy_fd: float
    rel_discrepancy_integrand: float
    threshold: float = 1e-4

    @property
    def max_discrepancy(self) -> float:
        return max(self.rel_discrepancy_fd, self.rel_discrepancy_integrand)

    @property
    def passed(self) -> bool:
        return self.max_discrepancy < self.threshold


def local_field_consistency(
    sys: DistributionSystem,
    quad: QuadratureSpec | None = None,
    step: float = 1e-3,
    threshold: float = 1e-4,
) -> ConsistencyReport:
    """Compare the dopant force from the composite mirror with ``-dU/dz_A``.

    ``U`` is the distribution potential with both polarizabilities replaced
    by their effective values. The derivative is taken by central
    differences (step ``step * |z_A|``) and by direct quadrature.
    """
    quad = quad or QuadratureSpec(rel_tol=1e-10)
    fb = force_decomposition(sys, quad=quad).f_distribution.value
    h = step * abs(sys.z_a)
    u_plus = cp_distribution_potential(sys.at(sys.z_a + h), quad, local_field=True).value
    u_minus = cp_distribution_potential(sys.at(sys.z_a - h), quad, local_field=True).value
    grad_fd = -(u_plus - u_minus) / (2.0 * h)
    grad_int = -cp_distribution_gradient(sys, quad, local_field=True).value
    scale = abs(fb) if fb != 0 else 1.0
    return ConsistencyReport(
        sys.z_a,
        fb,
        grad_fd,
        grad_int,
        abs(fb - grad_fd) / scale,
        abs(fb - grad_int) / scale,
        threshold,
    )
