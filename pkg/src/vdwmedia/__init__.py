"""Dispersion interactions of atoms across a planar magnetodielectric interface.

Reduced units throughout: ``hbar = c = 1``, frequencies in a reference
frequency ``omega_ref`` and lengths in ``c / omega_ref``. All response
functions are evaluated at imaginary frequency ``i xi``.
"""

__version__ = "0.1.0"

from .materials import (  # noqa: E402
    VACUUM,
    AtomModel,
    MaterialModel,
    MixtureSpec,
    OscillatorTerm,
    effective_polarizability,
)
from .planar_optics import (  # noqa: E402
    CompositeMirror,
    HalfSpacePair,
    InterfaceMirror,
    PerfectMirror,
    Polarization,
)
from .greens import AtomPositions  # noqa: E402
from .quadrature import QuadratureSpec  # noqa: E402
from .vdw import InterfaceSystem, vdw_full, vdw_nonretarded, vdw_retarded  # noqa: E402
from .casimir_polder import (  # noqa: E402
    DistributionSystem,
    SlabSystem,
    cp_atom_force,
    cp_distribution_potential,
    local_field_consistency,
    slab_force,
)

__all__ = [
    "__version__",
    "VACUUM",
    "AtomModel",
    "MaterialModel",
    "MixtureSpec",
    "OscillatorTerm",
    "effective_polarizability",
    "CompositeMirror",
    "HalfSpacePair",
    "InterfaceMirror",
    "PerfectMirror",
    "Polarization",
    "AtomPositions",
    "QuadratureSpec",
    "InterfaceSystem",
    "vdw_full",
    "vdw_nonretarded",
    "vdw_retarded",
    "DistributionSystem",
    "SlabSystem",
    "cp_atom_force",
    "cp_distribution_potential",
    "local_field_consistency",
    "slab_force",
]
