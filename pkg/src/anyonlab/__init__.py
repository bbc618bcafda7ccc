"""Two-anyon extended Hubbard model: spectra, topology and circuit analogues.

Modules
-------
model
    Hamiltonian on the two-particle plane, exchange symmetry, physical basis.
spectra
    Physical-sector eigenstates, localization metrics, doublon gap, sweeps.
topology
    Effective SSH couplings and the Zak phase of the doublon band.
circuit
    Synthesis of the equivalent electric network and SPICE export.
acsim
    Frequency-domain nodal analysis and resonance detection.
cli
    Command-line driver producing CSV/JSON/SVG/SPICE artifacts.
"""
from .errors import (
    AnyonLabError,
    NumericalError,
    ValidationError,
)
from .model import ModelParams, build_hamiltonian, exchange_operator, physical_basis
from .spectra import (
    StateClass,
    Thresholds,
    doublon_gap,
    find_transition,
    in_gap_states,
    physical_spectrum,
    theta_sweep,
)
from .topology import effective_ssh_couplings, zak_phase
from .circuit import synthesize_netlist, export_spice
from .acsim import assemble_admittance, impedance_spectra, verify_mapping

__version__ = "0.1.0"

__all__ = [
    "AnyonLabError",
    "NumericalError",
    "ValidationError",
    "ModelParams",
    "build_hamiltonian",
    "exchange_operator",
    "physical_basis",
    "StateClass",
    "Thresholds",
    "doublon_gap",
    "find_transition",
    "in_gap_states",
    "physical_spectrum",
    "theta_sweep",
    "effective_ssh_couplings",
    "zak_phase",
    "synthesize_netlist",
    "export_spice",
    "assemble_admittance",
    "impedance_spectra",
    "verify_mapping",
    "__version__",
]
