"""Quantum Josephson junction between two finite superconducting islands."""

from ._core import (
    BoseHubbardParams,
    BogoliubovCoeffs,
    CircuitParams,
    ConvergenceError,
    Curvature,
    MaterialProps,
    WindowPolicy,
    aluminum,
    band_sweep,
    bogoliubov,
    charge_susceptibility,
    cooper_pair_density,
    cpb_gap,
    cpb_susceptibility,
    dense_eigenvalues,
    dispersion_curvature,
    eigenvalues,
    expected_imbalance,
    ground_state,
    hamiltonian,
    is_degeneracy_point,
    load_materials,
    map_bose_hubbard,
    map_to_bose_hubbard,
    qubit_frequency,
    susceptibility_curvature,
    transmon_first_order,
    transmon_frequency,
    transmon_susceptibility,
    validity,
    wick,
)

__all__ = [name for name in dir() if not name.startswith("_")]
