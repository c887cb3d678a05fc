"""Fluctuation-induced electromagnetic energies in atomic units.

Dispersion forces, radiative level shifts, and cavity-mediated couplings
for polarizable point systems, all driven by imaginary-frequency response
functions and zero-point mode sums.

Modules:
    core            units, physical constants, shared result containers
    quadrature      semi-infinite, interval, principal-value integration
                    and Matsubara summation with error estimates
    polarizability  Kramers-Heisenberg models built from transition data
    green           vacuum dyadic Green tensor on both frequency axes
    pairwise        two-body dispersion energies and their closed limits
    manybody        coupled-dipole free energies beyond pair additivity
    lamb            radiative shifts: cutoff-regulated, medium-induced,
                    and thermal corrections
    cavity          two-state atoms in a single mode, exact and
                    perturbative ground-state shifts
    cli             JSON-configured runs and parameter scans to CSV/JSON

Dipoles and polarizabilities are always atomic units; positions,
frequencies, and temperatures accept the unit conversions in core.
"""

__version__ = "0.1.0"
