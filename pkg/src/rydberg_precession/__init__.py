"""SO(4) coherent states on Kepler ellipses and their relativistic precession.

Builds shell-confined coherent states localized on classical ellipses,
evolves them under the first-order special-relativistic kinetic-energy
correction, and extracts the precession of the Laplace-Runge-Lenz
vector for comparison with the classical prediction.
"""

from .amath import (
    CoherentCoeffVector,
    HalfInt,
    LogFactorialTable,
    clebsch_gordan,
    clebsch_gordan_sector,
    log_factorial,
    so3_coherent_coeffs,
)
from .coherent import (
    CoherentParams,
    CoupledState,
    ObservableReport,
    ProductState,
    build_product_state,
    dephasing_phi_eps,
    dephasing_phi_eta,
    eccentricity_of_eta,
    effective_l,
    l_variance_closed_form,
    observables,
    to_coupled,
    to_product,
)
from .dynamics import (
    EvolutionSpec,
    PrecessionTrace,
    TimeSpec,
    evolve,
    overlap,
    precession_angle,
    rotate_about_z,
    trace_precession,
)
from .errors import ContractError, DomainError, OrientationError
from .hydrogenic import (
    DEFAULT_CONSTANTS,
    PhysicalConstants,
    SemiclassicalReport,
    ShellSpec,
    dephasing_test_l,
    dephasing_test_n,
    energy0,
    energy1,
    mean_radius,
    precession_rate_classical_gravity,
    precession_rate_sr,
    radial_wavefunction,
    semiclassical_report,
    sph_harm,
    sph_harm_equatorial,
    t_classical,
    t_precession,
)
from .render import (
    DensityGrid,
    EllipseOverlay,
    classical_overlay,
    density_grid,
    principal_axis,
    read_grid,
    write_grid,
    write_overlay,
)

__version__ = "0.1.0"
