"""siegelkit: numerics for quadratic Siegel disks of high-type rotation number.

Modules
-------
cfrac     rotation-number arithmetic: digit streams, Gauss orbits, Brjuno
          sums, the comparison-map characterization of linearizability
maps      the normalized quadratic family, coverings, model geometry
fatou     perturbed Fatou coordinates (column welding + first-passage)
renorm    sector returns and one near-parabolic renormalization step
curves    boundary curve towers, the canonical arc, convergence reports
linearize linearizing series and the independent Siegel boundary oracle
cli       command-line front end
"""

__version__ = "0.1.0"

from .cfrac import (BrjunoPartial, GaussOrbit, RotationNumber, Tail,
                    brjuno_sum, classify, convergents, gauss_step,
                    herman_status, s_lower, s_upper, tilde_height, yoccoz_r)
from .fatou import (FatouCoordinate, FatouGrid, LiftedMap, SectorSpec,
                    build_lift, fatou_coordinate, fatou_inverse,
                    measure_constants, sector_sets)
from .linearize import linearization_boundary
from .maps import QuadMap, exp_modified, in_domain_U, koebe_bounds, log_modified
from .renorm import RenormalizedMap, SectorReturn, find_kf, renormalize

__all__ = [
    "BrjunoPartial", "GaussOrbit", "RotationNumber", "Tail",
    "brjuno_sum", "classify", "convergents", "gauss_step", "herman_status",
    "s_lower", "s_upper", "tilde_height", "yoccoz_r",
    "FatouCoordinate", "FatouGrid", "LiftedMap", "SectorSpec",
    "build_lift", "fatou_coordinate", "fatou_inverse", "measure_constants",
    "sector_sets", "linearization_boundary",
    "QuadMap", "exp_modified", "in_domain_U", "koebe_bounds", "log_modified",
    "RenormalizedMap", "SectorReturn", "find_kf", "renormalize",
    "__version__",
]
