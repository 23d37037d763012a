"""Robust stability of cyclic feedback loops via Mobius-disk subsystem indices."""

from .criterion import (CounterexampleConstruction, GammaIntervalSet,
                        SingularityWitness, admissible_gamma_set, beta_values,
                        boundary_pairs, cyclic_matrix, destabilizing_subsystems,
                        dscale_fixed_point, dscale_map, geometric_mean,
                        inequality_holds, inequality_marginal,
                        inequality_values, interconnection_matrix, mu_cyclic,
                        pair_scale, scaled_cyclic, scaled_cyclic_spectrum,
                        singularity_witness, transformed_loop_matrix)
from .errors import (CoprimalityError, CycloStabError, DegenerateMobius,
                     DelayUnsupported, ImproperSystem, Infeasible,
                     MarginalCase, NonConvergence, NotHurwitz, PoleOnAxis,
                     PoleOnSpectrum, PointOnCurve, StabilityCheckFailed,
                     TransformPole, Unboundable, ZeroPolynomial)
from .indexing import (IndexResult, NyquistCurve, bounded_real_block,
                       disk_transform, disk_transform_grid, hinf_le_one,
                       hinf_norm, kyp_certificate, min_containing_gamma,
                       nyquist_sample, subsystem_index, winding_number)
from .mobius import (INF, GeneralizedDisk, MobiusParams, ScaledMobiusDisk,
                     disk_contains, inverse_map, is_inf, mobius_eval,
                     unit_disk_image)
from .systems import (DelaySystem, Interconnection, RationalSystem,
                      StateSpace, closed_loop_char_poly, closed_loop_stable,
                      freq_response, freq_response_grid, is_stable, poly_add,
                      poly_degree, poly_eval, poly_mul, poly_roots, poly_trim,
                      realize)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
