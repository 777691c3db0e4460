"""valab: weakly continuous polytope valuations and their continuity limits.

Builds valuations from kernels on flag pairs (k-subspace, orthogonal line),
evaluates them on polytopes through exterior angles, and probes whether they
survive Hausdorff limits.  See the README for the experiment CLI.
"""

__version__ = "0.1.0"

from .geometry import (BulgeConstructionError, EmptyFeasibleRegionError,
                       GeometryError, Polytope, PolytopeSequence,
                       ProjectionError, UnboundedFeasibleRegionError,
                       ball_approximant, ball_family, ball_support_gap, box,
                       bulge_family, convex_hull, hausdorff_distance,
                       hrep_polytope, project_point, standard_simplex)
from .faces import (Face, NormalRegion, enumerate_faces, exterior_angle,
                    integrate_kernel_over_region, region_measure)
from .kernels import (CircleProfile, GrassFunction, Kernel, SphereForm,
                      calibrate_kappa, chform_kernel, check_kernel,
                      combine_forms, constant_kernel, kernel_from_spec,
                      lemma18_kernel, pullback, random_kernel,
                      random_sphere_form, restrict_kernel,
                      rotation_invariant_form, separable_kernel, smap)
from .valuation import (ProbeReport, ValuationResult, WeakContinuityReport,
                        continuity_probe, intrinsic_volume, klain_function,
                        phi, unit_cube_in, weak_continuity_scan)
from .transforms import (HarmonicSpectrum, NumericalFailure, SphereFunction,
                         cosine_multipliers, cosine_transform,
                         harmonic_project, range_diagnostic)
