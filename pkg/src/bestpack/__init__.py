"""Riesz energy and best-packing on rectifiable and self-similar sets."""

from .asymptotics import C_inf, csd_root_limit, energy_sweep, packing_sweep, root_limit_fixed_N, zeta
from .cantor import ExactPacking, composition_delta, exact_delta, subsequence_oscillation
from .energy import Configuration, OptimizerOptions, minimize_energy, riesz_energy, riesz_gradient
from .equidist import Region, equidist_deviation, region_fraction
from .geometry import Circle, Cube, IFSSpec, Interval, SelfSimilar1D, Sphere2, distance_to_set, project, sample
from .minkowski import check_sandwich, content_estimate, minkowski_dimension_estimate, neighborhood_volume
from .packing import PackingOptions, best_packing, min_pairwise_distance

__version__ = "0.1.0"
