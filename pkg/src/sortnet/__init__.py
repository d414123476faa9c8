"""Uniform random sorting networks: sampling, limit objects and checks."""

__version__ = "0.1.0"

from .errors import DataError, DegenerateInputError, HorizonError, UsageError, WindowExitError
from .network import SortingNetwork, Trajectory, bubble_sort_network, global_trajectory, restrict, validate_network
from .sampler import RandomSource, sample_network, sample_networks, sample_swap_prefix
from .trajectories import SinePath, sine_fit, sine_deviations, max_heights, octagon_check, localization_span
from .measures import ArchTimeT, EmpiricalMeasure2D, permutation_measure, grid_discrepancy, support_hausdorff
from .embedding import GreatCircle, fit_great_circle
from .flux import ArcsineSpeedLaw, FluxPath, flux, minimize_flux
from .transform import ArcsinePlus, DiscreteMeasure1D, ratio_fn, transform_H
from .local import LocalWindow, local_window, count_W, count_Q, count_crossings, estimate_speed
from .geometry import PointConfig, geometric_network, sample_subnetwork
from .render import wiring_svg, render_wiring
