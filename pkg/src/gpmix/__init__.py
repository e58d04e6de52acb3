"""Generalized Pauli dynamical maps: mixtures, singular points, time-local rates and memory kernels."""
from .channel import (ChannelParams, CpReport, apply_channel, choi_matrix, choi_psd_check,
                      eigenvalues_to_probabilities, fujiwara_algoet_check, probabilities_to_eigenvalues)
from .generators import (RateProfile, RegularityVerdict, component_rate, k_block_rates, mixture_rates,
                         mixture_rates_simplified, propagate_timelocal, regularity_scan)
from .kernels import (EllFunction, Kernel, component_kernel_analytic, component_legitimacy, ell_from_lambda,
                      mixture_kernel_analytic, mixture_legitimacy, oscillation_condition, slot_kernel)
from .mixtures import (Cos, EigenFunction, Exp, ExpCos, MixtureSpec, SemigroupMix, SingularityReport, Table,
                       eval_lambda, eval_lambda_dot, find_singularities, invertibility_threshold,
                       k_block_eigenvalues, mixture_eigenvalues, parse_eigenfunction, parse_weights)
from .mub_core import (MubFamily, UnitaryFamily, build_mubs, build_unitaries, conjugation_map,
                       generator_block, unitary_family)
from .volterra import TimeGrid, Trajectory, compare_trajectories, convergence_order, solve_volterra

__version__ = "0.1.0"
