"""Example models: lattice walks, circle and sphere walks, CUE, Erdos-Renyi counts, Markov chains."""
from .circle import CircleWalkModel, circle_density, circle_density_fourier, circle_fourier_coeff, circle_walk_sample
from .cue import cue_laplace_exact, cue_logdet_sample, haar_unitary
from .erdos_renyi import ErdosRenyiModel, Motif, er_cov_leading, er_subgraph_counts, projection, projection_residual
from .lattice import LatticeWalkModel, lattice_walk_sample, lattice_walk_trajectory
from .markov import MarkovModel, markov_empirical, markov_exact_cov, markov_K, markov_third_tensor, theta_P
from .sphere import SphereWalkModel, sphere_heat_density, sphere_walk_sample

__all__ = [
    "CircleWalkModel", "circle_density", "circle_density_fourier", "circle_fourier_coeff", "circle_walk_sample",
    "cue_laplace_exact", "cue_logdet_sample", "haar_unitary",
    "ErdosRenyiModel", "Motif", "er_cov_leading", "er_subgraph_counts", "projection", "projection_residual",
    "LatticeWalkModel", "lattice_walk_sample", "lattice_walk_trajectory",
    "MarkovModel", "markov_empirical", "markov_exact_cov", "markov_K", "markov_third_tensor", "theta_P",
    "SphereWalkModel", "sphere_heat_density", "sphere_walk_sample",
]
