"""Multi-dimensional mod-Gaussian convergence: cumulants, convex-distance bounds and sector tail asymptotics."""
from . import cumulants, depgraph, largedev, models, numeric_core, smoothing_distance, sphere_mesh

__version__ = "0.1.0"

__all__ = ["cumulants", "depgraph", "largedev", "models", "numeric_core", "smoothing_distance", "sphere_mesh"]
