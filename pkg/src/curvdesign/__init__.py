"""Free-form design of triangulated surfaces with prescribed Gaussian curvature.

Stage 1 optimises a circle packing (log-radii) so that the induced metric
hits target curvatures and fixed edge lengths; stage 2 finds vertex positions
realising that metric.
"""
from .embed_opt import EmbedProblem, solve_embedding, stage2_objective
from .errors import *  # noqa: F401,F403
from .intrinsic import (
    corner_angles,
    gauss_bonnet_defect,
    gaussian_curvatures,
    metric_from_embedding,
)
from .mesh import Mesh, build_mesh, euler_characteristic, load_obj, save_obj
from .meshgen import DomeSpec, generate_hex_dome, generate_square_dome, radial_quadratic_targets
from .metric_opt import MetricProblem, modified_ricci_energy, solve_metric, stage1_objective
from .optim import SolveReport, SolverConfig, minimize
from .packing import (
    conformal_structure_from,
    curvature_jacobian,
    init_radii,
    metric_from_packing,
)
from .pipeline import RunConfig, run_pipeline
from .report import RunMetrics, evaluate, export_distributions

__version__ = "0.1.0"
