from .attractor import (
    AttractorMatrix,
    DesignMethod,
    KernelTable,
    PolynomialDesign,
    adaptive_epsilon,
    assemble_matrix,
    design_closed_form,
    design_first_order,
    design_optimized,
    design_polynomial,
    extract_kernels,
)
from .dynamics import ConvergenceCriterion, ProjectionMode, Trajectory, iterate, project_coefficient
from .env import (
    EnvKind,
    Environment,
    TransitionMatrix,
    build_chain,
    build_grid_chain,
    build_line_chain,
    load_environment,
    load_overlay,
)
from .harmonic_worker import HarmonicSwarmWorker, run_harmonics
from .pipeline import ReconstructionResult, reconstruct
from .shape import (
    HarmonicPlan,
    ReconstructionSettings,
    RescaleMode,
    TargetShape,
    decompose_shape,
    initial_weight,
    rescale,
    select_harmonics,
    superpose_and_threshold,
)
from .spectral import NormalizationMode, SpectralBasis, decompose, normalize
from .swarm import Proposal, SwarmConfig, SwarmMode, run_swarm, step_unweighted, step_weighted

__all__ = [
    'AttractorMatrix', 'DesignMethod', 'KernelTable', 'PolynomialDesign', 'adaptive_epsilon',
    'assemble_matrix', 'design_closed_form', 'design_first_order', 'design_optimized',
    'design_polynomial', 'extract_kernels',
    'ConvergenceCriterion', 'ProjectionMode', 'Trajectory', 'iterate', 'project_coefficient',
    'EnvKind', 'Environment', 'TransitionMatrix', 'build_chain', 'build_grid_chain',
    'build_line_chain', 'load_environment', 'load_overlay',
    'HarmonicSwarmWorker', 'run_harmonics',
    'ReconstructionResult', 'reconstruct',
    'HarmonicPlan', 'ReconstructionSettings', 'RescaleMode', 'TargetShape', 'decompose_shape',
    'initial_weight', 'rescale', 'select_harmonics', 'superpose_and_threshold',
    'NormalizationMode', 'SpectralBasis', 'decompose', 'normalize',
    'Proposal', 'SwarmConfig', 'SwarmMode', 'run_swarm', 'step_unweighted', 'step_weighted',
]
