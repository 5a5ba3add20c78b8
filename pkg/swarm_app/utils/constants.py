"""Application constants and configuration"""

# Line chain probabilities (column-stochastic, P[i, j] = move j -> i)
LINE_SELF_PROB = 0.2
LINE_STEP_PROB = 0.4
LINE_BOUNDARY_STEP_PROB = 0.8  # end cells move to their single neighbour

# 8-connected grid chain probabilities
GRID_SELF_PROB = 0.04
GRID_ORTHOGONAL_PROB = 0.14
GRID_DIAGONAL_PROB = 0.10

# Numerical tolerances
STOCHASTIC_TOL = 1e-12          # column sums of P
REALNESS_TOL = 1e-8             # max |imag| accepted from the eigen solver
EIGEN_RESIDUAL_TOL = 1e-8       # ||P pi - lambda pi|| per eigenpair
TIE_DECIMALS = 12               # rounding used when ordering eigenvalues
ASSEMBLY_TOL = 1e-6             # spectral check on assembled attractor matrices
KERNEL_MATCH_TOL = 1e-12        # relative, interior kernels vs generic kernel
DESIGN_CONSTRAINT_TOL = 1e-9    # box constraint slack accepted on LP solutions
LP_MARGIN = 1e-9                # LP box is tightened by this much
LP_FEASIBILITY_TOL = 1e-10
CONDITION_LIMIT = 1e10          # shape decomposition refuses worse bases
NODAL_TOL = 1e-9                # |pi_a[s]| below this is a nodal start cell
DIVERGENCE_FACTOR = 1e12        # ||v_t|| / ||v_0|| considered divergent
DENSIFY_FILL = 0.5              # sparse -> dense switch for attractor matrices
RESCALE_FLOOR = 1e-9
PROJECTION_FLOOR = 1e-12

# Design defaults
DEFAULT_DESIGN_METHOD = 'optimized'
DEFAULT_ORDER = 4
DEFAULT_BETA = 0.0
DEFAULT_EPSILON = 1e-2
AUTO_EPSILON = 'auto'

# Convergence defaults
DEFAULT_TOLERANCE = 1e-9
DEFAULT_WINDOW = 5
DEFAULT_MAX_STEPS = 100_000
# Exact swarm stand-ins square the attractor, a bound on t not on the number of products
EXACT_MAX_STEPS = 2 ** 40
# Particle runs are noisy, the normalized aggregate never settles to 1e-9
PARTICLE_TOLERANCE = 2e-2
PARTICLE_WINDOW = 10

# Swarm defaults
ROBOT_BLOCK = 65_536            # robots per random substream
DEFAULT_ROBOTS = 20_000
DEFAULT_STEPS = 500
DEFAULT_STRIDE = 50
DEFAULT_SEED = 0
DEFAULT_PROPOSAL = 'uniform'

# Shape pipeline defaults
DEFAULT_PERCENTILE = 0.25
DEFAULT_THRESHOLD_FRACTION = 0.5
DEFAULT_RESCALE = 'projection'

# Scenario modes
MODES = ['eigen', 'dynamics', 'swarm-unweighted', 'swarm-weighted', 'reconstruct']

# Figure presets (name, description, filename)
AVAILABLE_PRESETS = [
    ('fig1', 'Eigenpairs of the 5-cell line chain', 'fig1.ini'),
    ('fig2', 'Density evolution toward the steady state on 5 cells', 'fig2.ini'),
    ('fig3', 'Unweighted swarm spreading on 20 cells', 'fig3.ini'),
    ('fig3w', 'Weighted swarm under P on 20 cells', 'fig3w.ini'),
    ('fig4', 'Attractor dynamics toward harmonic 5 on 20 cells', 'fig4.ini'),
    ('fig4-swarm', 'Weighted swarm toward harmonic 5 on 20 cells', 'fig4_swarm.ini'),
    ('fig5', 'Annulus reconstruction on an open 10x12 grid', 'fig5.ini'),
    ('fig7', 'Arrow reconstruction among 25 obstacles', 'fig7.ini'),
]

# File format characters
ENV_FREE_CHAR = '.'
ENV_OBSTACLE_CHAR = '#'
SHAPE_TARGET_CHAR = 'X'

# ASCII render buckets on v / max|v| (threshold, char), checked top to bottom
RENDER_BUCKETS = [
    (0.5, '#'),
    (0.1, '+'),
    (-0.1, '.'),
    (-0.5, '-'),
]
RENDER_LOWEST_CHAR = '='
RENDER_OBSTACLE_CHAR = '@'

# 16-bit PGM output
PGM_MAX_VALUE = 65535
PGM_OBSTACLE_VALUE = 0
PGM_MID_GRAY = 32768

# CSV float formatting (round-trippable)
CSV_FLOAT_FORMAT = '%.17g'

# Exit codes
EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_NONCONVERGENCE = 4

# QSettings Keys
SETTINGS_MODE = 'scenario/mode'
SETTINGS_ENVIRONMENT = 'scenario/environment'
SETTINGS_HARMONIC = 'scenario/harmonic'
SETTINGS_DESIGN_METHOD = 'design/method'
SETTINGS_DESIGN_ORDER = 'design/order'
SETTINGS_DESIGN_BETA = 'design/beta'
SETTINGS_DESIGN_EPSILON = 'design/epsilon'
SETTINGS_ROBOTS = 'swarm/robots'
SETTINGS_SEED = 'swarm/seed'
SETTINGS_STEPS = 'swarm/steps'
SETTINGS_STRIDE = 'swarm/stride'
SETTINGS_START = 'swarm/start'
SETTINGS_PROPOSAL = 'swarm/proposal'
SETTINGS_PER_ROBOT_DUMP = 'swarm/per_robot_dump'
SETTINGS_TOLERANCE = 'dynamics/tolerance'
SETTINGS_WINDOW = 'dynamics/window'
SETTINGS_MAX_STEPS = 'dynamics/max_steps'
SETTINGS_SNAPSHOTS = 'dynamics/snapshots'
SETTINGS_SHAPE = 'shape/path'
SETTINGS_PERCENTILE = 'shape/percentile'
SETTINGS_COUNT = 'shape/count'
SETTINGS_THRESHOLD = 'shape/threshold'
SETTINGS_RESCALE = 'shape/rescale'
SETTINGS_OUTPUT_DIR = 'output/directory'
SETTINGS_PGM = 'output/pgm'
SETTINGS_THREADS = 'runtime/threads'
SETTINGS_ALLOW_PARTIAL = 'runtime/allow_partial'
SETTINGS_EXACT_DYNAMICS = 'runtime/exact_dynamics'
# Written to manifests only, ignored on load
SETTINGS_RUN_GROUP = 'run'

# Every key a scenario file may hold, in manifest order
SCENARIO_KEYS = [
    SETTINGS_MODE, SETTINGS_ENVIRONMENT, SETTINGS_HARMONIC,
    SETTINGS_DESIGN_METHOD, SETTINGS_DESIGN_ORDER, SETTINGS_DESIGN_BETA, SETTINGS_DESIGN_EPSILON,
    SETTINGS_ROBOTS, SETTINGS_SEED, SETTINGS_STEPS, SETTINGS_STRIDE, SETTINGS_START,
    SETTINGS_PROPOSAL, SETTINGS_PER_ROBOT_DUMP,
    SETTINGS_TOLERANCE, SETTINGS_WINDOW, SETTINGS_MAX_STEPS, SETTINGS_SNAPSHOTS,
    SETTINGS_SHAPE, SETTINGS_PERCENTILE, SETTINGS_COUNT, SETTINGS_THRESHOLD, SETTINGS_RESCALE,
    SETTINGS_OUTPUT_DIR, SETTINGS_PGM,
    SETTINGS_THREADS, SETTINGS_ALLOW_PARTIAL, SETTINGS_EXACT_DYNAMICS,
]
# Keys holding input paths, resolved against the file that names them
PATH_SETTINGS = [SETTINGS_ENVIRONMENT, SETTINGS_SHAPE]

# Default Values
DEFAULT_MODE = 'eigen'
DEFAULT_HARMONIC = 1
DEFAULT_OUTPUT_DIR = 'out'
DEFAULT_THREADS = 1
