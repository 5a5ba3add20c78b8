"""Exception hierarchy shared by the library and the command line"""
from ..utils.constants import EXIT_INPUT, EXIT_NONCONVERGENCE, EXIT_NUMERICAL


class HarmonicSwarmError(Exception):
    """Base class for every error raised by swarm_app"""
    exit_code = 1


# Invalid input (exit 2)

class InputError(HarmonicSwarmError):
    exit_code = EXIT_INPUT


class InvalidDimensionError(InputError):
    pass


class EmptyEnvironmentError(InputError):
    pass


class ConnectivityError(InputError):
    pass


class EnvironmentFormatError(InputError):
    """Malformed environment or shape overlay text"""


class ShapeMismatchError(InputError):
    pass


class NodalStartError(InputError):
    """Start cell sits on a nodal line of the requested harmonic"""


class ScenarioError(InputError):
    """Invalid scenario file or command-line combination"""


# Numerical failures (exit 3)

class NumericalError(HarmonicSwarmError):
    exit_code = EXIT_NUMERICAL


class ComplexSpectrumError(NumericalError):
    pass


class NonDiagonalizableError(NumericalError):
    pass


class DegenerateSpectrumError(NumericalError):
    pass


class DegenerateInputError(NumericalError):
    pass


class InfeasibleDesignError(NumericalError):
    """No polynomial of the requested order meets the box constraints"""


class AssemblyError(NumericalError):
    pass


class KernelExtractionError(NumericalError):
    pass


class IllConditionedError(NumericalError):
    pass


class DivergenceError(NumericalError):
    pass


class DissipationError(NumericalError):
    """Aggregated weights have lost the target harmonic entirely"""


# Non-convergence (exit 4)

class ConvergenceError(HarmonicSwarmError):
    exit_code = EXIT_NONCONVERGENCE


class NonConvergenceError(ConvergenceError):
    pass
