class BoussinesqError(Exception):
    """Base class for errors raised by the simulator"""
    exit_code = 1


class ConfigError(BoussinesqError):
    """Invalid run configuration or datum specification"""
    exit_code = 2


class NotDivergenceFree(BoussinesqError):
    """Initial velocity is not divergence free"""
    exit_code = 2


class UnresolvableBump(BoussinesqError):
    """Bump radius is below two grid cells"""
    exit_code = 2


class ZeroField(BoussinesqError):
    """A zero field cannot be rescaled to a nonzero norm"""
    exit_code = 2


class DegenerateDirection(BoussinesqError):
    """Probe direction has (numerically) vanishing derivative at the probe point"""
    exit_code = 2


class SolverError(BoussinesqError):
    """Base class for failures inside the time integration"""
    exit_code = 3


class SymmetryViolation(SolverError):
    """Fourier coefficients do not represent a real field"""


class DegenerateDiffeo(SolverError):
    """det(d phi) <= 0 somewhere on the grid"""


class NoConvergence(SolverError):
    """Fixed-point inversion of a diffeomorphism did not converge"""


class BlowupDetected(SolverError):
    """The flow left the contraction regime or the phase space"""


class CFLViolation(BlowupDetected):
    """max|v| * dt exceeds the allowed fraction of the grid spacing"""


class PropertyFailure(BoussinesqError):
    """A measured property did not meet its tolerance"""
    exit_code = 4


class StorageError(BoussinesqError):
    """Reading or writing run artifacts failed"""
    exit_code = 5
