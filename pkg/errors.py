class SolverError(Exception):
    """Base class for everything the solvers raise on purpose."""


class ConfigError(SolverError, ValueError):
    pass


class DimensionError(SolverError, ValueError):
    pass


class NonFiniteError(SolverError, ValueError):
    pass


class SingularSystemError(SolverError):
    """A pivot fell below the singularity threshold while factoring."""


class InnerDivergenceError(SolverError):
    def __init__(self, message, iterations):
        super().__init__(message)
        self.iterations = iterations


class AllCandidatesFailedError(SolverError):
    pass
