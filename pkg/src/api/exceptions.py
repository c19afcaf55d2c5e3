class SimulationError(ValueError):
    """Base class for all errors raised by the simulator."""


class ConfigError(SimulationError):
    """Scenario configuration is invalid or cannot be realised."""


class DomainError(SimulationError):
    """An argument lies outside the domain of the model it is passed to."""


class Infeasible(SimulationError):
    """No solution satisfies the hard constraints (e.g. the energy budget)."""


class SingularSystem(SimulationError):
    """The DUE power system of a cluster is numerically singular."""


class ScaleError(SimulationError):
    """A brute-force oracle was asked for an instance beyond its size guard."""
