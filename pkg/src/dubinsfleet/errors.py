"""Exception types shared across the package."""


class DubinsFleetError(Exception):
    """Base class for package errors."""


class ScenarioError(DubinsFleetError):
    """Scenario file or scenario construction is invalid."""


class InvalidTourError(DubinsFleetError):
    """An ATSP tour cannot be inverse-transformed (structure violation)."""


class InfeasibleError(DubinsFleetError):
    """No feasible solution exists or was found."""


class CapacityError(DubinsFleetError):
    """Instance exceeds an exact solver's size cap."""


class IncompleteSolutionError(DubinsFleetError):
    """A solution path never touches some task (upstream bug)."""
