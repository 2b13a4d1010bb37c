"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A caller-supplied parameter violates a documented precondition."""


class DegenerateNormError(ValueError):
    """The norm is numerically degenerate (min on the unit sphere ~ 0)."""


class NotStrictlyConvexError(RuntimeError):
    """Dual maximization found two distinct maximizers beyond tolerance."""


class RadialBracketError(RuntimeError):
    """Radial monotonicity violated: no sign change in the root bracket."""


class ConservationBreachError(RuntimeError):
    """Conserved quantity drifted beyond tolerance during integration."""


class GroupInvariantError(RuntimeError):
    """A group element left its matrix representation's admissible set."""


class ConfigError(ValueError):
    """Experiment configuration file is malformed or inconsistent."""
