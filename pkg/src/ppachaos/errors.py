"""Exception hierarchy shared across the package."""


class PpaChaosError(Exception):
    """Base class for every error raised by ppachaos."""


class DimensionMismatch(PpaChaosError, ValueError):
    pass


class InsufficientData(PpaChaosError, ValueError):
    pass


class RankDeficient(PpaChaosError, ValueError):
    pass


class NonOrthogonal(PpaChaosError, ValueError):
    pass


class OutOfSupport(PpaChaosError, ValueError):
    pass


class DegeneratePilot(PpaChaosError, ValueError):
    pass


class DimensionTooLarge(PpaChaosError, ValueError):
    pass


class NonNestedStacks(PpaChaosError, ValueError):
    pass


class NoImprovingDirection(PpaChaosError):
    pass


class AllWeightsDegenerate(PpaChaosError):
    """Every point was excluded from a Gauss-Newton step (flat smooth function)."""


class DegenerateDerivative(AllWeightsDegenerate):
    """Multivariate counterpart of :class:`AllWeightsDegenerate`."""


class DegenerateSample(PpaChaosError, ValueError):
    pass


class ZeroReference(PpaChaosError, ValueError):
    pass


class ConfigError(PpaChaosError, ValueError):
    pass


class DataFormatError(PpaChaosError, ValueError):
    pass
