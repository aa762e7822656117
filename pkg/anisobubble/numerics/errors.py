class AnisobubbleError(Exception):
    code = 'anisobubble-error'

    def __init__(self, message=None, **details):
        self.details = details
        super().__init__(message or self.code)

    def to_dict(self):
        return dict(
            code=self.code,
            details=self.details,
            message=str(self),
        )


class NumericalError(AnisobubbleError, RuntimeError):
    code = 'numerical-error'


class DomainError(AnisobubbleError, ValueError):
    code = 'domain-error'


class DerivativeAtOriginError(DomainError):
    code = 'derivative-at-origin'


class JacobianAtOriginError(DomainError):
    code = 'jacobian-at-origin'


class NotUniformlyConvexError(DomainError):
    code = 'not-uniformly-convex'


class UnsupportedRuleError(DomainError):
    code = 'unsupported-rule'


class ZeroMassError(DomainError):
    code = 'zero-mass'


class ConfigError(DomainError):
    code = 'config-error'

    def __init__(self, path, message):
        self.path = path
        super().__init__(f'{path}: {message}', path=path)


class DualConvergenceError(NumericalError):
    code = 'dual-convergence'


class NonFiniteIntegrandError(NumericalError):
    code = 'non-finite-integrand'

    def __init__(self, index, value=None):
        self.index = int(index)
        super().__init__(
            f'Integrand is not finite at node {self.index}: {value}',
            index=self.index,
        )


class TailDivergenceError(NumericalError):
    code = 'tail-divergence'


class CriticalSetTooLargeError(NumericalError):
    code = 'critical-set-too-large'

    def __init__(self, fraction, threshold):
        self.fraction = float(fraction)
        super().__init__(
            f'{self.fraction:.3%} of the nodes lie in the critical set (limit {threshold:.0%})',
            fraction=self.fraction,
        )
