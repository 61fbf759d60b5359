'''All custom exception types used by cvqdyn are defined in one place
here in this module.

Numerical failures share the :class:`NumericalFailureException` base so the
command line can map them onto a single exit code.

'''


class ValidationError(Exception):
    '''The exception that's raised when a scenario configuration is missing a
    field or carries a malformed value.

    ``error_dict`` maps each offending field to a list of messages.

    '''
    def __init__(self, error_dict):
        self.error_dict = error_dict
        super(ValidationError, self).__init__(self.error_summary)

    @property
    def error_summary(self):
        parts = []
        for field in sorted(self.error_dict):
            messages = self.error_dict[field]
            if isinstance(messages, str):
                messages = [messages]
            parts.append('{0}: {1}'.format(field, '; '.join(messages)))
        return ', '.join(parts)


class InvariantViolationException(Exception):
    '''The exception that's raised when a run re-checks one of its invariants
    (norm, energy, purity) and finds it broken.

    '''
    def __init__(self, check, detail=''):
        self.check = check
        message = check if not detail else '{0}: {1}'.format(check, detail)
        super(InvariantViolationException, self).__init__(message)


class NumericalFailureException(Exception):
    '''Base type for every failure of the numerical machinery.

    '''
    pass


class GridTooNarrowException(NumericalFailureException):
    '''The exception that's raised when a Gaussian's seven-sigma window does
    not fit inside the grid it is sampled on.

    '''
    pass


class NotNormalizedException(NumericalFailureException):
    '''The exception that's raised when moments are requested for a wave
    function whose norm is off by more than 1e-3.

    '''
    pass


class SingularFactorizationException(NumericalFailureException):
    '''The exception that's raised when the banded LU factorization of the
    implicit Cayley matrix hits a zero pivot.

    '''
    pass


class GridMismatchException(NumericalFailureException):
    '''The exception that's raised when a wave function is stepped with a
    system built for a different grid.

    '''
    pass


class TailTruncationException(NumericalFailureException):
    '''The exception that's raised when moving a wave packet onto a new grid
    would throw away more than 1e-6 of its probability.

    '''
    pass


class NotSeparableException(NumericalFailureException):
    '''The exception that's raised when two LAB Gaussians do not satisfy
    m_A sigma_A**2 == m_B sigma_B**2, so the COM and relative motions are
    not a product state.

    '''
    pass


class SupportClippedException(NumericalFailureException):
    '''The exception that's raised when a two-body assembly loses more than
    1e-4 of its norm outside the 2-D window.

    '''
    pass


class ProximityViolatedException(NumericalFailureException):
    '''The exception that's raised when a Casimir interaction is asked for
    spheres that touch or overlap (L <= 2 R0).

    '''
    pass


class TrapUnstableException(NumericalFailureException):
    '''The exception that's raised when the coupling frequency reaches the
    trap frequency and the relative mode is no longer confined.

    '''
    pass


class NonPhysicalException(NumericalFailureException):
    '''The exception that's raised when a covariance matrix violates the
    uncertainty principle or has no real symplectic spectrum.

    '''
    pass


class DomainErrorException(NumericalFailureException):
    '''The exception that's raised when a closed form is evaluated outside
    the range where its logarithm is defined.

    '''
    pass


class SingularCovarianceException(NumericalFailureException):
    '''The exception that's raised when a covariance matrix can not be
    inverted for a Wigner function.

    '''
    pass


class RankExhaustedException(NumericalFailureException):
    '''The exception that's raised when even the full Schmidt spectrum
    misses the norm budget.

    '''
    pass


class ZeroMomentumCrossingException(NumericalFailureException):
    '''The exception that's raised when the mean momentum passes too close
    to zero for the momentum witness ratio to be formed.

    '''
    pass


class RootBracketFailureException(NumericalFailureException):
    '''The exception that's raised when the classical trajectory equation has
    no root inside its bracket.

    '''
    pass


class AboveBarrierException(NumericalFailureException):
    '''The exception that's raised when a WKB estimate is requested for an
    energy at or above the barrier top.

    '''
    pass


class NotConvergedException(NumericalFailureException):
    '''The exception that's raised when a dynamical run exhausts its step
    budget before its stopping criterion is met.

    '''
    pass
