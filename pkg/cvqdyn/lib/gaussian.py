'''Exact Gaussian-regime machinery for two identical particles.

Closed forms for the relative mode and the 4x4 covariance matrix over
u = (x_A, p_A, x_B, p_B), its two-mode symplectic invariants, logarithmic
negativity, entanglement entropy, thermal scaling and the two-mode Wigner
function.

Conventions
-----------
``omega`` is the coupling frequency of the quadratic interaction (see
:func:`cvqdyn.lib.potentials.omega_squared`), ``omega0`` = hbar/(2 m sigma**2)
the spreading (or trap) frequency of each particle and ``mass`` the mass of
one particle.  Attractive couplings give hyperbolic closed forms; repulsive
ones follow from omega -> i omega and come out trigonometric.

'''
import dataclasses
import logging

import numpy as np
import scipy.constants as sc
from scipy.special import xlogy
from scipy.stats import norm

import cvqdyn.exceptions as exceptions
from cvqdyn.lib.units import CONSTANTS

log = logging.getLogger(__name__)

LN2 = np.log(2.0)
PHYSICAL_RTOL = 1e-9
DISCRIMINANT_RTOL = 1e-10
EIGENVALUE_FLOOR = 1e-30


@dataclasses.dataclass
class RelativeMoments(object):
    mean_r: float
    mean_p: float
    var_r: float
    var_p: float
    cov_rp: float
    time: float = 0.0

    @classmethod
    def from_moment_set(cls, moment_set, time=0.0):
        return cls(moment_set.mean_x, moment_set.mean_p, moment_set.var_x,
                   moment_set.var_p, moment_set.cov_xp, time)


def relative_variances(t, omega, omega0, sigma, hbar=1.0):
    '''Centered second moments of the relative mode under an attractive
    quadratic coupling.

    ``omega`` may be complex; omega -> i W gives the trigonometric forms.

    :returns: ``(var_r, var_p, cov_rp)``

    '''
    c = np.cosh(omega * t)
    s = np.sinh(omega * t)
    var_r = 2.0 * sigma ** 2 * (c ** 2 + (omega0 / omega) ** 2 * s ** 2)
    var_p = hbar ** 2 / (8.0 * sigma ** 2) * (c ** 2 + (omega / omega0) ** 2 * s ** 2)
    cov_rp = 0.5 * hbar * (omega0 / omega + omega / omega0) * s * c
    return var_r, var_p, cov_rp


def relative_moments_freefall(t, omega, sigma, p0, separation, mass, hbar=1.0):
    '''Moments of the relative mode for two free particles coupled by the
    quadratic truncation of an attraction.

    Particle A starts with momentum +p0 and B with -p0, so the relative
    momentum starts at -p0.  The centered moments do not depend on p0 or L.

    '''
    omega0 = hbar / (2.0 * mass * sigma ** 2)
    c = np.cosh(omega * t)
    s = np.sinh(omega * t)
    var_r, var_p, cov_rp = relative_variances(t, omega, omega0, sigma, hbar)
    return RelativeMoments(
        mean_r=0.5 * separation * (1.0 - c) - 2.0 * p0 / (mass * omega) * s,
        mean_p=-p0 * c - 0.25 * mass * omega * separation * s,
        var_r=var_r,
        var_p=var_p,
        cov_rp=cov_rp,
        time=t,
    )


def relative_second_moments_freefall(t, omega, sigma, p0, separation, mass,
                                     hbar=1.0):
    '''Raw second moments <r^2>, <p^2> and <rp + pr> of the relative mode.'''
    L = separation
    wt = omega * t
    c = np.cosh(wt)
    s = np.sinh(wt)
    base = p0 ** 2 + hbar ** 2 / (8.0 * sigma ** 2)
    r2 = (2.0 * sigma ** 2 * (1.0 + s ** 2) +
          L ** 2 / 8.0 * (3.0 + np.cosh(2.0 * wt) - 4.0 * c) +
          L * p0 / (mass * omega) * (np.sinh(2.0 * wt) - 2.0 * s) +
          4.0 / (mass * omega) ** 2 * base * s ** 2)
    p2 = (base * (1.0 + s ** 2) +
          0.25 * mass * omega * L * p0 * np.sinh(2.0 * wt) +
          0.25 * (mass * omega) ** 2 * (2.0 * sigma ** 2 + 0.25 * L ** 2) * s ** 2)
    rp = (L * p0 * (np.cosh(2.0 * wt) - c) +
          mass * omega * L ** 2 / 8.0 * (np.sinh(2.0 * wt) - 2.0 * s) +
          2.0 / (mass * omega) *
          (base + 0.5 * (mass * omega * sigma) ** 2) * np.sinh(2.0 * wt))
    return r2, p2, rp


def relative_moments_trapped(t, omega, omega0, sigma, hbar=1.0):
    '''Relative mode of two particles released from their trap ground
    states while the traps stay on; needs omega < omega0.

    '''
    w = _trapped_frequency(omega, omega0)
    s = np.sin(w * t)
    return RelativeMoments(
        mean_r=0.0,
        mean_p=0.0,
        var_r=2.0 * sigma ** 2 * (1.0 + (omega / w) ** 2 * s ** 2),
        var_p=hbar ** 2 / (8.0 * sigma ** 2) * (1.0 - (omega / omega0) ** 2 * s ** 2),
        cov_rp=0.25 * hbar * omega ** 2 / (omega0 * w) * np.sin(2.0 * w * t),
        time=t,
    )


class CovarianceMatrix(object):
    '''Symmetrized second moments over (x_A, p_A, x_B, p_B).

    ``alpha`` and ``beta`` are the single-particle blocks and ``gamma`` the
    correlations between them.

    '''
    def __init__(self, matrix, hbar=1.0):
        matrix = np.array(matrix, dtype=float)
        if matrix.shape != (4, 4):
            raise ValueError('covariance matrix must be 4x4')
        scale = np.max(np.abs(matrix)) or 1.0
        if np.max(np.abs(matrix - matrix.T)) > 1e-12 * scale:
            raise ValueError('covariance matrix must be symmetric')
        self.matrix = 0.5 * (matrix + matrix.T)
        self.hbar = hbar

    def __repr__(self):
        return 'CovarianceMatrix({0!r})'.format(self.matrix.tolist())

    @classmethod
    def from_entries(cls, s00, s01, s02, s03, s11, s13, hbar=1.0):
        '''Identical-particle matrix from its six independent entries
        (s22 = s00, s33 = s11, s23 = s01, s12 = s03).

        '''
        return cls([[s00, s01, s02, s03],
                    [s01, s11, s03, s13],
                    [s02, s03, s00, s01],
                    [s03, s13, s01, s11]], hbar)

    @property
    def alpha(self):
        return self.matrix[:2, :2]

    @property
    def beta(self):
        return self.matrix[2:, 2:]

    @property
    def gamma(self):
        return self.matrix[:2, 2:]

    def determinant(self):
        # normalize by the diagonal first; SI entries span many decades
        d = np.sqrt(np.abs(np.diag(self.matrix)))
        return np.linalg.det(self.matrix / np.outer(d, d)) * np.prod(d) ** 2

    def scaled(self, factor):
        return CovarianceMatrix(factor * self.matrix, self.hbar)

    def allclose(self, other, rtol=1e-10, atol=0.0):
        return np.allclose(self.matrix, other.matrix, rtol=rtol, atol=atol)


def assemble_covariance(com, rel, hbar=1.0):
    '''Covariance matrix of two identical particles from COM and relative
    moments.

    ``com`` is a :class:`cvqdyn.lib.core.MomentSet` for (R, P); ``rel`` a
    :class:`RelativeMoments` (or a MomentSet) for (r, p).

    '''
    if not isinstance(rel, RelativeMoments):
        rel = RelativeMoments.from_moment_set(rel)
    return CovarianceMatrix.from_entries(
        s00=com.var_x + 0.25 * rel.var_r,
        s01=0.5 * com.cov_xp + 0.5 * rel.cov_rp,
        s02=com.var_x - 0.25 * rel.var_r,
        s03=0.5 * com.cov_xp - 0.5 * rel.cov_rp,
        s11=0.25 * com.var_p + rel.var_p,
        s13=0.25 * com.var_p - rel.var_p,
        hbar=hbar)


def covariance_freefall(t, omega, omega0, mass, hbar=1.0):
    '''Exact covariance matrix of two free particles under an attractive
    quadratic coupling, starting from a product of ground-state Gaussians.

    '''
    x = hbar / (4.0 * mass * omega0)
    k = mass * hbar * omega0 / 4.0
    s2 = np.sinh(omega * t) ** 2
    sh2 = np.sinh(2.0 * omega * t)
    y2 = (omega0 * t) ** 2
    shape_x = (1.0 + (omega0 / omega) ** 2) * s2
    shape_p = (1.0 + (omega / omega0) ** 2) * s2
    cross = (omega0 / omega + omega / omega0) * sh2
    return CovarianceMatrix.from_entries(
        s00=x * (2.0 + y2 + shape_x),
        s01=hbar / 8.0 * (2.0 * omega0 * t + cross),
        s02=x * (y2 - shape_x),
        s03=hbar / 8.0 * (2.0 * omega0 * t - cross),
        s11=k * (2.0 + shape_p),
        s13=-k * shape_p,
        hbar=hbar)


def covariance_repulsive(t, omega, omega0, mass, time_averaged=False,
                         hbar=1.0):
    '''Covariance matrix for a repulsive quadratic coupling (Coulomb).

    With ``time_averaged`` the fast oscillation is averaged out:
    sin**2 -> 1/2 and sin(2 omega t) -> 0.

    '''
    x = hbar / (4.0 * mass * omega0)
    k = mass * hbar * omega0 / 4.0
    if time_averaged:
        s2, s2w = 0.5, 0.0
    else:
        s2 = np.sin(omega * t) ** 2
        s2w = np.sin(2.0 * omega * t)
    y2 = (omega0 * t) ** 2
    shape_x = (1.0 - (omega0 / omega) ** 2) * s2
    shape_p = (1.0 - (omega / omega0) ** 2) * s2
    cross = (omega0 / omega - omega / omega0) * s2w
    return CovarianceMatrix.from_entries(
        s00=x * (2.0 + y2 - shape_x),
        s01=hbar / 8.0 * (2.0 * omega0 * t + cross),
        s02=x * (y2 + shape_x),
        s03=hbar / 8.0 * (2.0 * omega0 * t - cross),
        s11=k * (2.0 - shape_p),
        s13=k * shape_p,
        hbar=hbar)


def _trapped_frequency(omega, omega0):
    if omega >= omega0:
        raise exceptions.TrapUnstableException(
            'coupling frequency {0:g} reaches the trap frequency {1:g}'.format(
                omega, omega0))
    return np.sqrt(omega0 ** 2 - omega ** 2)


def covariance_trapped(t, omega, omega0, mass, hbar=1.0):
    '''Covariance matrix of two attracting particles kept in their traps.

    :raises cvqdyn.exceptions.TrapUnstableException: if omega >= omega0

    '''
    w = _trapped_frequency(omega, omega0)
    s2 = np.sin(w * t) ** 2
    ratio = (omega / w) ** 2
    s01 = hbar * omega ** 2 / (8.0 * omega0 * w) * np.sin(2.0 * w * t)
    return CovarianceMatrix.from_entries(
        s00=hbar / (4.0 * mass * omega0) * (2.0 + ratio * s2),
        s01=s01,
        s02=-hbar / (4.0 * mass * omega0) * ratio * s2,
        s03=-s01,
        s11=mass * hbar * omega0 / 4.0 * (2.0 - (omega / omega0) ** 2 * s2),
        s13=mass * hbar * omega ** 2 / (4.0 * omega0) * s2,
        hbar=hbar)


def trapped_period(omega, omega0):
    '''Period of the trapped covariance matrix, pi / sqrt(omega0**2 - omega**2).'''
    return np.pi / _trapped_frequency(omega, omega0)


def trapped_peak_time(omega, omega0):
    '''First time of maximal entanglement in the traps.'''
    return 0.5 * trapped_period(omega, omega0)


def _trapped_excess(t, omega, omega0):
    w = _trapped_frequency(omega, omega0)
    return omega ** 4 * np.sin(w * t) ** 2 / (4.0 * omega0 ** 2 * w ** 2)


def trapped_negativity(t, omega, omega0):
    e = _trapped_excess(t, omega, omega0)
    return -0.5 * np.log2(1.0 + 2.0 * e - 2.0 * np.sqrt(e ** 2 + e))


def trapped_entropy(t, omega, omega0):
    e = _trapped_excess(t, omega, omega0)
    return entropy_function(0.5 * np.sqrt(1.0 + e))


def approximate_negativity(t, omega, omega0):
    '''Negativity for omega << omega0 and omega t << 1, with
    Omega**3 = omega0 omega**2 / 6.

    '''
    z = omega0 * omega ** 2 / 6.0 * np.asarray(t) ** 3
    return -np.log2(np.sqrt(1.0 + 2.0 * z ** 2 - 2.0 * z * np.sqrt(1.0 + z ** 2)))


def _balanced(cm):
    '''Dimensionless matrix with each mode rescaled to equal x and p
    variances; a local symplectic map, so the invariants are unchanged.

    '''
    m = cm.matrix / cm.hbar
    lam_a = (m[1, 1] / m[0, 0]) ** 0.25
    lam_b = (m[3, 3] / m[2, 2]) ** 0.25
    d = np.array([lam_a, 1.0 / lam_a, lam_b, 1.0 / lam_b])
    return m * np.outer(d, d)


def _det2(block):
    return block[0, 0] * block[1, 1] - block[0, 1] * block[1, 0]


def symplectic_eigs(cm, partial_transpose=False):
    '''The two symplectic eigenvalues (nu_minus, nu_plus) of ``cm``.

    With ``partial_transpose`` they belong to the partially transposed
    state, whose invariant flips the sign of Det(gamma).

    :raises cvqdyn.exceptions.NonPhysicalException: if the invariants admit
        no real spectrum

    '''
    if np.any(np.diag(cm.matrix) <= 0):
        raise exceptions.NonPhysicalException('non-positive variance on the diagonal')
    m = _balanced(cm)
    sign = -1.0 if partial_transpose else 1.0
    total = _det2(m[:2, :2]) + _det2(m[2:, 2:]) + sign * 2.0 * _det2(m[:2, 2:])
    det = np.linalg.det(m)
    disc = total ** 2 - 4.0 * det
    if disc < 0:
        if disc < -DISCRIMINANT_RTOL * total ** 2:
            raise exceptions.NonPhysicalException(
                'negative discriminant {0:.3g}'.format(disc))
        disc = 0.0
    root = np.sqrt(disc)
    lower = 0.5 * (total - root)
    if lower < 0:
        if lower < -DISCRIMINANT_RTOL * abs(total):
            raise exceptions.NonPhysicalException(
                'negative squared symplectic eigenvalue')
        lower = 0.0
    nu_minus = np.sqrt(lower) * cm.hbar
    nu_plus = np.sqrt(0.5 * (total + root)) * cm.hbar
    return nu_minus, nu_plus


def check_physical(cm, rtol=PHYSICAL_RTOL):
    '''Raise unless ``cm`` respects the uncertainty principle.

    Both symplectic eigenvalues reach hbar/2 exactly when
    (nu_-^2 - 1/4)(nu_+^2 - 1/4) >= 0 and nu_-^2 + nu_+^2 >= 1/2 in units
    of hbar.

    '''
    if np.any(np.diag(cm.matrix) <= 0):
        raise exceptions.NonPhysicalException('non-positive variance on the diagonal')
    m = _balanced(cm)
    if np.any(np.linalg.eigvalsh(m) <= 0):
        raise exceptions.NonPhysicalException('covariance is not positive definite')
    total = _det2(m[:2, :2]) + _det2(m[2:, 2:]) + 2.0 * _det2(m[:2, 2:])
    slack = np.linalg.det(m) - 0.25 * total + 1.0 / 16.0
    if total < 0.5 * (1.0 - rtol) or slack < -rtol * total ** 2:
        raise exceptions.NonPhysicalException(
            'symplectic eigenvalues {0} below hbar/2'.format(
                symplectic_eigs(cm)))


def log_negativity(cm):
    nu, _ = symplectic_eigs(cm, partial_transpose=True)
    nu = max(nu, EIGENVALUE_FLOOR * cm.hbar)
    return max(0.0, -np.log2(2.0 * nu / cm.hbar))


def entropy_function(x):
    '''f(x) = (x + 1/2) log2(x + 1/2) - (x - 1/2) log2(x - 1/2), f(1/2) = 0.'''
    x = np.maximum(np.asarray(x, dtype=float), 0.5)
    upper = x + 0.5
    lower = x - 0.5
    return (xlogy(upper, upper) - xlogy(lower, lower)) / LN2


def entropy_from_covariance(cm):
    x = np.sqrt(max(_det2(cm.alpha), 0.0)) / cm.hbar
    return float(entropy_function(x))


def freefall_entanglement(times, omega, omega0, mass, hbar=1.0):
    '''Closed-form negativity and entropy along a time grid.'''
    times = np.asarray(times, dtype=float)
    negativity = np.empty_like(times)
    entropy = np.empty_like(times)
    for i, t in enumerate(times):
        cm = covariance_freefall(t, omega, omega0, mass, hbar)
        negativity[i] = log_negativity(cm)
        entropy[i] = entropy_from_covariance(cm)
    return negativity, entropy


def phonon_number(temperature, omega0, hbar=sc.hbar,
                  boltzmann=CONSTANTS.boltzmann_kB):
    if temperature <= 0:
        return 0.0
    return 1.0 / np.expm1(hbar * omega0 / (boltzmann * temperature))


@dataclasses.dataclass(frozen=True)
class ThermalSpec(object):
    temperature: float
    omega0: float
    hbar: float = sc.hbar
    boltzmann: float = CONSTANTS.boltzmann_kB

    @property
    def nbar(self):
        return phonon_number(self.temperature, self.omega0, self.hbar,
                             self.boltzmann)


def thermal_scale(cm, spec):
    '''Thermal covariance matrix, (2 nbar + 1) times the ground-state one.

    ``spec`` is a :class:`ThermalSpec` or a phonon number.

    '''
    nbar = spec.nbar if isinstance(spec, ThermalSpec) else float(spec)
    if nbar < 0:
        raise ValueError('phonon number must be non-negative')
    return cm.scaled(2.0 * nbar + 1.0)


def thermal_negativity(negativity, nbar):
    return max(0.0, negativity - np.log2(2.0 * nbar + 1.0))


def thermal_density(values, sigma, nbar, representation='position', hbar=1.0):
    '''Position or momentum density of a thermal trap state of ground-state
    width ``sigma``.

    '''
    factor = 2.0 * nbar + 1.0
    if representation == 'position':
        spread = sigma * np.sqrt(factor)
    elif representation == 'momentum':
        spread = hbar / (2.0 * sigma) * np.sqrt(factor)
    else:
        raise ValueError('representation must be position or momentum')
    return norm.pdf(values, scale=spread)


def wigner_thermal(u, cm, nbar=0.0, mean=None):
    '''Two-mode Wigner function of a thermal Gaussian state.

    ``u`` has shape (..., 4); the result has the leading shape of ``u``.

    :raises cvqdyn.exceptions.SingularCovarianceException: if the thermal
        matrix can not be inverted

    '''
    sigma = thermal_scale(cm, nbar).matrix
    det = np.linalg.det(sigma)
    if not det > 0:
        raise exceptions.SingularCovarianceException(
            'determinant {0:.3g}'.format(det))
    try:
        inverse = np.linalg.inv(sigma)
    except np.linalg.LinAlgError as e:
        raise exceptions.SingularCovarianceException(str(e))
    d = np.asarray(u, dtype=float)
    if mean is not None:
        d = d - np.asarray(mean, dtype=float)
    quadratic = np.einsum('...i,ij,...j->...', d, inverse, d)
    return np.exp(-0.5 * quadratic) / ((2.0 * np.pi) ** 2 * np.sqrt(det))


def trapped_amplitude(omega_sq, omega0, nbar):
    '''Thermal amplitude of the oscillating negativity in traps.'''
    return max(0.0, omega_sq / (2.0 * LN2 * omega0 ** 2) -
               np.log2(2.0 * nbar + 1.0))


@dataclasses.dataclass(frozen=True)
class WitnessParams(object):
    critical_temperature: float
    residual_amplitude: float
    newtonian_acceleration: float


def mond_witness_params(mass, separation, omega0, newtonian_acceleration=None,
                        hbar=sc.hbar, boltzmann=CONSTANTS.boltzmann_kB,
                        newton_G=CONSTANTS.newton_G, a0=CONSTANTS.mond_a0):
    '''Temperature T0 at which trapped Newtonian entanglement disappears,
    and the MOND amplitude left over at T0.

    :raises cvqdyn.exceptions.DomainErrorException: if
        omega0**2 L / a_N <= 1

    '''
    a_n = newtonian_acceleration
    if a_n is None:
        a_n = newton_G * mass / separation ** 2
    argument = omega0 ** 2 * separation / a_n
    if argument <= 1.0:
        raise exceptions.DomainErrorException(
            'omega0^2 L / a_N = {0:.3g} must exceed 1'.format(argument))
    t0 = hbar * omega0 / (boltzmann * np.log(argument))
    residual = (2.0 * np.sqrt(a_n * a0) / (omega0 ** 2 * separation * LN2) *
                (2.0 / 3.0 * (np.sqrt(2.0) - 1.0) - np.sqrt(a_n / a0)))
    return WitnessParams(t0, residual, a_n)
