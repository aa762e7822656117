from anisobubble.numerics.bubbles.constants import (
    bubble_constant,
    bubble_exponent,
    conjugate_exponent,
    critical_exponent,
    decay_exponent,
    validate_exponents,
)
from anisobubble.numerics.quadrature.functions import AnalyticFunction
from anisobubble.numerics.shared.constants import FD_STEP
from anisobubble.numerics.shared.logger import timer
from anisobubble.numerics.shared.utils import outer
from anisobubble.numerics.stability.constants import (
    DEFAULT_RADIAL_MAX,
    RADIAL_ATOL,
    RADIAL_BLOW_UP,
    RADIAL_GRID_POINTS,
    RADIAL_RTOL,
    RADIAL_START,
    RadialStatus,
)
from dataclasses import dataclass
from scipy.integrate import solve_ivp, trapezoid
from scipy.interpolate import CubicHermiteSpline
import logging
import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class RadialProfile:
    radii: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    p: float
    n: int
    u0: float
    kappa_id: str
    status: RadialStatus = RadialStatus.OK
    message: str = ''

    @property
    def r_end(self):
        return float(self.radii[-1])

    @property
    def ok(self):
        return self.status == RadialStatus.OK

    def function(self, center=None):
        return RadialProfileFunction(self, center)

    def bubble_scale(self):
        """
        The lam of the bubble with the same value at r = 0.
        """
        return bubble_constant(self.n, self.p) / self.u0 ** (1 / bubble_exponent(self.n, self.p))

    def to_dict(self):
        return dict(
            kappa_id=self.kappa_id,
            message=self.message,
            n=self.n,
            p=self.p,
            points=len(self.radii),
            r_end=self.r_end,
            status=self.status.value,
            u0=self.u0,
            u_end=float(self.values[-1]),
        )

    def to_rows(self):
        return [
            dict(r=r, u=u, du=du)
            for r, u, du in zip(self.radii.tolist(), self.values.tolist(), self.derivatives.tolist())
        ]


class RadialProfileFunction(AnalyticFunction):
    """
    x -> u(|x - center|) on R^n from a shooting profile: a cubic Hermite interpolant of
    (u, u') up to r_end and the bubble decay u(r_end) (r_end / r)^{(n-p)/(p-1)} beyond.
    """

    def __init__(self, profile, center=None):
        self.profile = profile
        self.n = profile.n
        self.center = np.zeros(self.n) if center is None else np.asarray(center, dtype=float)
        self.spline = CubicHermiteSpline(profile.radii, profile.values, profile.derivatives)
        self.tail_exponent = decay_exponent(profile.n, profile.p)

    def identifier(self):
        return f'RadialProfile(n={self.n}, p={self.profile.p:g}, u0={self.profile.u0:g}, kappa={self.profile.kappa_id})'

    def radial(self, r, order=0):
        """
        (u, u', u'') at radii r.
        """
        r = np.asarray(r, dtype=float)
        r_end = self.profile.r_end
        e = self.tail_exponent
        inside = r <= r_end
        with np.errstate(divide='ignore', invalid='ignore'):
            tail = self.profile.values[-1] * (r_end / r) ** e
        values = np.where(inside, self.spline(np.minimum(r, r_end)), tail)
        first = None
        second = None
        if order >= 1:
            first = np.where(inside, self.spline(np.minimum(r, r_end), 1), -e * tail / r)
        if order >= 2:
            second = np.where(inside, self.spline(np.minimum(r, r_end), 2), e * (e + 1) * tail / r ** 2)
        return values, first, second

    def _evaluate(self, points, order):
        diff = points - self.center
        r = np.linalg.norm(diff, axis=1)
        values, first, second = self.radial(r, order)
        grads = None
        hessians = None
        with np.errstate(divide='ignore', invalid='ignore'):
            unit = np.where(r[:, None] > 0, diff / r[:, None], 0.0)
            if order >= 1:
                grads = first[:, None] * unit
            if order >= 2:
                radial_part = outer(unit)
                ratio = np.where(r > 0, first / r, second)
                hessians = (
                    second[:, None, None] * radial_part
                    + ratio[:, None, None] * (np.eye(self.n)[None, :, :] - radial_part)
                )
        return values, grads, hessians


def _kappa_id(kappa_radial):
    return getattr(kappa_radial, '__name__', None) or repr(kappa_radial)


def _grid(r_max, grid):
    if grid is None:
        grid = RADIAL_GRID_POINTS
    if np.isscalar(grid):
        return np.linspace(0.0, r_max, int(grid))
    grid = np.unique(np.asarray(grid, dtype=float))
    if grid[0] != 0.0:
        grid = np.concatenate([[0.0], grid])
    return grid[grid <= r_max]


def radial_shoot(p, n, kappa_radial, u0, r_max=DEFAULT_RADIAL_MAX, grid=None):
    """
    Shoots (r^{n-1} |u'|^{p-2} u')' = -kappa(r) r^{n-1} u^{p*-1} from u(0) = u0, u'(0) = 0.

    The first-order system in (u, w = r^{n-1} |u'|^{p-2} u') is integrated by DOP853 from
    r = 1e-6, seeded by the series u = u0 - (p-1)/p (kappa(0) u0^{p*-1} / n)^{1/(p-1)} r^{p/(p-1)}.
    A zero of u or |u| above 1e12 stops the integration; the returned profile then ends
    there and carries the status.

    Args:
        kappa_radial: callable r -> kappa(r), positive and bounded.
        grid: number of equispaced output radii on [0, r_max], or the radii themselves.
    """
    validate_exponents(n, p)
    if not u0 > 0:
        raise ValueError(f'The initial value specified \'{u0}\' is not supported; use u0 > 0.')
    if not r_max > RADIAL_START:
        raise ValueError(f'The radius specified \'{r_max}\' is not supported.')
    kappa0 = float(kappa_radial(0.0))
    if not kappa0 > 0:
        raise ValueError(f'kappa(0) = {kappa0} must be positive.')

    p_star = critical_exponent(n, p)
    q = conjugate_exponent(p)
    radii = _grid(r_max, grid)

    def _rhs(r, y):
        u, w = y
        du = np.sign(w) * np.abs(w / r ** (n - 1)) ** (1 / (p - 1))
        dw = -float(kappa_radial(r)) * r ** (n - 1) * np.abs(u) ** (p_star - 2) * u
        return [du, dw]

    def _zero(r, y):
        return y[0]

    def _blow_up(r, y):
        return RADIAL_BLOW_UP - abs(y[0])

    _zero.terminal = True
    _zero.direction = -1
    _blow_up.terminal = True

    r0 = RADIAL_START
    source = kappa0 * u0 ** (p_star - 1)
    start = [
        u0 - (p - 1) / p * (source / n) ** (1 / (p - 1)) * r0 ** q,
        -source * r0 ** n / n,
    ]
    inner = radii[radii > r0]
    with timer('stability.radial_shoot', tags=dict(n=n, p=p, u0=u0)):
        solution = solve_ivp(
            _rhs,
            (r0, radii[-1]),
            start,
            method='DOP853',
            t_eval=inner,
            events=(_zero, _blow_up),
            rtol=RADIAL_RTOL,
            atol=RADIAL_ATOL,
        )

    status = RadialStatus.OK
    if solution.status == -1:
        status = RadialStatus.FAILED
    elif len(solution.t_events[0]):
        status = RadialStatus.SIGN_CHANGE
    elif len(solution.t_events[1]):
        status = RadialStatus.BLOW_UP
    if status != RadialStatus.OK:
        logger.warning(f'radial_shoot: {status.value} before r_max={r_max} ({solution.message})')

    u = solution.y[0]
    w = solution.y[1]
    r = solution.t
    du = np.sign(w) * np.abs(w / r ** (n - 1)) ** (1 / (p - 1))
    return RadialProfile(
        radii=np.concatenate([[0.0], r]),
        values=np.concatenate([[u0], u]),
        derivatives=np.concatenate([[0.0], du]),
        p=float(p),
        n=int(n),
        u0=float(u0),
        kappa_id=str(_kappa_id(kappa_radial)),
        status=status,
        message=str(solution.message),
    )


def pohozaev_bracket(profile, kappa_radial):
    """
    Radial Pohozaev balance at r = r_end:

        E(r) = r^n ((p-1)/p |u'|^p + kappa u^{p*} / p*) + (n-p)/p r^{n-1} u |u'|^{p-2} u'

    vanishes at 0 and satisfies E' = r^n kappa' u^{p*} / p*. The defect between E(r_end) and
    the bulk integral measures the solver accuracy; for constant kappa both terms vanish.
    """
    n, p = profile.n, profile.p
    p_star = critical_exponent(n, p)
    r = profile.radii
    u = profile.values
    du = profile.derivatives
    kappa = np.array([float(kappa_radial(x)) for x in r])
    kappa_prime = np.array([
        (float(kappa_radial(x + FD_STEP)) - float(kappa_radial(max(x - FD_STEP, 0.0))))
        / (x + FD_STEP - max(x - FD_STEP, 0.0))
        for x in r
    ])
    end = -1
    boundary = (
        r[end] ** n * ((p - 1) / p * abs(du[end]) ** p + kappa[end] * u[end] ** p_star / p_star)
        + (n - p) / p * r[end] ** (n - 1) * u[end] * abs(du[end]) ** (p - 2) * du[end]
    )
    bulk = trapezoid(r ** n * kappa_prime * np.abs(u) ** p_star / p_star, r)
    scale = r[end] ** n * kappa[end] * u[end] ** p_star / p_star + abs(bulk)
    return dict(
        boundary=float(boundary),
        bulk=float(bulk),
        defect=float(abs(boundary - bulk)),
        relative_defect=float(abs(boundary - bulk) / scale) if scale > 0 else 0.0,
    )
