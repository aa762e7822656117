from anisobubble.numerics.errors import UnsupportedRuleError
from anisobubble.numerics.quadrature.constants import (
    BALL_COMPANION_ANGULAR_RATIO,
    COMPOSITE_MIN_LOG_STEP,
    COMPOSITE_OVERLAP_TOLERANCE,
    DEFAULT_ANGULAR_ORDERS,
    DEFAULT_BALL_ANGULAR_ORDERS,
    DEFAULT_BALL_RADIAL_ORDERS,
    DEFAULT_LDI_NODES,
    DEFAULT_LOG_STEP,
    DEFAULT_S_MIN,
    DEFAULT_TENSOR_ORDER,
    DEFAULT_TENSOR_SCALE,
    MAX_S_MAX,
    PARTITION_EXPONENT,
    SUPPORTED_DIMENSIONS,
    TAIL_TOLERANCE,
    TENSOR_MAX_DIMENSION,
    RuleKind,
)
from anisobubble.numerics.quadrature.integrate import integrate
from anisobubble.numerics.shared.constants import DEFAULT_SEED
from anisobubble.numerics.shared.logger import timer
from anisobubble.numerics.shared.sphere import sphere_rule
from scipy.integrate import quad
from scipy.special import gamma, gammaln, roots_jacobi
from scipy.stats import chi2, norm as normal, qmc
import logging
import math
import numpy as np

logger = logging.getLogger(__name__)


class QuadratureRule:
    """
    Nodes and positive weights on R^n (or on a ball for LOCAL_BALL rules).

    Besides the primary weights a rule may carry one of three error-estimation devices:
    coarse_weights on the same nodes (nested rules), a companion rule of lower order,
    or halves=True when the first and second half of the nodes are each a valid rule.
    """

    def __init__(
        self,
        n,
        kind,
        nodes,
        weights,
        truncation_radius,
        params=None,
        seed=None,
        center=None,
        coarse_weights=None,
        companion=None,
        halves=False,
        witness=None,
    ):
        self.n = int(n)
        self.kind = RuleKind(kind)
        self.nodes = np.ascontiguousarray(nodes, dtype=float)
        self.weights = np.ascontiguousarray(weights, dtype=float)
        if self.nodes.shape != (len(self.weights), self.n):
            raise ValueError(
                f'Rule nodes of shape {self.nodes.shape} do not match {len(self.weights)} weights.'
            )
        self.truncation_radius = float(truncation_radius)
        self.params = params or {}
        self.seed = seed
        self.center = np.zeros(self.n) if center is None else np.asarray(center, dtype=float)
        self.coarse_weights = coarse_weights
        self.companion = companion
        self.halves = halves
        self.witness = witness

    def __len__(self):
        return len(self.weights)

    def __repr__(self):
        return f'QuadratureRule(n={self.n}, kind={self.kind.value}, size={len(self)})'

    @property
    def size(self):
        return len(self.weights)

    def transformed(self, z, lam):
        """
        Pushes the rule forward by x -> z + x / lam, so that integrating T_{z,lam} phi on
        the new rule reproduces the original node values exactly.
        """
        if not lam > 0:
            raise ValueError(f'The scale specified \'{lam}\' is not supported.')
        z = np.asarray(z, dtype=float)
        jacobian = lam ** -self.n
        return QuadratureRule(
            self.n,
            self.kind,
            z + self.nodes / lam,
            self.weights * jacobian,
            self.truncation_radius / lam,
            params=dict(self.params, transform=dict(z=z.tolist(), lam=float(lam))),
            seed=self.seed,
            center=z + self.center / lam,
            coarse_weights=None if self.coarse_weights is None else self.coarse_weights * jacobian,
            companion=None if self.companion is None else self.companion.transformed(z, lam),
            halves=self.halves,
            witness=self.witness,
        )

    def to_dict(self):
        return dict(
            center=self.center.tolist(),
            kind=self.kind.value,
            n=self.n,
            params=self.params,
            seed=self.seed,
            size=self.size,
            truncation_radius=self.truncation_radius,
            witness=self.witness,
        )


def witness_integrand(n, center=None):
    center = np.zeros(n) if center is None else np.asarray(center, dtype=float)

    def _witness(points):
        return (1 + np.sum((points - center) ** 2, axis=1)) ** -n
    return _witness


def witness_exact(n, radius=None):
    """
    Closed form of the integral of (1 + |x|^2)^(-n) over R^n, or over a ball by a 1-D quadrature.
    """
    if radius is None:
        return float(np.pi ** (n / 2) * gamma(n / 2) / gamma(n))
    sphere_area = 2 * np.pi ** (n / 2) / gamma(n / 2)
    radial, _ = quad(lambda r: r ** (n - 1) * (1 + r * r) ** -n, 0, radius, epsabs=0, epsrel=1e-13)
    return float(sphere_area * radial)


def _shape_matrix(n, shape):
    if shape is None:
        return np.eye(n)
    shape = np.asarray(shape, dtype=float)
    if shape.shape != (n, n):
        raise ValueError(f'The rule shape must be a {n}x{n} matrix.')
    return shape


def _spherical(n, params):
    center = np.asarray(params.get('center', np.zeros(n)), dtype=float)
    scale = float(params.get('scale', 1.0))
    shape = _shape_matrix(n, params.get('shape'))
    step = float(params.get('step', DEFAULT_LOG_STEP))
    s_min = float(params.get('s_min', DEFAULT_S_MIN))
    tail_exponent = float(params.get('tail_exponent', n))
    s_max = params.get('s_max')
    if s_max is None:
        s_max = min(MAX_S_MAX, math.log(1 / TAIL_TOLERANCE) / tail_exponent)
    s_max = float(s_max)
    if not (scale > 0 and step > 0 and s_max > s_min):
        raise ValueError('Spherical rules need scale > 0, step > 0 and s_max > s_min.')

    angular_nodes, angular_weights = sphere_rule(
        n,
        int(params.get('angular_order', DEFAULT_ANGULAR_ORDERS[n])),
    )
    directions = angular_nodes @ shape.T
    shells = int(math.ceil((s_max - s_min) / step)) + 1
    radii = scale * np.exp(s_min + step * np.arange(shells))
    count = len(angular_weights)

    nodes = center + np.repeat(radii, count)[:, None] * np.tile(directions, (shells, 1))
    shell_weights = step * radii ** n * abs(np.linalg.det(shape))
    weights = np.repeat(shell_weights, count) * np.tile(angular_weights, shells)
    coarse = np.where(np.repeat(np.arange(shells) % 2 == 0, count), 2 * weights, 0.0)

    return dict(
        nodes=nodes,
        weights=weights,
        coarse_weights=coarse,
        center=center,
        truncation_radius=float(radii[-1] * np.linalg.norm(shape, 2)),
    )


def _partition_weights(points, centers, scales):
    """
    Smooth partition of unity chi_j = omega_j / sum_k omega_k over the sub-rule centers.
    """
    log_omega = np.stack(
        [
            -PARTITION_EXPONENT * np.log1p(np.sum((points - c) ** 2, axis=1) / s ** 2)
            for c, s in zip(centers, scales)
        ],
        axis=1,
    )
    log_omega -= log_omega.max(axis=1, keepdims=True)
    omega = np.exp(log_omega)
    return omega / omega.sum(axis=1, keepdims=True)


def _composite_steps(centers, scales, step):
    """
    Log step of each sub-rule. Where the partition weight of sub-rule j at another center
    c_k exceeds COMPOSITE_OVERLAP_TOLERANCE, features of width L_k at distance |c_k - c_j|
    are resolved like features of width L_j at the sub-rule's own center.
    """
    floor = min(step, COMPOSITE_MIN_LOG_STEP)
    steps = []
    for j, (c, s) in enumerate(zip(centers, scales)):
        h = step
        for k, (other, width) in enumerate(zip(centers, scales)):
            distance = float(np.linalg.norm(other - c))
            if k == j or distance == 0:
                continue
            overlap = (1 + distance ** 2 / s ** 2) ** -PARTITION_EXPONENT
            if overlap > COMPOSITE_OVERLAP_TOLERANCE:
                h = min(h, step * width / distance)
        steps.append(max(h, floor))
    return steps


def _composite(n, params):
    centers = np.asarray(params['centers'], dtype=float)
    if centers.ndim != 2 or centers.shape[1] != n:
        raise ValueError(f'Composite rules need a list of centers in R^{n}.')
    scales = params.get('scales', 1.0)
    scales = np.broadcast_to(np.asarray(scales, dtype=float), (len(centers),))
    step = float(params.get('step', DEFAULT_LOG_STEP))
    if params.get('adaptive_step', True):
        steps = _composite_steps(centers, scales, step)
    else:
        steps = [step] * len(centers)
    logger.debug(f'_composite: log steps {steps}')
    nodes, weights, coarse, radius = [], [], [], 0.0
    for j, (c, s) in enumerate(zip(centers, scales)):
        sub = _spherical(n, dict(params, center=c, scale=s, step=steps[j]))
        chi = _partition_weights(sub['nodes'], centers, scales)[:, j]
        nodes.append(sub['nodes'])
        weights.append(sub['weights'] * chi)
        coarse.append(sub['coarse_weights'] * chi)
        radius = max(radius, sub['truncation_radius'] + np.linalg.norm(c - centers.mean(axis=0)))
    return dict(
        nodes=np.concatenate(nodes),
        weights=np.concatenate(weights),
        coarse_weights=np.concatenate(coarse),
        center=centers.mean(axis=0),
        truncation_radius=radius,
    )


def _local_ball_arrays(n, center, radius, radial_order, angular_order):
    t, wt = roots_jacobi(radial_order, 0, n - 1)
    rho = radius * (1 + t) / 2
    angular_nodes, angular_weights = sphere_rule(n, angular_order)
    count = len(angular_weights)
    nodes = center + np.repeat(rho, count)[:, None] * np.tile(angular_nodes, (radial_order, 1))
    weights = np.repeat((radius / 2) ** n * wt, count) * np.tile(angular_weights, radial_order)
    return nodes, weights


def _companion_angular_order(angular_order):
    return max(2, int(math.floor(BALL_COMPANION_ANGULAR_RATIO * angular_order)))


def _local_ball(n, params):
    center = np.asarray(params.get('center', np.zeros(n)), dtype=float)
    radius = float(params.get('radius', 1.0))
    if not radius > 0:
        raise ValueError(f'The ball radius specified \'{radius}\' is not supported.')
    radial_order = int(params.get('radial_order', DEFAULT_BALL_RADIAL_ORDERS[n]))
    angular_order = int(params.get('angular_order', DEFAULT_BALL_ANGULAR_ORDERS[n]))
    nodes, weights = _local_ball_arrays(n, center, radius, radial_order, angular_order)
    companion = None
    if radial_order >= 4 and angular_order >= 3:
        c_nodes, c_weights = _local_ball_arrays(
            n,
            center,
            radius,
            radial_order // 2,
            _companion_angular_order(angular_order),
        )
        companion = QuadratureRule(n, RuleKind.LOCAL_BALL, c_nodes, c_weights, radius, center=center)
    return dict(
        nodes=nodes,
        weights=weights,
        companion=companion,
        center=center,
        truncation_radius=radius,
    )


def _tensor_arrays(n, order, scale, center):
    t, wt = np.polynomial.legendre.leggauss(order)
    angle = np.pi * t / 2
    x = scale * np.tan(angle)
    w = wt * scale * (np.pi / 2) / np.cos(angle) ** 2
    grids = np.meshgrid(*([x] * n), indexing='ij')
    nodes = center + np.stack(grids, axis=-1).reshape(-1, n)
    weights = np.prod(np.stack(np.meshgrid(*([w] * n), indexing='ij'), axis=-1).reshape(-1, n), axis=1)
    return nodes, weights


def _tensor_mapped(n, params):
    order = int(params.get('order', DEFAULT_TENSOR_ORDER))
    scale = float(params.get('scale', DEFAULT_TENSOR_SCALE))
    center = np.asarray(params.get('center', np.zeros(n)), dtype=float)
    nodes, weights = _tensor_arrays(n, order, scale, center)
    companion = None
    if order >= 4:
        c_nodes, c_weights = _tensor_arrays(n, order // 2, scale, center)
        companion = QuadratureRule(n, RuleKind.TENSOR_MAPPED, c_nodes, c_weights, np.inf, center=center)
    return dict(
        nodes=nodes,
        weights=weights,
        companion=companion,
        center=center,
        truncation_radius=float(np.abs(nodes - center).max()),
    )


def _low_discrepancy(n, params, seed):
    """
    Scrambled Sobol points in n + 1 dimensions pushed through a radial multivariate-t
    proposal X = c + L Z sqrt(nu / W) with Z standard normal and W chi-square(nu).
    """
    count = int(params.get('nodes', DEFAULT_LDI_NODES))
    level = max(1, int(math.ceil(math.log2(count))))
    nu = float(params.get('tail_exponent', n))
    scale = float(params.get('scale', 1.0))
    center = np.asarray(params.get('center', np.zeros(n)), dtype=float)
    if not (nu > 0 and scale > 0):
        raise ValueError('Low-discrepancy rules need a positive tail exponent and scale.')

    sampler = qmc.Sobol(d=n + 1, scramble=True, seed=seed)
    u = sampler.random_base2(level)
    tiny = 2.0 ** -53
    u = np.clip(u, tiny, 1 - tiny)
    z = normal.ppf(u[:, :n])
    w = chi2.ppf(u[:, n], df=nu)
    nodes = center + scale * z * np.sqrt(nu / w)[:, None]

    r2 = np.sum((nodes - center) ** 2, axis=1) / (nu * scale ** 2)
    log_density = (
        gammaln((nu + n) / 2)
        - gammaln(nu / 2)
        - (n / 2) * math.log(nu * np.pi)
        - n * math.log(scale)
        - (nu + n) / 2 * np.log1p(r2)
    )
    weights = np.exp(-log_density) / len(nodes)
    return dict(
        nodes=nodes,
        weights=weights,
        halves=True,
        center=center,
        truncation_radius=float(np.sqrt(np.max(r2) * nu) * scale),
    )


def build_rule(n, kind, params=None, seed=DEFAULT_SEED, witness=True):
    """
    Builds a deterministic quadrature rule.

    Args:
        n: dimension, one of 2, 3, 4, 5.
        kind: RuleKind or its string value.
        params: kind-specific parameters (see the builders above).
        seed: only used by LOW_DISCREPANCY rules.
        witness: when True, integrates (1 + |x - center|^2)^(-n) and stores the relative
            error against its closed form together with the rule's own error estimate.
    """
    params = dict(params or {})
    if n not in SUPPORTED_DIMENSIONS:
        raise UnsupportedRuleError(f'The dimension specified \'{n}\' is not supported.', n=n)
    try:
        kind = RuleKind(kind)
    except ValueError:
        raise UnsupportedRuleError(f'The rule kind specified \'{kind}\' is not supported.', n=n)
    if kind == RuleKind.TENSOR_MAPPED and n > TENSOR_MAX_DIMENSION:
        raise UnsupportedRuleError(
            f'Tensor-mapped rules are limited to n <= {TENSOR_MAX_DIMENSION}, got n={n}.',
            n=n,
            kind=kind.value,
        )

    with timer('quadrature.build_rule', tags=dict(kind=kind.value, n=n)):
        if kind == RuleKind.SPHERICAL:
            arrays = _spherical(n, params)
        elif kind == RuleKind.COMPOSITE:
            arrays = _composite(n, params)
        elif kind == RuleKind.LOCAL_BALL:
            arrays = _local_ball(n, params)
        elif kind == RuleKind.TENSOR_MAPPED:
            arrays = _tensor_mapped(n, params)
        else:
            arrays = _low_discrepancy(n, params, seed)

        rule = QuadratureRule(
            n,
            kind,
            arrays['nodes'],
            arrays['weights'],
            arrays['truncation_radius'],
            params=_serializable(params),
            seed=seed if kind == RuleKind.LOW_DISCREPANCY else None,
            center=arrays['center'],
            coarse_weights=arrays.get('coarse_weights'),
            companion=arrays.get('companion'),
            halves=arrays.get('halves', False),
        )
        if witness:
            rule.witness = witness_report(rule)
    logger.debug(f'Built {rule!r}: witness {rule.witness}')
    return rule


def witness_report(rule):
    radius = rule.truncation_radius if rule.kind == RuleKind.LOCAL_BALL else None
    exact = witness_exact(rule.n, radius)
    value, error = integrate(rule, witness_integrand(rule.n, rule.center))
    return dict(
        error_estimate=error,
        exact=exact,
        relative_error=abs(value - exact) / exact,
        value=value,
    )


def rule_from_dict(n, spec, seed=DEFAULT_SEED, **overrides):
    spec = dict(spec or {})
    kind = spec.pop('kind', RuleKind.SPHERICAL.value)
    spec.update({k: v for k, v in overrides.items() if v is not None})
    return build_rule(n, kind, spec, seed=seed)


def _serializable(params):
    return {
        k: v.tolist() if isinstance(v, np.ndarray) else v
        for k, v in params.items()
    }


def support_rule(function, margin=1.0, **params):
    """
    LOCAL_BALL rule on the support of a compactly supported function such as a Bump.
    """
    center, radius = function.support
    return build_rule(
        len(center),
        RuleKind.LOCAL_BALL,
        dict(params, center=np.asarray(center, dtype=float), radius=radius * margin),
    )
