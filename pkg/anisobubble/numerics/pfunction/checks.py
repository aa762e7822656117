from anisobubble.numerics.anisotropy.ellipticity import cph_constant, ellipticity_constants
from anisobubble.numerics.anisotropy.operations import stress_jacobian_field
from anisobubble.numerics.functionals.deficit import deficit
from anisobubble.numerics.pfunction.constants import (
    BUBBLE_SPREAD_TOLERANCE,
    BUBBLE_TRACELESS_TOLERANCE,
    DIFF_IDENTITY_TOLERANCE,
    GRADP_TOLERANCE,
    INEQUALITY_T_MIN,
    INTEGRAL_IDENTITY_TOLERANCE,
    INTEGRAL_INEQUALITY_TOLERANCE,
    NOISE_RATIO,
    T_MAX,
    T_MIN,
    TRACE_IDENTITY_FRACTION,
    TRACE_IDENTITY_TOLERANCE,
    PFunctionCheck,
)
from anisobubble.numerics.pfunction.frame import pfunction_terms
from anisobubble.numerics.quadrature.fields import Field, as_field
from anisobubble.numerics.quadrature.integrate import integrate
from anisobubble.numerics.quadrature.rules import support_rule
from anisobubble.numerics.shared.constants import (
    BLOCK_SIZE,
    FD_NESTED_STEP,
    FD_STEP,
    FD_THIRD_DERIVATIVE_STEP,
)
from anisobubble.numerics.shared.differences import (
    central_divergence,
    central_gradient,
    directional_derivative,
)
from anisobubble.numerics.shared.hash import replace_nan_values
from anisobubble.numerics.shared.logger import timer
from anisobubble.numerics.shared.multi import evaluate_in_blocks
from anisobubble.numerics.shared.utils import critical_set, trace
from dataclasses import dataclass, field
import logging
import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class CheckReport:
    check: str
    params: dict
    lhs: float
    rhs: float
    gap: float
    tolerance: float
    passed: bool
    inconclusive: bool = False
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return replace_nan_values(dict(
            check=self.check,
            details=self.details,
            gap=self.gap,
            inconclusive=self.inconclusive,
            lhs=self.lhs,
            params=self.params,
            rhs=self.rhs,
            tolerance=self.tolerance,
            **{'pass': self.passed},
        ))


def _matvec(matrices, vectors):
    return np.einsum('nij,nj->ni', matrices, vectors)


def _dot(a, b):
    return np.sum(a * b, axis=1)


def _vector_norm(a):
    return np.linalg.norm(a, axis=1)


def check_gradP(frame, tolerance=GRADP_TOLERANCE):
    """
    Compares a central-difference gradient of P with (n / v)(W_ring^T + R / n Id) grad v.

    gap is the maximum over non-excluded nodes of |fd - identity| / (|fd| + |identity| + s),
    where s is the size of the two chain-rule terms of grad P at the node. The chain-rule
    form of grad P is compared with the identity as well and reported in details.
    """
    n = frame.n
    p = frame.p
    keep = frame.keep
    nodes = frame.rule.nodes[keep]
    v = frame.v.values[keep]
    gv = frame.v.gradient_values[keep]
    hv = frame.v.hessian_values[keep]
    P = frame.P.values[keep]
    R = frame.R.values[keep]
    Wring = frame.Wring[keep]

    with timer('pfunction.check_gradP', tags=dict(size=len(nodes))):
        fd = evaluate_in_blocks(
            lambda points: central_gradient(
                lambda x: frame.evaluate(x)['P'],
                points,
                FD_STEP,
                frame.scale,
                frame.center,
            ),
            nodes,
            BLOCK_SIZE,
        )
    identity = (n / v)[:, None] * (
        np.einsum('nji,nj->ni', Wring, gv) + (R / n)[:, None] * gv
    )
    chain = frame.grad_p[keep]
    scale = (
        n * (p - 1) * _vector_norm(_matvec(hv, frame.stress[keep])) / v
        + P * _vector_norm(gv) / v
    )

    fd_defect = _vector_norm(fd - identity) / (
        _vector_norm(fd) + _vector_norm(identity) + scale
    )
    form_defect = _vector_norm(chain - identity) / (
        _vector_norm(chain) + _vector_norm(identity) + scale
    )
    gap = float(np.max(fd_defect)) if len(fd_defect) else 0.0
    return CheckReport(
        check=PFunctionCheck.GRADP.value,
        params=dict(n=n, p=p, size=int(len(nodes))),
        lhs=float(np.max(_vector_norm(fd))) if len(fd) else 0.0,
        rhs=float(np.max(_vector_norm(identity))) if len(identity) else 0.0,
        gap=gap,
        tolerance=tolerance,
        passed=bool(gap <= tolerance),
        details=dict(
            form_agreement=float(np.max(form_defect)) if len(form_defect) else 0.0,
            excluded=int(len(frame.excluded_nodes)),
        ),
    )


def _pointwise(function, p, norm):
    def _terms(points):
        w, g, h = function._evaluate(points, 2)
        return dict(pfunction_terms(norm, p, w, g, h), w=w, grad_w=g, hess_w=h)
    return _terms


def _flux(terms_at, n):
    def _field(points):
        terms = terms_at(points)
        return (terms['w'] ** (2 - n))[:, None] * _matvec(terms['A'], terms['grad_p'])
    return _field


def check_diff_identity(
    w,
    p,
    norm,
    points,
    tolerance=DIFF_IDENTITY_TOLERANCE,
    scale=1.0,
    center=None,
):
    """
    Pointwise check of the differential identity

        div(w^{2-n} A grad P) = w^{1-n} { -n <A grad P, grad w> - P tr W
            + n(p - 1) [tr W^2 + <grad tr W, a>] - P w_j d^3_{ijk}V w_{ki} }

    for any positive C^3 function w, where V = H^p / p and P, W are built from w.

    The left side uses the analytic grad P and nested central differences at
    FD_NESTED_STEP; grad tr W uses FD_STEP and the third derivatives of V are central
    differences of A along grad w at FD_THIRD_DERIVATIVE_STEP (1 + |grad w|). The check is
    repeated with half the outer step; when the two disagree by a sizable fraction of the
    defect the result is inconclusive instead of failing.
    """
    function = w.function if isinstance(w, Field) else w
    if function is None:
        raise ValueError('check_diff_identity needs an analytic w.')
    n = norm.n
    points = np.atleast_2d(np.asarray(points, dtype=float))
    terms_at = _pointwise(function, p, norm)

    terms = terms_at(points)
    radii = np.linalg.norm(points - (0.0 if center is None else np.asarray(center)), axis=1)
    keep = ~critical_set(terms['grad_w'], values=terms['w'], radii=radii)
    keep &= np.isfinite(terms['w']) & (terms['w'] > 0)

    points = points[keep]
    terms = {key: value[keep] for key, value in terms.items() if value is not None}
    if not len(points):
        raise ValueError('check_diff_identity needs sample points off the critical set.')

    with timer('pfunction.check_diff_identity', tags=dict(p=p, family=norm.family.value)):
        flux = _flux(terms_at, n)
        lhs = central_divergence(flux, points, FD_NESTED_STEP, scale, center)
        lhs_half = central_divergence(flux, points, FD_NESTED_STEP / 2, scale, center)
        grad_trace = central_gradient(
            lambda x: terms_at(x)['tr_w'],
            points,
            FD_STEP,
            scale,
            center,
        )
        gw = terms['grad_w']
        third = directional_derivative(
            lambda xi: stress_jacobian_field(norm, p, xi),
            gw,
            gw,
            FD_THIRD_DERIVATIVE_STEP,
        )

    wv = terms['w']
    P = terms['P']
    W = terms['W']
    a_grad_p = _matvec(terms['A'], terms['grad_p'])
    bracket_terms = dict(
        flux=-n * _dot(a_grad_p, gw),
        trace=-P * terms['tr_w'],
        square=n * (p - 1) * trace(W @ W),
        transport=n * (p - 1) * _dot(grad_trace, terms['a']),
        third=-P * trace(third @ terms['hess_w']),
    )
    weight = wv ** (1 - n)
    rhs = weight * sum(bracket_terms.values())
    magnitude = weight * sum(np.abs(value) for value in bracket_terms.values())

    denominator = np.abs(lhs) + np.abs(rhs) + magnitude
    defect = np.abs(lhs - rhs) / denominator
    noise = np.abs(lhs - lhs_half) / denominator
    gap = float(np.max(defect))
    noise_level = float(np.max(noise))
    homogeneity = np.abs(
        trace(third @ terms['hess_w']) - (p - 2) * terms['tr_w']
    ) / (np.abs(terms['tr_w']) + 1)

    passed = gap <= tolerance
    inconclusive = not passed and noise_level >= NOISE_RATIO * gap
    if inconclusive:
        logger.warning(
            f'check_diff_identity: defect {gap:.3e} is within the finite-difference noise '
            f'{noise_level:.3e}'
        )
    return CheckReport(
        check=PFunctionCheck.DIFF_IDENTITY.value,
        params=dict(family=norm.family.value, n=n, p=p, points=int(len(points))),
        lhs=float(np.max(np.abs(lhs))),
        rhs=float(np.max(np.abs(rhs))),
        gap=gap,
        tolerance=tolerance,
        passed=bool(passed),
        inconclusive=bool(inconclusive),
        details=dict(
            excluded=int(np.sum(~keep)),
            noise=noise_level,
            third_order_homogeneity=float(np.max(homogeneity)),
        ),
    )


def _check_t(t, low=T_MIN, high=T_MAX):
    if not low <= t <= high:
        raise ValueError(f'The exponent t specified \'{t}\' is not supported; use {low} <= t <= {high}.')


def _integral_terms(frame, phi, t, rule):
    if rule is None:
        if not hasattr(phi, 'support'):
            raise ValueError('A rule is required for test functions without a known support.')
        rule = support_rule(phi)
    if frame.rule is not rule:
        frame = frame.resampled(rule)
    if frame.grad_r is None:
        raise ValueError('The integral checks need an analytic kappa.')
    phi_field = as_field(phi, rule, order=1)
    exclude = np.union1d(frame.excluded_nodes, phi_field.excluded_nodes)

    n = frame.n
    p = frame.p
    v = frame.v.values
    gv = frame.v.gradient_values
    P = frame.P.values
    R = frame.R.values
    a = frame.stress
    grad_p = frame.grad_p
    grad_r = frame.grad_r
    W = frame.W
    Wring = frame.Wring
    phi_values = phi_field.values
    a_grad_p = _matvec(frame.stress_jacobian, grad_p)

    with np.errstate(divide='ignore', invalid='ignore'):
        Pt = P ** t
        weight = v ** (1 - n) * Pt * phi_values
        gradient_weight = t * P ** (t - 1) * phi_values if t else np.zeros_like(P)
        integrands = dict(
            lhs=-v ** (2 - n) * (
                gradient_weight * _dot(a_grad_p, grad_p)
                + Pt * _dot(a_grad_p, phi_field.gradient_values)
            ),
            rhs=weight * (
                -n * _dot(a_grad_p, gv)
                - (p - 1) * P * frame.tr_w
                + n * (p - 1) * (trace(W @ W) + _dot(grad_p + grad_r, a))
            ),
            mid=(p - 1) * weight * (
                n * trace(Wring @ Wring)
                + n * _dot(grad_r, a)
                + R * (P + R)
            ),
            scale=np.abs(weight) * (
                n * np.abs(_dot(a_grad_p, gv))
                + (p - 1) * P * np.abs(frame.tr_w)
                + n * (p - 1) * (np.abs(trace(W @ W)) + np.abs(_dot(grad_p + grad_r, a)))
            ),
            traceless=n * (p - 1) * weight * np.sum(Wring ** 2, axis=(1, 2)),
            traceless_trace=n * (p - 1) * weight * trace(Wring @ Wring),
            remainder=(p - 1) * weight * (n * _dot(grad_r, a) + R * (P + R)),
        )
    integrals = {}
    for key, values in integrands.items():
        integrals[key], integrals[f'{key}_error'] = integrate(rule, values, exclude=exclude)
    return frame, phi_field, integrals


def check_integral_identity(frame, phi, t=1.0, tolerance=INTEGRAL_IDENTITY_TOLERANCE, rule=None):
    """
    Integrated form of the differential identity tested against P^t phi.

    lhs = -int v^{2-n} <A grad P, grad(P^t phi)>,
    rhs = int v^{1-n} {-n <A grad P, grad v> - (p-1) P tr W
          + n(p-1) [tr W^2 + <grad(P + R), a>]} P^t phi,
    mid = (p-1) int v^{1-n} {n tr W_ring^2 + n <grad R, a> + R (P + R)} P^t phi.

    The frame is resampled on a ball rule covering the support of phi unless a rule is
    given. The check passes when |lhs - rhs| <= tolerance * max(|lhs|, |rhs|, scale), with
    scale the integral of the absolute bracket terms.
    """
    _check_t(t)
    with timer('pfunction.check_integral_identity', tags=dict(t=t)):
        frame, _, integrals = _integral_terms(frame, phi, t, rule)
    lhs = integrals['lhs']
    rhs = integrals['rhs']
    mid = integrals['mid']
    reference = max(abs(lhs), abs(rhs), integrals['scale'])
    gap = abs(lhs - rhs)
    return CheckReport(
        check=PFunctionCheck.INTEGRAL_IDENTITY.value,
        params=dict(n=frame.n, p=frame.p, t=t, size=len(frame)),
        lhs=lhs,
        rhs=rhs,
        gap=gap,
        tolerance=tolerance,
        passed=bool(gap <= tolerance * reference),
        details=dict(
            mid=mid,
            mid_gap=abs(mid - rhs),
            quadrature_error=integrals['lhs_error'] + integrals['rhs_error'],
            scale=integrals['scale'],
        ),
    )


def _inequality_margin(integrals, c):
    return integrals['lhs'] - ((1 - c) * integrals['traceless'] + integrals['remainder'])


def _companion_margin(frame, phi, t, c):
    """
    The inequality margin on the lower-order companion of the frame's rule, or None.
    """
    companion = frame.rule.companion
    if companion is None:
        return None
    _, _, integrals = _integral_terms(frame, phi, t, companion)
    return _inequality_margin(integrals, c)


def check_integral_inequality(
    frame,
    phi,
    t=1.0,
    c=None,
    tolerance=INTEGRAL_INEQUALITY_TOLERANCE,
    rule=None,
    ellipticity=None,
):
    """
    margin = lhs - rhs with lhs as in check_integral_identity and

        rhs = n(p-1)(1-c) int v^{1-n} |W_ring|^2 P^t phi
              + (p-1) int v^{1-n} {n <grad R, a> + R (P + R)} P^t phi,

    for a non-negative phi and t >= 1. c defaults to c_{p,H} from sampled ellipticity
    constants. Passes when margin >= -tolerance * max(|lhs|, |rhs|, scale).

    A failing margin is recomputed on the rule's companion. When the change between the
    two resolutions covers the shortfall the result is inconclusive instead of failing.
    """
    _check_t(t, INEQUALITY_T_MIN)
    if c is None:
        c = cph_constant(frame.p, ellipticity or ellipticity_constants(frame.norm))
    with timer('pfunction.check_integral_inequality', tags=dict(t=t)):
        frame, phi_field, integrals = _integral_terms(frame, phi, t, rule)
    if np.min(phi_field.values) < 0:
        raise ValueError('check_integral_inequality needs a non-negative test function.')
    lhs = integrals['lhs']
    rhs = (1 - c) * integrals['traceless'] + integrals['remainder']
    margin = _inequality_margin(integrals, c)
    reference = max(abs(lhs), abs(rhs), integrals['scale'])
    threshold = -tolerance * reference
    passed = margin >= threshold
    inconclusive = False
    resolution = None
    if not passed:
        with timer('pfunction.check_integral_inequality.companion', tags=dict(t=t)):
            companion_margin = _companion_margin(frame, phi, t, c)
        if companion_margin is not None:
            resolution = abs(margin - companion_margin)
            inconclusive = margin + resolution >= threshold
        if inconclusive:
            logger.warning(
                f'check_integral_inequality: margin {margin:.3e} below {threshold:.3e} is '
                f'within the quadrature resolution {resolution:.3e}'
            )
        else:
            logger.warning(f'check_integral_inequality: margin {margin:.3e} below {threshold:.3e}')
    return CheckReport(
        check=PFunctionCheck.INTEGRAL_INEQUALITY.value,
        params=dict(c=c, n=frame.n, p=frame.p, t=t, size=len(frame)),
        lhs=lhs,
        rhs=rhs,
        gap=margin,
        tolerance=tolerance,
        passed=bool(passed),
        inconclusive=bool(inconclusive),
        details=dict(
            margin=margin,
            pointwise_margin=integrals['traceless_trace'] - (1 - c) * integrals['traceless'],
            resolution=resolution,
            scale=integrals['scale'],
        ),
    )


def a_bounds(frame):
    """
    Sampled (c, C) with c |grad v|^{p-2} |eta|^2 <= <A eta, eta> and |A| <= C |grad v|^{p-2}.
    """
    keep = frame.keep
    eigenvalues = np.linalg.eigvalsh(frame.stress_jacobian[keep])
    size = _vector_norm(frame.v.gradient_values[keep]) ** (frame.p - 2)
    return (
        float(np.min(eigenvalues[:, 0] / size)),
        float(np.max(eigenvalues[:, -1] / size)),
    )


def trace_identity_defect(frame, tolerance=TRACE_IDENTITY_TOLERANCE):
    """
    Relative defect of tr W = P + R per node. Passes when at least 99% of the
    non-excluded nodes are within tolerance.
    """
    keep = frame.keep
    P = frame.P.values[keep]
    R = frame.R.values[keep]
    defect = np.abs(frame.tr_w[keep] - (P + R)) / (np.abs(P) + np.abs(R))
    fraction = float(np.mean(defect <= tolerance)) if len(defect) else 1.0
    return dict(
        fraction=fraction,
        max=float(np.max(defect)) if len(defect) else 0.0,
        passed=fraction >= TRACE_IDENTITY_FRACTION,
        tolerance=tolerance,
    )


def classify(frame):
    """
    sup |W_ring| and the relative standard deviation of P over non-excluded nodes. Both
    vanish exactly on bubbles.
    """
    keep = frame.keep
    traceless = np.sqrt(np.sum(frame.Wring[keep] ** 2, axis=(1, 2)))
    P = frame.P.values[keep]
    sup_traceless = float(np.max(traceless)) if len(traceless) else 0.0
    spread = float(np.std(P) / abs(np.mean(P))) if len(P) else 0.0
    return dict(
        is_bubble=sup_traceless <= BUBBLE_TRACELESS_TOLERANCE and spread <= BUBBLE_SPREAD_TOLERANCE,
        p_mean=float(np.mean(P)) if len(P) else None,
        p_relative_sd=spread,
        sup_traceless=sup_traceless,
    )


def weighted_traceless_estimate(frame, t=1.0):
    """
    Ratio of int v^{1-n} |W_ring|^2 P^t + int v^{2-n} |grad v|^{p-2} P^{t-1} |grad P|^2 to
    the Sobolev deficit of (u, kappa), measured on the frame's rule.
    """
    n = frame.n
    p = frame.p
    exclude = frame.excluded_nodes
    v = frame.v.values
    P = frame.P.values
    with np.errstate(divide='ignore', invalid='ignore'):
        traceless, _ = integrate(
            frame.rule,
            v ** (1 - n) * np.sum(frame.Wring ** 2, axis=(1, 2)) * P ** t,
            exclude=exclude,
        )
        gradient, _ = integrate(
            frame.rule,
            v ** (2 - n)
            * _vector_norm(frame.v.gradient_values) ** (p - 2)
            * P ** (t - 1)
            * np.sum(frame.grad_p ** 2, axis=1),
            exclude=exclude,
        )
    report = deficit(frame.u, frame.kappa, p, frame.norm)
    total = traceless + gradient
    return dict(
        deficit=report.deficit,
        gradient=gradient,
        ratio=total / report.deficit if report.deficit > 0 else float('nan'),
        t=t,
        traceless=traceless,
    )
