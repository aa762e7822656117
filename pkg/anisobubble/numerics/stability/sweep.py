from anisobubble.numerics.anisotropy.constants import NormFamily
from anisobubble.numerics.anisotropy.norms import AnisotropicNorm, norm_from_dict
from anisobubble.numerics.bubbles.bubble import Bubble, bubble_rule
from anisobubble.numerics.decompose.fitting import bubble_distance, fit_single_bubble
from anisobubble.numerics.errors import AnisobubbleError
from anisobubble.numerics.functionals.deficit import deficit, kappa0, normalize_kappa0
from anisobubble.numerics.functionals.kappa import infer_kappa
from anisobubble.numerics.quadrature.fields import Field
from anisobubble.numerics.quadrature.functions import Bump, Constant, Gaussian
from anisobubble.numerics.shared.constants import DEFAULT_SEED
from anisobubble.numerics.shared.hash import group_by
from anisobubble.numerics.shared.logger import timer
from anisobubble.numerics.shared.multi import execute_parallel
from anisobubble.numerics.stability.approximants import proof_bubble_report
from anisobubble.numerics.stability.constants import (
    DEFAULT_BUMP_RADIUS,
    DEFAULT_EPS_LADDER,
    DEFAULT_GAUSSIAN_OFFSET,
    DEFAULT_GAUSSIAN_WIDTH,
    DEFAULT_RADIAL_MAX,
    DEFAULT_RADIAL_WIDTHS,
    DEFAULT_SWEEP_MULTISTARTS,
    DEFAULT_T_BALL,
    FINAL_RUNG_FACTOR,
    LAMBDA_BRACKET,
    PERTURBATION_KINDS,
    SPEARMAN_THRESHOLD,
    STABILITY_COLUMNS,
    THETA_GRID,
    WARM_START_MULTISTARTS,
    PerturbationKind,
)
from anisobubble.numerics.stability.radial_solver import radial_shoot
from dataclasses import dataclass, field
from scipy.stats import linregress, spearmanr
from typing import Optional
import logging
import math
import numpy as np

logger = logging.getLogger(__name__)

NAN = float('nan')


@dataclass
class StabilityRecord:
    n: int
    p: float
    family: str
    perturbation: str
    eps: float
    deficit: float = NAN
    dist: float = NAN
    proof_dist: float = NAN
    kappa0: float = NAN
    energy: float = NAN
    window_ok: bool = False
    lam: float = NAN
    proof_lam: float = NAN
    reason: Optional[str] = None
    details: dict = field(default_factory=dict)
    fit: Optional[Bubble] = field(default=None, repr=False, compare=False)

    @property
    def ratios(self):
        """
        dist / deficit^theta over the reporting grid of theta.
        """
        with np.errstate(divide='ignore', invalid='ignore'):
            return {
                f'{theta:g}': float(np.float64(self.dist) / np.float64(self.deficit) ** theta)
                for theta in THETA_GRID
            }

    def to_row(self):
        return {column: getattr(self, column) for column in STABILITY_COLUMNS}

    def to_dict(self):
        return dict(
            self.to_row(),
            details=self.details,
            lam=self.lam,
            proof_lam=self.proof_lam,
            ratios=self.ratios,
            reason=self.reason,
        )


class RadialKappa:
    """
    kappa(r) = 1 + eps exp(-r^2 / width^2).
    """

    def __init__(self, eps, width):
        self.eps = float(eps)
        self.width = float(width)

    def __call__(self, r):
        return 1.0 + self.eps * math.exp(-(r / self.width) ** 2)

    def __repr__(self):
        return f'RadialKappa(eps={self.eps:g}, width={self.width:g})'

    def function(self, n):
        return Constant(n, 1.0) + Gaussian(np.zeros(n), self.width, self.eps)


def _offset(n, value):
    if value is None or np.isscalar(value):
        offset = np.zeros(n)
        offset[0] = 0.0 if value is None else float(value)
        return offset
    return np.asarray(value, dtype=float)


def ladders(n, config):
    """
    (perturbation id, kind, params) for every ladder of the sweep, in config order.
    """
    result = []
    for kind in config.get('families', [k.value for k in PerturbationKind]):
        try:
            kind = PerturbationKind(kind)
        except ValueError:
            raise ValueError(f'The perturbation family specified \'{kind}\' is not supported.')
        if kind == PerturbationKind.BUMP:
            params = config.get('bump') or {}
            result.append(('bump', kind, dict(
                offset=_offset(n, params.get('offset')),
                radius=params.get('radius', DEFAULT_BUMP_RADIUS),
            )))
        elif kind == PerturbationKind.GAUSSIAN:
            params = config.get('gaussian') or {}
            result.append(('gaussian', kind, dict(
                offset=_offset(n, params.get('offset', DEFAULT_GAUSSIAN_OFFSET)),
                width=params.get('width', DEFAULT_GAUSSIAN_WIDTH),
            )))
        else:
            params = config.get('radial') or {}
            for width in params.get('widths', DEFAULT_RADIAL_WIDTHS):
                result.append((f'radial-w{width:g}', kind, dict(
                    r_max=params.get('r_max', DEFAULT_RADIAL_MAX),
                    width=width,
                )))
    return result


def _perturbed(bubble, kind, params, eps):
    """
    (u, kappa, extra details) for one rung. kappa is None for the analytic families, where
    it is inferred from u.
    """
    n = bubble.n
    if kind == PerturbationKind.BUMP:
        return bubble.function() + eps * Bump(bubble.z + params['offset'], params['radius']), None, {}
    if kind == PerturbationKind.GAUSSIAN:
        return bubble.function() + eps * Gaussian(bubble.z + params['offset'], params['width']), None, {}
    kappa = RadialKappa(eps, params['width'])
    profile = radial_shoot(bubble.p, n, kappa, bubble.center_value, r_max=params['r_max'])
    if not profile.ok:
        raise ValueError(f'radial shooting ended with {profile.status.value} at r = {profile.r_end:g}')
    return profile.function(bubble.z), kappa.function(n), dict(radial=profile.to_dict())


def stability_record(norm, p, perturbation, kind, params, eps, config, init=None):
    """
    One rung of a ladder: kappa_0-normalized (u, kappa), deficit, distance to the best-fit
    bubble and distance to the proof-driven bubble. Records outside the energy window are
    returned with window_ok False and a reason.

    init is a bubble to start the fit from; a single search is run from it.
    """
    n = norm.n
    bubble = Bubble(norm, p, np.zeros(n), config.get('lam', 1.0))
    rule = bubble_rule(bubble, **(config.get('quadrature') or {}))
    record = StabilityRecord(n=n, p=float(p), family=norm.family.value, perturbation=perturbation, eps=float(eps))
    try:
        function, kappa, details = _perturbed(bubble, kind, params, eps)
        u = Field.sample(rule, function, 2 if kappa is None else 1)
        if kappa is None:
            kappa = infer_kappa(u, p, norm)
        record.kappa0 = kappa0(u, kappa, p)
        u, kappa = normalize_kappa0(u, kappa, p)
        report = deficit(u, kappa, p, norm)
        record.energy = report.grad_energy
        record.window_ok = report.energy_window_ok
        if not record.window_ok:
            record.reason = 'energy outside [S^n / 2, 3 S^n / 2]'
            logger.warning(f'stability_record: {perturbation} eps={eps:g} skipped, {record.reason}')
            return record
        record.deficit = report.deficit

        if init is None:
            multistarts = config.get('multistarts', DEFAULT_SWEEP_MULTISTARTS)
        else:
            multistarts = WARM_START_MULTISTARTS
            init = (init.z, init.lam)
        fit = fit_single_bubble(
            u,
            p,
            norm,
            init=init,
            multistarts=multistarts,
            seed=config.get('seed', DEFAULT_SEED),
        )
        record.dist = max(fit.residual_grad_energy, 0.0) ** (1 / p)
        record.lam = fit.bubble.lam
        record.fit = fit.bubble

        proof = proof_bubble_report(u, p, norm, t_ball=config.get('t_ball', DEFAULT_T_BALL))
        record.proof_dist = max(bubble_distance(u, proof.bubble, p, norm), 0.0) ** (1 / p)
        record.proof_lam = proof.bubble.lam
        record.details = dict(
            details,
            ascent_converged=proof.ascent_converged,
            fit_converged=fit.converged,
            kappa0_gap=report.kappa0_gap,
            p_bar=proof.p_bar,
            warm_start=init is not None,
        )
    except (AnisobubbleError, ValueError) as err:
        record.reason = str(err)
        logger.warning(f'stability_record: {perturbation} eps={eps:g} failed: {err}')
    return record


def stability_ladder(norm, p, perturbation, kind, params, eps_ladder, config):
    """
    The records of one ladder in eps order. Each fit starts from the previous rung's
    best bubble once one is available.
    """
    records = []
    previous = None
    for eps in eps_ladder:
        record = stability_record(norm, p, perturbation, kind, params, eps, config, init=previous)
        if record.fit is not None:
            previous = record.fit
        records.append(record)
    return records


def _cells(config):
    cells = config.get('cells')
    if cells is None:
        return [(config['n'], config['p'])]
    return [(int(n), float(p)) for n, p in cells]


def _norm(spec, n):
    if isinstance(spec, AnisotropicNorm):
        if spec.n != n:
            raise ValueError(f'The norm has dimension {spec.n}, expected {n}.')
        return spec
    return norm_from_dict(dict(spec, n=n))


def stability_sweep(config):
    """
    Deficit versus bubble distance along perturbation ladders.

    config keys: norm (spec dict or norm), cells [[n, p], ...] (or n and p), families,
    eps, lam, bump {offset, radius}, gaussian {offset, width}, radial {widths, r_max},
    t_ball, multistarts, seed, quadrature (bubble rule overrides).

    Ladders are computed in parallel and records returned in config order: cells, then
    ladders, then eps. The radial family needs the Euclidean norm and is skipped otherwise.
    """
    eps_ladder = [float(e) for e in config.get('eps', DEFAULT_EPS_LADDER)]
    tasks = []
    for n, p in _cells(config):
        norm = _norm(config.get('norm', dict(family=NormFamily.EUCLIDEAN.value)), n)
        for perturbation, kind, params in ladders(n, config):
            if kind == PerturbationKind.RADIAL and norm.family != NormFamily.EUCLIDEAN:
                logger.warning(f'stability_sweep: {perturbation} needs the Euclidean norm, skipped')
                continue
            tasks.append((stability_ladder, (norm, p, perturbation, kind, params, eps_ladder, config)))
    with timer('stability.stability_sweep', tags=dict(ladders=len(tasks), rungs=len(eps_ladder))):
        return [record for records in execute_parallel(tasks) for record in records]


def _spearman(x, y):
    if len(x) < 3:
        return NAN
    return float(spearmanr(x, y)[0])


def sweep_trend(records):
    """
    Per ladder: Spearman correlations of deficit and dist with eps, the regression
    log dist = log C + theta log deficit over the eps > 0 rungs, the final-rung check
    dist_last <= 10 dist_first (deficit_last / deficit_first) and the lam bracket.
    """
    trends = []
    groups = group_by(lambda r: (r.n, r.p, r.family, r.perturbation), records)
    for (n, p, family, perturbation), rows in groups.items():
        rows = [r for r in rows if r.window_ok and math.isfinite(r.dist) and math.isfinite(r.deficit)]
        eps = np.array([r.eps for r in rows])
        deficits = np.array([r.deficit for r in rows])
        dists = np.array([r.dist for r in rows])
        rho_deficit = _spearman(eps, deficits)
        rho_dist = _spearman(eps, dists)

        positive = (eps > 0) & (deficits > 0) & (dists > 0)
        theta = NAN
        constant = NAN
        final_rung_ok = False
        if positive.sum() >= 2:
            fit = linregress(np.log(deficits[positive]), np.log(dists[positive]))
            theta = float(fit.slope)
            constant = float(math.exp(fit.intercept))
            first, last = np.flatnonzero(positive)[[0, -1]]
            final_rung_ok = bool(
                dists[last] <= FINAL_RUNG_FACTOR * dists[first] * deficits[last] / deficits[first]
            )
        low, high = LAMBDA_BRACKET
        lams = [r.lam for r in rows]
        monotone = rho_deficit >= SPEARMAN_THRESHOLD and rho_dist >= SPEARMAN_THRESHOLD
        trends.append(dict(
            C=constant,
            family=family,
            final_rung_ok=final_rung_ok,
            lambda_bracket_ok=bool(all(low <= lam <= high for lam in lams)),
            monotone=bool(monotone),
            n=n,
            p=p,
            passed=bool(monotone and final_rung_ok),
            perturbation=perturbation,
            rungs=len(rows),
            spearman_deficit=rho_deficit,
            spearman_dist=rho_dist,
            theta=theta,
        ))
    return trends
