from anisobubble.cli.config import command_config, matrix_cells, norm_for
from anisobubble.cli.constants import Subcommand
from anisobubble.numerics.anisotropy.ellipticity import (
    cph_constant,
    ellipticity_constants,
    norm_equivalence_constants,
)
from anisobubble.numerics.anisotropy.norms import EuclideanNorm
from anisobubble.numerics.anisotropy.operations import dual_norm, eval_norm_with_derivatives
from anisobubble.numerics.bubbles.bubble import Bubble, bubble_rule
from anisobubble.numerics.bubbles.constants import critical_exponent
from anisobubble.numerics.bubbles.energies import bubble_energies, sobolev_constant_closed_form
from anisobubble.numerics.bubbles.residual import weak_residual_terms
from anisobubble.numerics.bubbles.transforms import TransformParams, apply_transform
from anisobubble.numerics.decompose.greedy import greedy_decompose
from anisobubble.numerics.decompose.inequalities import brezis_lieb_gap, xi_p_property_run
from anisobubble.numerics.decompose.interaction import cross_energy, interaction_quantity, pair_rule
from anisobubble.numerics.functionals.kappa import KappaFunction
from anisobubble.numerics.pfunction.checks import (
    check_diff_identity,
    check_gradP,
    check_integral_identity,
    check_integral_inequality,
    classify,
)
from anisobubble.numerics.pfunction.constants import (
    DIFF_IDENTITY_TOLERANCE,
    GRADP_TOLERANCE,
    INTEGRAL_IDENTITY_TOLERANCE,
    INTEGRAL_INEQUALITY_TOLERANCE,
    PFunctionCheck,
)
from anisobubble.numerics.pfunction.frame import VTransformFunction, build_pframe, pfunction_values
from anisobubble.numerics.quadrature.fields import Field
from anisobubble.numerics.quadrature.functions import Bump, Gaussian
from anisobubble.numerics.quadrature.rules import support_rule
from anisobubble.numerics.shared.utils import sample_unit_vectors
from anisobubble.numerics.stability.approximants import proof_bubble_report, proof_scale
from anisobubble.numerics.stability.constants import STABILITY_COLUMNS
from anisobubble.numerics.stability.radial_solver import pohozaev_bracket, radial_shoot
from anisobubble.numerics.stability.sweep import RadialKappa, stability_sweep, sweep_trend
from dataclasses import dataclass, field
from typing import List, Optional
import logging
import math
import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    summary: dict
    rows: list
    passed: bool
    columns: Optional[List[str]] = None
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return dict(self.summary, details=self.details, **{'pass': self.passed})


def _axis(n, value):
    x = np.zeros(n)
    x[0] = value
    return x


def _rule_params(config):
    return dict((k, v) for k, v in (config.get('quadrature') or {}).items() if k != 'kind')


def _cells(config, section):
    cells = section.get('cells')
    if cells is None:
        return matrix_cells(config)
    return [(int(n), float(p)) for n, p in cells]


def verify_norm(config, section):
    """
    H_0(grad H(xi)) = 1 on random xi, with the ellipticity constants and c_{p,H} per cell.
    """
    rows = []
    seed = config['seed']
    for n, p in matrix_cells(config):
        norm = norm_for(config, n)
        rng = np.random.default_rng(seed)
        xi = rng.standard_normal((section['samples'], n))
        gradients = np.array([eval_norm_with_derivatives(norm, x)[1] for x in xi])
        dual = np.array([dual_norm(norm, g)[0] for g in gradients])
        defect = float(np.max(np.abs(dual - 1)))
        est = ellipticity_constants(norm, samples=section['samples'], seed=seed)
        c_h, C_h = norm_equivalence_constants(norm, samples=section['samples'], seed=seed)
        rows.append(dict(
            n=n,
            p=p,
            family=norm.family.value,
            max_dual_defect=defect,
            lambda_H=est.lambda_H,
            Lambda_H=est.Lambda_H,
            c_H=c_h,
            C_H=C_h,
            cph=cph_constant(p, est),
            passed=defect <= section['dual_tolerance'],
        ))
    return CommandResult(
        summary=dict(max_dual_defect=max(r['max_dual_defect'] for r in rows)),
        rows=rows,
        passed=all(r['passed'] for r in rows),
    )


def bubble_energy(config, section):
    """
    int H^p(grad U) = int U^{p*} = S_p^n per cell, and invariance under T_{z,lam}.
    """
    rows = []
    params = _rule_params(config)
    transform = section['transform']
    for n, p in matrix_cells(config):
        norm = norm_for(config, n)
        bubble = Bubble(norm, p, np.zeros(n), section['lam'])
        energies = bubble_energies(bubble, bubble_rule(bubble, **params))
        t = TransformParams(_axis(n, transform['shift']), transform['lam'])
        moved = apply_transform(t, bubble)
        moved_energies = bubble_energies(moved, bubble_rule(moved, **params))
        closed_form = sobolev_constant_closed_form(norm, p) ** n
        relative_gap = energies.gap / energies.mass
        invariance_gap = abs(moved_energies.grad_energy - energies.grad_energy) / energies.grad_energy
        rows.append(dict(
            n=n,
            p=p,
            family=norm.family.value,
            grad_energy=energies.grad_energy,
            mass=energies.mass,
            closed_form=closed_form,
            closed_form_gap=abs(energies.grad_energy - closed_form) / closed_form,
            relative_gap=relative_gap,
            invariance_gap=invariance_gap,
            passed=bool(
                relative_gap <= section['tolerance']
                and invariance_gap <= section['invariance_tolerance']
            ),
        ))
    return CommandResult(summary=dict(cells=len(rows)), rows=rows, passed=all(r['passed'] for r in rows))


def residual(config, section):
    """
    |<J'(U), phi>| / ||phi|| for random bumps phi and kappa = 1.
    """
    rows = []
    for n, p in matrix_cells(config):
        norm = norm_for(config, n)
        bubble = Bubble(norm, p, np.zeros(n), 1.0)
        rng = np.random.default_rng(config['seed'])
        centers = rng.standard_normal((section['bumps'], n)) * section['spread']
        worst = 0.0
        for index, center in enumerate(centers):
            phi = Bump(center, section['radius'])
            terms = weak_residual_terms(bubble.function(), 1.0, phi, p, norm, rule=support_rule(phi))
            worst = max(worst, terms.relative)
            rows.append(dict(
                n=n,
                p=p,
                family=norm.family.value,
                bump=index,
                residual=terms.residual,
                relative=terms.relative,
                passed=terms.relative <= section['tolerance'],
            ))
        logger.debug(f'residual: n={n} p={p} worst relative residual {worst:.3e}')
    return CommandResult(
        summary=dict(max_relative=max(r['relative'] for r in rows)),
        rows=rows,
        passed=all(r['passed'] for r in rows),
    )


PFUNCTION_TOLERANCES = {
    PFunctionCheck.DIFF_IDENTITY: DIFF_IDENTITY_TOLERANCE,
    PFunctionCheck.GRADP: GRADP_TOLERANCE,
    PFunctionCheck.INTEGRAL_IDENTITY: INTEGRAL_IDENTITY_TOLERANCE,
    PFunctionCheck.INTEGRAL_INEQUALITY: INTEGRAL_INEQUALITY_TOLERANCE,
}


def _pfunction_inputs(n, p, norm, section):
    bubble = Bubble(norm, p, np.zeros(n), 1.0)
    bump = section['bump']
    perturbed = bubble.function() + section['eps'] * Bump(_axis(n, bump['offset']), bump['radius'])
    return bubble, [('bubble', bubble.function()), ('perturbed', perturbed)]


def _sample_points(n, section, seed):
    rng = np.random.default_rng(seed)
    directions = sample_unit_vectors(rng, section['points'], n)
    radii = rng.uniform(0.2, section['sample_radius'], (section['points'], 1))
    return directions * radii


def pfunction_check(config, section, variant):
    variant = PFunctionCheck(variant)
    tolerance = section.get('tolerance')
    if tolerance is None:
        tolerance = PFUNCTION_TOLERANCES[variant] * config['tolerance_scale']
    test_bump = section.get('test_function') or dict(offset=1.2, radius=0.6)
    rows = []
    classifications = {}
    for n, p in matrix_cells(config):
        norm = norm_for(config, n)
        bubble, inputs = _pfunction_inputs(n, p, norm, section)
        phi = Bump(_axis(n, test_bump['offset']), test_bump['radius'])
        for label, function in inputs:
            kappa = KappaFunction(function, p, norm)
            reports = []
            if variant == PFunctionCheck.GRADP:
                frame = build_pframe(function, kappa, p, norm, rule=bubble_rule(bubble, **_rule_params(config)))
                reports.append(check_gradP(frame, tolerance))
                classifications[f'n={n},p={p:g},{label}'] = classify(frame)
            elif variant == PFunctionCheck.DIFF_IDENTITY:
                reports.append(check_diff_identity(
                    VTransformFunction(function, p),
                    p,
                    norm,
                    _sample_points(n, section, config['seed']),
                    tolerance,
                ))
            else:
                frame = build_pframe(function, kappa, p, norm, rule=support_rule(phi))
                for t in section['t']:
                    if variant == PFunctionCheck.INTEGRAL_IDENTITY:
                        reports.append(check_integral_identity(frame, phi, t, tolerance))
                    elif t >= 1:
                        reports.append(check_integral_inequality(frame, phi, t, tolerance=tolerance))
            for report in reports:
                rows.append(dict(
                    n=n,
                    p=p,
                    family=norm.family.value,
                    input=label,
                    t=report.params.get('t'),
                    lhs=report.lhs,
                    rhs=report.rhs,
                    gap=report.gap,
                    inconclusive=report.inconclusive,
                    passed=report.passed or report.inconclusive,
                ))
    return CommandResult(
        summary=dict(check=variant.value, inconclusive=sum(r['inconclusive'] for r in rows)),
        rows=rows,
        passed=all(r['passed'] for r in rows),
        details=dict(classification=classifications),
    )


def _match(found, truth):
    """
    Pairs every true bubble with the closest found one in the scaled center distance.
    """
    errors = []
    for b in truth:
        if not found:
            errors.append((math.inf, math.inf))
            continue
        best = min(found, key=lambda f: np.linalg.norm(f.z - b.z) / b.lam + abs(math.log(f.lam / b.lam)))
        errors.append((float(np.linalg.norm(best.z - b.z) / b.lam), abs(math.log(best.lam / b.lam))))
    return errors


def decompose(config, section):
    """
    Recovers well-separated synthetic bubble sums by greedy extraction.
    """
    rows = []
    summaries = []
    for n, p in _cells(config, section):
        norm = norm_for(config, n)
        truth = [
            Bubble(norm, p, _axis(n, index * section['separation']), lam)
            for index, lam in enumerate(section['lams'])
        ]
        function = truth[0].function()
        for b in truth[1:]:
            function = function + b.function()
        rule = pair_rule(truth[0], truth[1]) if len(truth) == 2 else bubble_rule(truth[0])
        u = Field.sample(rule, function, 1)
        result = greedy_decompose(
            u,
            p,
            norm,
            k_max=section['k_max'],
            multistarts=section['multistarts'],
            seed=config['seed'],
        )
        errors = _match(result.bubbles, truth)
        worst = max(max(e) for e in errors)
        additivity_ok = result.energy_additivity_gap <= section['additivity_tolerance'] * result.sobolev_energy
        passed = (
            result.k == len(truth)
            and worst <= section['parameter_tolerance']
            and additivity_ok
        )
        for row in result.to_rows():
            rows.append(dict(n=n, p=p, family=norm.family.value, **row))
        summaries.append(dict(
            additivity_gap=result.energy_additivity_gap,
            interaction=interaction_quantity(truth[0], truth[1]) if len(truth) == 2 else None,
            k=result.k,
            n=n,
            p=p,
            parameter_error=worst,
            passed=bool(passed),
            result=result.to_dict(),
        ))
    return CommandResult(
        summary=dict(cells=len(summaries)),
        rows=rows,
        passed=all(s['passed'] for s in summaries),
        details=dict(cells=summaries),
    )


def interaction(config, section):
    """
    Cross energy of two unit bubbles at distance d; for p = 2 it scales as d^{-(n-2)}.
    """
    n, p = section['n'], section['p']
    norm = norm_for(config, n)
    rows = []
    for d in section['separations']:
        b1 = Bubble(norm, p, np.zeros(n), 1.0)
        b2 = Bubble(norm, p, _axis(n, d), 1.0)
        energy = cross_energy(b1, b2)
        rows.append(dict(
            d=d,
            gradient_product=energy.gradient_product,
            stress_pairing=energy.stress_pairing,
            interaction=energy.interaction,
            implied_constant=energy.implied_constant,
            scaled_pairing=energy.stress_pairing * d ** ((n - p) / (p - 1)),
        ))
    scaled = np.array([r['scaled_pairing'] for r in rows])
    spread = float(scaled.max() / scaled.min() - 1)
    return CommandResult(
        summary=dict(exponent=(n - p) / (p - 1), family=norm.family.value, n=n, p=p, spread=spread),
        rows=rows,
        passed=spread <= section['tolerance'],
    )


def xi_p(config, section):
    result = xi_p_property_run(
        draws=section['draws'],
        seed=config['seed'],
        exponents=section['exponents'],
        max_terms=section['max_terms'],
        dimension=section['dimension'],
    )
    return CommandResult(
        summary=dict(draws=result['draws'], violations=result['violations'], worst_ratio=result['worst_ratio']),
        rows=result['rows'],
        passed=result['violations'] == 0,
    )


def brezis_lieb(config, section):
    """
    Brezis-Lieb splitting for a bubble f and translated bubbles g_m = U[m e_1, 1] that
    converge weakly to zero.
    """
    n, p = section['n'], section['p']
    norm = norm_for(config, n)
    f = Bubble(norm, p, np.zeros(n), 1.0)
    exponent = critical_exponent(n, p)
    rows = []
    for m in section['ladder']:
        g = Bubble(norm, p, _axis(n, m), 1.0)
        gap = brezis_lieb_gap(f.function(), [g.function()], exponent, rule=pair_rule(f, g))[0]
        rows.append(dict(m=m, gap=gap))
    sobolev_energy = sobolev_constant_closed_form(norm, p) ** n
    gaps = [r['gap'] for r in rows]
    decreasing = all(b <= a for a, b in zip(gaps[:-1], gaps[1:]))
    final = gaps[-1] / sobolev_energy
    return CommandResult(
        summary=dict(decreasing=decreasing, final_relative_gap=final, n=n, p=p),
        rows=rows,
        passed=bool(decreasing and final <= section['tolerance']),
    )


def proof_bubble(config, section):
    """
    The proof-driven bubble recovers (z, lam) of a bubble, and on a perturbed bubble its
    lam approaches the value from P(x_0) as the ball shrinks.
    """
    rows = []
    for n, p in matrix_cells(config):
        norm = norm_for(config, n)
        bubble = Bubble(norm, p, _axis(n, section['shift']), section['lam'])
        rule = bubble_rule(bubble, **_rule_params(config))
        report = proof_bubble_report(bubble.function(), p, norm, section['t_ball'], rule)
        center_error = float(np.linalg.norm(report.bubble.z - bubble.z) / bubble.lam)
        scale_error = abs(math.log(report.bubble.lam / bubble.lam))

        perturbed = bubble.function() + 0.01 * Gaussian(bubble.z + _axis(n, 1.0), 1.0)
        shifts = []
        x0 = None
        for t in (section['t_ball'], section['t_ball'] / 2):
            other = proof_bubble_report(perturbed, p, norm, t, rule)
            x0 = other.x0
            shifts.append(other.bubble.lam)
        limit = proof_scale(n, p, float(pfunction_values(perturbed, p, norm, x0[None, :])[0]))
        shifts = [abs(math.log(lam / limit)) for lam in shifts]
        rows.append(dict(
            n=n,
            p=p,
            family=norm.family.value,
            center_error=center_error,
            scale_error=scale_error,
            shift_t=shifts[0],
            shift_half_t=shifts[1],
            trend_ok=shifts[1] <= shifts[0],
            passed=bool(max(center_error, scale_error) <= section['tolerance'] and shifts[1] <= shifts[0]),
        ))
    return CommandResult(summary=dict(cells=len(rows)), rows=rows, passed=all(r['passed'] for r in rows))


def shoot_radial(config, section):
    """
    Radial shooting against the Euclidean bubble with the same value at r = 0.
    """
    rows = []
    kappa = RadialKappa(section['kappa']['eps'], section['kappa']['width'])
    for n, p in _cells(config, section):
        bubble = Bubble(EuclideanNorm(n), p, np.zeros(n), section['lam'])
        profile = radial_shoot(p, n, kappa, bubble.center_value, r_max=section['r_max'])
        points = np.outer(profile.radii, _axis(n, 1.0))
        sup_error = float(np.max(np.abs(profile.values - bubble.function().value(points))))
        bracket = pohozaev_bracket(profile, kappa)
        check = kappa.eps == 0
        rows.append(dict(
            n=n,
            p=p,
            u0=profile.u0,
            status=profile.status.value,
            r_end=profile.r_end,
            sup_error=sup_error,
            pohozaev_defect=bracket['relative_defect'],
            passed=bool(profile.ok and (not check or sup_error <= section['tolerance'])),
        ))
    return CommandResult(summary=dict(kappa=repr(kappa)), rows=rows, passed=all(r['passed'] for r in rows))


def stability(config, section):
    sweep_config = dict(
        section,
        cells=[[n, p] for n, p in _cells(config, section)],
        norm=config['norm'],
        quadrature=_rule_params(config),
        seed=config['seed'],
    )
    records = stability_sweep(sweep_config)
    trends = sweep_trend(records)
    return CommandResult(
        summary=dict(records=len(records), skipped=sum(1 for r in records if r.reason)),
        rows=[r.to_row() for r in records],
        columns=STABILITY_COLUMNS,
        passed=bool(trends) and all(t['passed'] and t['lambda_bracket_ok'] for t in trends),
        details=dict(records=[r.to_dict() for r in records], trends=trends),
    )


COMMANDS = {
    Subcommand.BREZIS_LIEB: brezis_lieb,
    Subcommand.BUBBLE_ENERGY: bubble_energy,
    Subcommand.DECOMPOSE: decompose,
    Subcommand.INTERACTION: interaction,
    Subcommand.PROOF_BUBBLE: proof_bubble,
    Subcommand.RESIDUAL: residual,
    Subcommand.SHOOT_RADIAL: shoot_radial,
    Subcommand.STABILITY_SWEEP: stability,
    Subcommand.VERIFY_NORM: verify_norm,
    Subcommand.XI_P: xi_p,
}


def run_command(subcommand, config, variant=None):
    subcommand = Subcommand(subcommand)
    section = command_config(config, subcommand.value)
    if subcommand == Subcommand.PFUNCTION_CHECK:
        if variant is None:
            raise ValueError('pfunction-check needs a variant.')
        return pfunction_check(config, section, variant)
    return COMMANDS[subcommand](config, section)
