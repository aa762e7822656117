from anisobubble.numerics.decompose.constants import (
    XI_P_DIMENSION,
    XI_P_DRAWS,
    XI_P_EXPONENTS,
    XI_P_MAX_TERMS,
)
from anisobubble.numerics.quadrature.fields import Field, as_field
from anisobubble.numerics.quadrature.integrate import integrate
from anisobubble.numerics.shared.constants import DEFAULT_SEED
from anisobubble.numerics.shared.logger import timer
import numpy as np


def xi_p_constant(p, k):
    """
    C_{p,k} by the recursion C_{p,2} = max(1 + p (2^{max(1, p-1)} - 1), 2p + 1) and
    C_{p,k+1} = C_{p,k} + (k^{(p-2)_+} + 1) C_{p,2}. C_{p,1} = 0.
    """
    if not p > 1:
        raise ValueError(f'The exponent p specified \'{p}\' is not supported.')
    if int(k) != k or k < 1:
        raise ValueError(f'The number of terms specified \'{k}\' is not supported.')
    if k == 1:
        return 0.0
    base = max(1 - p * (1 - 2 ** max(1.0, p - 1)), 2 * p + 1)
    constant = base
    for j in range(2, int(k)):
        constant += (j ** max(p - 2, 0.0) + 1) * base
    return float(constant)


def _xi_p_sides(xs, p):
    """
    Vectorized over a leading batch axis: xs has shape (..., k, n).
    """
    k = xs.shape[-2]
    sizes = np.linalg.norm(xs, axis=-1)
    lhs = np.abs(np.linalg.norm(xs.sum(axis=-2), axis=-1) ** p - np.sum(sizes ** p, axis=-1))
    cross = np.sum(sizes ** (p - 1), axis=-1) * np.sum(sizes, axis=-1) - np.sum(sizes ** p, axis=-1)
    return lhs, xi_p_constant(p, k) * cross


def xi_p_gap(xs, p):
    """
    lhs = ||sum x_i|^p - sum |x_i|^p| and rhs_bound = C_{p,k} sum_i sum_{j != i} |x_i|^{p-1} |x_j|.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    lhs, rhs = _xi_p_sides(xs, p)
    return float(lhs), float(max(rhs, 0.0))


def xi_p_property_run(
    draws=XI_P_DRAWS,
    seed=DEFAULT_SEED,
    exponents=XI_P_EXPONENTS,
    max_terms=XI_P_MAX_TERMS,
    dimension=XI_P_DIMENSION,
):
    """
    Brute-force search for violations of lhs <= rhs_bound over seeded random draws.

    Draws are split evenly over every (p, k) with k = 1..max_terms. Vector magnitudes are
    log-uniform over four decades so that both comparable and very unequal terms occur.
    """
    rng = np.random.default_rng(seed)
    cells = [(p, k) for p in exponents for k in range(1, max_terms + 1)]
    per_cell = int(np.ceil(draws / len(cells)))
    violations = 0
    worst = 0.0
    rows = []
    with timer('decompose.xi_p_property_run', tags=dict(draws=draws)):
        for p, k in cells:
            directions = rng.standard_normal((per_cell, k, dimension))
            magnitudes = 10 ** rng.uniform(-2, 2, (per_cell, k, 1))
            xs = directions * magnitudes
            lhs, rhs = _xi_p_sides(xs, p)
            slack = 1e-12 * (np.abs(lhs) + np.abs(rhs))
            bad = lhs > rhs + slack
            with np.errstate(divide='ignore', invalid='ignore'):
                ratio = np.where(rhs > 0, lhs / rhs, 0.0)
            cell_worst = float(np.max(ratio)) if len(ratio) else 0.0
            violations += int(bad.sum())
            worst = max(worst, cell_worst)
            rows.append(dict(
                constant=xi_p_constant(p, k),
                draws=per_cell,
                k=k,
                p=p,
                violations=int(bad.sum()),
                worst_ratio=cell_worst,
            ))
    return dict(
        draws=per_cell * len(cells),
        rows=rows,
        violations=violations,
        worst_ratio=worst,
    )


def brezis_lieb_gap(f, g_ladder, exponent, rule=None):
    """
    int ||g_m + f|^q - |g_m|^q - |f|^q| for each g_m of the ladder.

    Each g_m is integrated on rule when given, otherwise on its own rule when it is a
    Field; f is sampled on the same nodes.
    """
    gaps = []
    for g in g_ladder:
        target = rule
        if target is None:
            if isinstance(g, Field):
                target = g.rule
            elif isinstance(f, Field):
                target = f.rule
            else:
                raise ValueError('brezis_lieb_gap needs a rule or Field arguments.')
        g_field = as_field(g, target, order=0)
        f_field = as_field(f, target, order=0)
        exclude = np.union1d(g_field.excluded_nodes, f_field.excluded_nodes)
        q = exponent
        values = np.abs(
            np.abs(g_field.values + f_field.values) ** q
            - np.abs(g_field.values) ** q
            - np.abs(f_field.values) ** q
        )
        value, _ = integrate(target, values, exclude=exclude)
        gaps.append(value)
    return gaps
