from anisobubble.numerics.errors import NonFiniteIntegrandError
from anisobubble.numerics.quadrature.constants import ERROR_FLOOR_FACTOR
from anisobubble.numerics.quadrature.fields import Field
from anisobubble.numerics.shared.array import batch
from anisobubble.numerics.shared.constants import BLOCK_SIZE
from anisobubble.numerics.shared.multi import evaluate_in_blocks
import math
import numpy as np


def weighted_sum(weights, values):
    """
    Sum of weights * values accumulated per fixed-size block with math.fsum, then
    reduced over blocks in index order. The result does not depend on scheduling.
    """
    products = np.asarray(weights) * np.asarray(values)
    return math.fsum(math.fsum(block.tolist()) for block in batch(products, BLOCK_SIZE))


def _resolve(rule, f, exclude):
    if isinstance(f, Field):
        if len(f) != len(rule):
            raise ValueError(f'The field has {len(f)} values but the rule has {len(rule)} nodes.')
        function = f.function.value if f.function is not None else None
        return f.values, function, f.excluded_nodes if exclude is None else exclude
    if callable(f):
        return evaluate_in_blocks(f, rule.nodes, BLOCK_SIZE), f, exclude
    values = np.asarray(f, dtype=float)
    if np.ndim(values) == 0:
        values = np.full(len(rule), float(values))
    if values.shape != (len(rule),):
        raise ValueError(f'Integrand values of shape {values.shape} do not match {len(rule)} nodes.')
    return values, None, exclude


def integrate(rule, f, exclude=None):
    """
    Integrates f over the rule.

    Args:
        rule: QuadratureRule.
        f: Field on the rule, a vectorized callable on (N, n) arrays, or node values.
        exclude: node indices (or boolean mask) given zero weight. Defaults to the
            field's excluded nodes.

    Returns:
        (value, err_estimate)
    """
    values, function, exclude = _resolve(rule, f, exclude)
    values = np.array(values, dtype=float)
    weights = rule.weights
    coarse = rule.coarse_weights
    excluded = np.zeros(len(rule), dtype=bool)
    if exclude is not None and len(exclude):
        exclude = np.asarray(exclude)
        if exclude.dtype == bool:
            excluded = exclude
        else:
            excluded[exclude] = True
        values[excluded] = 0.0
        weights = np.where(excluded, 0.0, weights)
        if coarse is not None:
            coarse = np.where(excluded, 0.0, coarse)

    bad = np.flatnonzero(~np.isfinite(values))
    if len(bad):
        raise NonFiniteIntegrandError(bad[0], values[bad[0]])

    value = weighted_sum(weights, values)
    floor = ERROR_FLOOR_FACTOR * np.finfo(float).eps * weighted_sum(np.abs(weights), np.abs(values))

    if coarse is not None:
        error = abs(value - weighted_sum(coarse, values))
    elif rule.halves:
        half = len(rule) // 2
        first = 2 * weighted_sum(weights[:half], values[:half])
        second = 2 * weighted_sum(weights[half:], values[half:])
        error = abs(first - second) / 2
    else:
        error = _companion_error(rule, function, value)
        if error is None:
            error = _witness_scaled_error(rule, value)
    return value, max(error, floor)


def _companion_error(rule, function, value):
    if rule.companion is None or function is None:
        return None
    companion_values = evaluate_in_blocks(function, rule.companion.nodes, BLOCK_SIZE)
    if not np.all(np.isfinite(companion_values)):
        return None
    return abs(value - weighted_sum(rule.companion.weights, companion_values))


def _witness_scaled_error(rule, value):
    if not rule.witness:
        return 0.0
    relative = max(
        rule.witness['relative_error'],
        rule.witness['error_estimate'] / abs(rule.witness['exact']),
    )
    return relative * abs(value)
