from anisobubble.numerics.quadrature.constants import FieldSource
from anisobubble.numerics.quadrature.functions import Constant, LinearCombination
from anisobubble.numerics.shared.constants import BLOCK_SIZE
from anisobubble.numerics.shared.logger import timer
from anisobubble.numerics.shared.multi import evaluate_in_blocks
import numpy as np


class Field:
    """
    A scalar function sampled on the nodes of a quadrature rule.

    Analytic fields keep a reference to their AnalyticFunction and can refresh
    derivatives or resample on another rule; data fields cannot. Nodes where a
    requested sample is not finite are listed in excluded_nodes and carry zero
    weight in every integral.
    """

    def __init__(
        self,
        rule,
        values,
        gradient_values=None,
        hessian_values=None,
        function=None,
        excluded_nodes=None,
    ):
        size = len(rule)
        values = np.asarray(values, dtype=float)
        if values.shape != (size,):
            raise ValueError(f'Field values of shape {values.shape} do not match {size} nodes.')
        if gradient_values is not None and np.shape(gradient_values) != (size, rule.n):
            raise ValueError('Field gradients do not match the rule.')
        if hessian_values is not None and np.shape(hessian_values) != (size, rule.n, rule.n):
            raise ValueError('Field Hessians do not match the rule.')
        self.rule = rule
        self.values = values
        self.gradient_values = gradient_values
        self.hessian_values = hessian_values
        self.function = function
        self.excluded_nodes = np.unique(
            np.asarray([] if excluded_nodes is None else excluded_nodes, dtype=int),
        )

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return (
            f'Field(source={self.source.value}, size={len(self)}, order={self.order}, '
            f'excluded={len(self.excluded_nodes)})'
        )

    @classmethod
    def sample(cls, rule, function, order=0):
        with timer('quadrature.field_sample', tags=dict(function=type(function).__name__, order=order)):
            values, grads, hessians = evaluate_in_blocks(
                lambda points: function.evaluate(points, order),
                rule.nodes,
                BLOCK_SIZE,
            )
        values = np.atleast_1d(values)
        bad = ~np.isfinite(values)
        if grads is not None:
            bad |= ~np.all(np.isfinite(grads), axis=1)
        if hessians is not None:
            bad |= ~np.all(np.isfinite(hessians), axis=(1, 2))
        return cls(
            rule,
            values,
            gradient_values=grads,
            hessian_values=hessians,
            function=function,
            excluded_nodes=np.flatnonzero(bad),
        )

    @property
    def source(self):
        return FieldSource.ANALYTIC if self.function is not None else FieldSource.DATA

    @property
    def order(self):
        if self.hessian_values is not None:
            return 2
        if self.gradient_values is not None:
            return 1
        return 0

    @property
    def mask(self):
        """
        Boolean array, True at excluded nodes.
        """
        excluded = np.zeros(len(self), dtype=bool)
        excluded[self.excluded_nodes] = True
        return excluded

    def require(self, order):
        if self.order >= order:
            return self
        if self.source == FieldSource.DATA:
            raise ValueError(
                f'The data field carries derivatives up to order {self.order}, {order} is required.'
            )
        return self.refresh(order)

    def refresh(self, order):
        if self.source == FieldSource.DATA:
            raise ValueError('Data fields cannot refresh derivatives.')
        return Field.sample(self.rule, self.function, order)

    def resample(self, rule):
        if self.source == FieldSource.DATA:
            raise ValueError('Data fields cannot be resampled.')
        return Field.sample(rule, self.function, self.order)

    def scaled(self, factor):
        return Field(
            self.rule,
            factor * self.values,
            gradient_values=None if self.gradient_values is None else factor * self.gradient_values,
            hessian_values=None if self.hessian_values is None else factor * self.hessian_values,
            function=None if self.function is None else LinearCombination([(factor, self.function)]),
            excluded_nodes=self.excluded_nodes,
        )

    def to_dict(self):
        return dict(
            excluded=len(self.excluded_nodes),
            function=None if self.function is None else self.function.identifier(),
            order=self.order,
            rule=self.rule.to_dict(),
            size=len(self),
            source=self.source.value,
        )


def as_field(u, rule=None, order=0):
    """
    Coerces a Field, an AnalyticFunction or a constant into a Field carrying derivatives
    up to order.
    Analytic fields are resampled when a different rule is requested.
    """
    if isinstance(u, Field):
        if rule is None or rule is u.rule:
            return u.require(order)
        if u.function is None:
            raise ValueError('A data field cannot be moved to another rule.')
        return Field.sample(rule, u.function, order)
    if rule is None:
        raise ValueError('A quadrature rule is required to sample an analytic function.')
    if np.isscalar(u):
        u = Constant(rule.n, u)
    return Field.sample(rule, u, order)
