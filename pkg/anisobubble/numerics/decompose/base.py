from anisobubble.numerics.quadrature.fields import as_field
from sklearn import base


class BaseEstimator(base.BaseEstimator):
    """
    Estimators over fields: X is a Field (or an analytic function together with a rule
    passed as keyword) and fitted state lives in attributes with a trailing underscore.
    """

    def fit(self, X, y=None):
        return self

    def fit_transform(self, X, y=None):
        self.fit(X, y)
        return self.transform(X)

    def transform(self, X, **kwargs):
        return X

    def _as_field(self, X, rule=None, order=1):
        return as_field(X, rule, order=order)

    def _require_fitted(self, *attributes):
        for attribute in attributes:
            if getattr(self, attribute, None) is None:
                raise ValueError(f'{type(self).__name__} has not been fitted yet.')
