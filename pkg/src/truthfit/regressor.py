"""Scikit-learn facade over the closed-form penalized two-point fit."""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .estimator import PenaltyParams, Sample
from .estimator import fit as closed_form_fit


class PenalizedTwoPointRegressor(RegressorMixin, BaseEstimator):
    """Penalized regression on one binary regressor with balanced groups.

    c0 is the fixed charge for including the regressor, c1 the charge per
    unit of absolute slope.  After fit, coef_[0] holds the (possibly
    shrunk) slope, exactly zero when the regressor is not selected, and
    included_ records the selection decision.  The design must contain a
    single 0/1 feature with the same number of rows in each group; that
    is the regime the closed form solves.
    """

    def __init__(self, c0: float = 0.0, c1: float = 0.0):
        self.c0 = c0
        self.c1 = c1

    def fit(self, X, y):
        X, y = validate_data(self, X, y, y_numeric=True)
        x = self._binary_column(X)
        mask = x == 1.0
        n1 = int(mask.sum())
        n0 = x.shape[0] - n1
        if n0 == 0 or n1 == 0:
            raise ValueError("need observations at both x=0 and x=1")
        if n0 != n1:
            raise ValueError(
                f"groups must be balanced, got {n0} rows at x=0 and {n1} at x=1"
            )
        sample = Sample(
            ybar0=float(y[~mask].mean()), ybar1=float(y[mask].mean()), n=n1
        )
        est = closed_form_fit(sample, PenaltyParams(c0=self.c0, c1=self.c1))
        self.estimate_ = est
        self.intercept_ = est.b0
        self.coef_ = np.array([est.b1])
        self.included_ = est.included
        return self

    def predict(self, X):
        check_is_fitted(self)
        X = validate_data(self, X, reset=False)
        x = self._binary_column(X)
        return self.intercept_ + self.coef_[0] * x

    @staticmethod
    def _binary_column(X):
        if X.shape[1] != 1:
            raise ValueError(f"expected exactly one feature, got {X.shape[1]}")
        x = X[:, 0]
        if not np.isin(x, (0.0, 1.0)).all():
            raise ValueError("the single feature must be binary (0/1)")
        return x
