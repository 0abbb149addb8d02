"""scikit-learn style estimators for the empirical ABER → ACC workflow.

Both take a single feature column holding the average SNR in dB and the
measured ABER as target.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .empirical import DEFAULT_ORDER, MeasurementSet, ibp_acc, interpolate_set
from .relationships import ModulationParams


def _snr_column(X):
    if X.shape[1] != 1:
        raise ValueError(f"expected a single feature column (average SNR in dB), got {X.shape[1]}")
    return X[:, 0]


def _fit_set(X, y, stderr, modulation):
    X, y = check_X_y(X, y, dtype=float, y_numeric=True)
    snr_db = _snr_column(X)
    order = np.argsort(snr_db, kind="stable")
    err = None if stderr is None else np.asarray(stderr, dtype=float)[order]
    return MeasurementSet(snr_db[order], y[order], err, modulation=modulation), X.shape[1]


class AberInterpolator(RegressorMixin, BaseEstimator):
    """Piecewise-local Lagrange interpolation of an ABER measurement set.

    Parameters
    ----------
    order : int
        Polynomial degree of each local window.
    """

    def __init__(self, order=DEFAULT_ORDER):
        self.order = order

    def fit(self, X, y, stderr=None):
        self.measurement_set_, self.n_features_in_ = _fit_set(X, y, stderr, None)
        return self

    def predict(self, X):
        check_is_fitted(self, "measurement_set_")
        X = check_array(X, dtype=float)
        return np.atleast_1d(interpolate_set(self.measurement_set_, 10.0 ** (_snr_column(X) / 10.0), self.order))


class IbpCapacityEstimator(BaseEstimator):
    """Interpolation-based prediction of the ACC from measured ABER.

    ``fit`` stores the measurement set; ``predict`` returns the ACC in
    nats at each requested average SNR (dB).
    """

    def __init__(self, a=1.0, b=0.5, order=DEFAULT_ORDER, tol=1e-8):
        self.a = a
        self.b = b
        self.order = order
        self.tol = tol

    def fit(self, X, y, stderr=None):
        modulation = ModulationParams(self.a, self.b)
        self.measurement_set_, self.n_features_in_ = _fit_set(X, y, stderr, modulation)
        return self

    def predict(self, X):
        check_is_fitted(self, "measurement_set_")
        X = check_array(X, dtype=float)
        return np.array(
            [ibp_acc(self.measurement_set_, 10.0 ** (db / 10.0), self.tol, self.order) for db in _snr_column(X)]
        )
