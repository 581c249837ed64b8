"""scikit-learn style wrappers around the classification and allocation core.

Both estimators take pursuers as an ``(n, 3)`` array of rows ``[x, y, speed]``.
Neither learns anything from data. ``fit`` validates its input and records
the result for the fitted configuration, and ``predict`` recomputes it for
whatever pursuer array it is given.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, ClusterMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .allocation import MpmeSnapshot, a2_run, current_shortest_time
from .classification import MpseSnapshot, Player, classify_all, PursuerStatus
from .geometry import GEOM_TOL


def _players(X, prefix="P"):
    X = check_array(X, dtype=np.float64, ensure_min_samples=1)
    if X.shape[1] != 3:
        raise ValueError(f"expected rows [x, y, speed], got {X.shape[1]} column(s)")
    return X, tuple(Player(i, (float(r[0]), float(r[1])), float(r[2])) for i, r in enumerate(X))


class ActivePursuerClassifier(ClassifierMixin, BaseEstimator):
    """Label each pursuer active (True) or redundant (False) against one evader.

    Parameters
    ----------
    evader_position : pair of floats
    evader_speed : float
        Must be below every pursuer speed.
    tol : float
        Geometric tolerance passed to the classifier.
    """

    def __init__(self, evader_position=(0.0, 0.0), evader_speed=0.5, tol=GEOM_TOL):
        self.evader_position = evader_position
        self.evader_speed = evader_speed
        self.tol = tol

    def _snapshot(self, X):
        X, players = _players(X)
        evader = Player("E", tuple(map(float, self.evader_position)), float(self.evader_speed))
        return X, MpseSnapshot(players, evader)

    def fit(self, X, y=None):
        X, snap = self._snapshot(X)
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([False, True])
        self.status_ = classify_all(snap, self.tol)
        return self

    def predict(self, X):
        check_is_fitted(self, "status_")
        _, snap = self._snapshot(X)
        status = classify_all(snap, self.tol)
        return np.array([status[i] is PursuerStatus.ACTIVE for i in range(len(status))])


class ApolloniusAllocator(ClusterMixin, BaseEstimator):
    """Assign pursuers to evaders with A2.

    ``labels_`` holds, for each pursuer row, the index of its evader in
    ``evaders`` or -1 when the pursuer is left unassigned.
    """

    def __init__(self, evaders=((0.0, 0.0, 0.5),), tol=GEOM_TOL, max_iter=None):
        self.evaders = evaders
        self.tol = tol
        self.max_iter = max_iter

    def _snapshot(self, X):
        X, pursuers = _players(X)
        E = check_array(self.evaders, dtype=np.float64, ensure_min_samples=1)
        if E.shape[1] != 3:
            raise ValueError("evaders must be rows [x, y, speed]")
        evaders = tuple(Player(j, (float(r[0]), float(r[1])), float(r[2]))
                        for j, r in enumerate(E))
        return X, MpmeSnapshot(pursuers, evaders)

    def _labels(self, result, n):
        return np.array([-1 if (j := result.final.target_of(i)) is None else j for i in range(n)])

    def fit(self, X, y=None):
        X, snap = self._snapshot(X)
        self.n_features_in_ = X.shape[1]
        result = a2_run(snap, self.tol, self.max_iter)
        self.allocation_ = result.final
        self.n_iter_ = result.passes
        self.labels_ = self._labels(result, X.shape[0])
        cst = current_shortest_time(snap)
        self.cst_ = cst.t_s
        self.cst_pair_ = cst.pair
        return self

    def predict(self, X):
        check_is_fitted(self, "labels_")
        X, snap = self._snapshot(X)
        return self._labels(a2_run(snap, self.tol, self.max_iter), X.shape[0])
