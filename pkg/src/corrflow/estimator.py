"""scikit-learn compatible wrapper around the free-evolution engine."""
import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .evolution import check_predicted_extent, free_propagate
from .grid import LEAK_THRESHOLD, NYQUIST_THRESHOLD, Grid, PhysicalConstants
from .observables import CSV_FIELDS, moments
from .oracle import MomentLaw, correlation_at, waist_time, x2_at
from .states import check_guards
from .validation import check_times, check_wavefunction

MOMENT_COLUMNS = CSV_FIELDS[1:-1]


class FreeParticleMoments(TransformerMixin, BaseEstimator):
    """Moments of a freely evolving wavepacket.

    ``fit`` takes the initial state (a :class:`~corrflow.grid.WaveFunction`
    or amplitudes sampled on ``[x_min, x_max)``); ``transform`` maps sample
    times to rows of moments (columns in :data:`MOMENT_COLUMNS`);
    ``predict`` returns the closed-form correlation at those times.

    Parameters
    ----------
    x_min, x_max : float
        Box used to interpret raw amplitude arrays.
    hbar, mass : float
        Physical constants.
    centered : bool
        Predict the covariance ``<C> - <X><P>`` instead of the raw ``<C>``.
    check_extent : bool
        Refuse times at which the packet is predicted to outgrow the box.
    """

    def __init__(self, x_min=-20.0, x_max=20.0, hbar=1.0, mass=1.0, centered=False,
                 check_extent=True, leak_threshold=LEAK_THRESHOLD, nyquist_threshold=NYQUIST_THRESHOLD):
        self.x_min = x_min
        self.x_max = x_max
        self.hbar = hbar
        self.mass = mass
        self.centered = centered
        self.check_extent = check_extent
        self.leak_threshold = leak_threshold
        self.nyquist_threshold = nyquist_threshold

    def fit(self, X, y=None):
        grid = None
        if not hasattr(X, "grid"):
            grid = Grid(len(np.ravel(X)), self.x_min, self.x_max)
        psi = check_wavefunction(X, grid)
        check_guards(psi, "initial state", self.leak_threshold, self.nyquist_threshold)
        self.consts_ = PhysicalConstants(self.hbar, self.mass)
        self.psi_ = psi
        self.grid_ = psi.grid
        self.moments_ = moments(psi, self.consts_)
        self.law_ = MomentLaw.from_moments(self.moments_, self.consts_, centered=self.centered)
        self.waist_ = waist_time(MomentLaw.from_moments(self.moments_, self.consts_, centered=True))
        return self

    def _evolve(self, t):
        if self.check_extent:
            check_predicted_extent(self.psi_, t, self.consts_)
        return free_propagate(self.psi_, t, self.consts_, check=False)

    def transform(self, T):
        check_is_fitted(self, "psi_")
        rows = []
        for t in check_times(T):
            ms = moments(self._evolve(t), self.consts_, t, self.leak_threshold, self.nyquist_threshold)
            rows.append([getattr(ms, name) for name in MOMENT_COLUMNS])
        return np.array(rows)

    def fit_transform(self, X, y=None, times=(0.0,)):
        """Fit on ``X`` and return the moment rows at ``times``."""
        return self.fit(X, y).transform(times)

    def predict(self, T):
        check_is_fitted(self, "law_")
        return correlation_at(self.law_, check_times(T))

    def predict_width(self, T):
        """Closed-form ``<X^2>`` (or ``var_x`` when ``centered``)."""
        check_is_fitted(self, "law_")
        return x2_at(self.law_, check_times(T))

    def score(self, T, y=None):
        """Negative worst deviation between simulated and predicted correlation."""
        column = "cov_xp" if self.centered else "mean_c"
        simulated = self.transform(T)[:, MOMENT_COLUMNS.index(column)]
        return -float(np.max(np.abs(simulated - self.predict(T))))

    def get_feature_names_out(self, input_features=None):
        return np.array(MOMENT_COLUMNS, dtype=object)
