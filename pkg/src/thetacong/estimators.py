"""scikit-learn style wrappers over the functional API.

Inputs ``X`` are sequences of Gram matrices (or ``Lattice`` objects); a
single Gram matrix is accepted as a batch of one.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .congruence import check_prime, find_congruent_form, grading_tag
from .exceptions import InvalidInput
from .lattice import Lattice, make_lattice
from .lifting import hat_lattice
from .theta import theta_series


def _is_matrix(x) -> bool:
    return (isinstance(x, (list, tuple, np.ndarray)) and len(x) > 0
            and all(isinstance(r, (list, tuple, np.ndarray)) and
                    all(np.isscalar(c) for c in r) for r in x))


def check_gram(X) -> list[Lattice]:
    """Validate ``X`` and return it as a list of lattices."""
    if isinstance(X, Lattice):
        return [X]
    if isinstance(X, np.ndarray) and X.ndim == 2:
        X = [X]
    elif _is_matrix(X):
        X = [X]
    if not isinstance(X, (list, tuple, np.ndarray)):
        raise InvalidInput(f"expected a sequence of Gram matrices, got {type(X).__name__}")
    out = []
    for g in X:
        if isinstance(g, Lattice):
            out.append(g)
            continue
        arr = np.asarray(g)
        if arr.ndim != 2 or arr.dtype.kind not in "iu":
            if arr.dtype.kind == "f" and np.all(arr == np.round(arr)):
                arr = arr.astype(np.int64)
            else:
                raise InvalidInput("Gram matrices must be square integer arrays")
        out.append(make_lattice(tuple(tuple(int(c) for c in r) for r in arr)))
    return out


def _as_array(rows) -> np.ndarray:
    big = any(abs(int(c)) > 2**62 for r in rows for c in r)
    return np.array(rows, dtype=object if big else np.int64)


class ThetaSeriesTransformer(TransformerMixin, BaseEstimator):
    """Map each lattice to its representation numbers ``r(0), ..., r(N)``."""

    def __init__(self, N: int = 20, n_jobs: int = 1, reduce: bool = False):
        self.N = N
        self.n_jobs = n_jobs
        self.reduce = reduce

    def fit(self, X, y=None):
        check_gram(X)
        self.n_coefficients_ = self.N + 1
        return self

    def transform(self, X):
        check_is_fitted(self, "n_coefficients_")
        rows = [theta_series(L, self.N, n_jobs=self.n_jobs, reduce=self.reduce).coeffs
                for L in check_gram(X)]
        return _as_array(rows)


class CongruentFormFinder(TransformerMixin, BaseEstimator):
    """Certificates ``theta_L ≡ f (mod ell)`` for lattices of ``ell``-power level.

    ``transform`` returns the reduced expansions, ``predict`` the grading
    residues ``e(L)/2 mod (ell - 1)``.
    """

    def __init__(self, ell: int = 7, N: Optional[int] = None, n_jobs: int = 1):
        self.ell = ell
        self.N = N
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        check_prime(self.ell)
        self.certificates_ = [find_congruent_form(L, self.ell, self.N, n_jobs=self.n_jobs)
                              for L in check_gram(X)]
        return self

    def _certs(self, X):
        check_is_fitted(self, "certificates_")
        lats = check_gram(X)
        known = {c.lattice.gram: c for c in self.certificates_}
        return [known.get(L.gram) or find_congruent_form(L, self.ell, self.N, n_jobs=self.n_jobs)
                for L in lats]

    def transform(self, X):
        certs = self._certs(X)
        width = min(len(c.reduced) for c in certs)
        return np.array([c.reduced.coeffs[:width] for c in certs], dtype=np.int64)

    def predict(self, X):
        certs = self._certs(X)
        return np.array([grading_tag(c.lattice, self.ell, c).residue for c in certs],
                        dtype=np.int64)


class LatticeLifter(TransformerMixin, BaseEstimator):
    """Lift each lattice to ``(L_hat, sigma)``; ``transform`` returns the Gram matrices."""

    def __init__(self, ell: int = 7):
        self.ell = ell

    def fit(self, X, y=None):
        self.lifts_ = [hat_lattice(L, self.ell) for L in check_gram(X)]
        return self

    def transform(self, X):
        check_is_fitted(self, "lifts_")
        known = {h.lattice.gram: h for h in self.lifts_}
        out = []
        for L in check_gram(X):
            h = known.get(L.gram) or hat_lattice(L, self.ell)
            out.append(np.array(h.hat_lattice.gram, dtype=np.int64))
        return out
