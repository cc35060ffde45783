"""scikit-learn style transformers turning polygonals into energy features.

Samples are polygonals of varying length, so ``X`` is a sequence of
:class:`Polygonal` objects or vertex arrays rather than a 2-d matrix.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .polyline import Polygonal, polyline_length, rotation, validate_polygonal
from .smoothing import generalized_rotation, kstar_rotation, p_rotation

__all__ = ["check_polygonals", "PRotation"]


def check_polygonals(X, closed: bool = False) -> list[Polygonal]:
    """Validate a batch of polygonals.

    Vertex arrays are converted with ``closed``; :class:`Polygonal` objects
    keep their own flag. Raises ``ValueError`` on an empty batch, on mixed
    ambient dimensions or on any malformed sample.
    """
    if isinstance(X, Polygonal):
        raise ValueError("expected a sequence of polygonals, got a single polygonal")
    if isinstance(X, np.ndarray) and X.ndim == 2:
        raise ValueError("expected a sequence of vertex arrays, got one 2-d array")
    out = []
    for i, item in enumerate(X):
        try:
            out.append(item if isinstance(item, Polygonal) else validate_polygonal(item, closed))
        except ValueError as exc:
            raise ValueError(f"sample {i}: {exc}") from None
    if not out:
        raise ValueError("no polygonals given")
    dims = {P.dimension for P in out}
    if len(dims) > 1:
        raise ValueError(f"mixed ambient dimensions {sorted(dims)}")
    return out


class PRotation(TransformerMixin, BaseEstimator):
    """Map each polygonal to its p-rotation.

    With ``alpha`` non-zero the generalized density is used; ``kind="kstar"``
    gives the sum of theta**p / (r/2)**(p-1). ``extra_features`` appends the
    rotation and the length as further columns.

    >>> square = [[0, 0], [2, 0], [2, 2], [0, 2]]
    >>> round(float(PRotation(p=3, closed=True).fit_transform([square])[0, 0]), 10)
    6.2831853072
    """

    def __init__(self, p: float = 2.0, alpha: float = 0.0, scale: float = 1.0,
                 closed: bool = False, kind: str = "p_rotation", extra_features: bool = False):
        self.p = p
        self.alpha = alpha
        self.scale = scale
        self.closed = closed
        self.kind = kind
        self.extra_features = extra_features

    def _validate_params(self):
        if self.kind not in ("p_rotation", "kstar"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if not self.p >= 1:
            raise ValueError("p must be >= 1")
        if self.alpha != 0 and not self.p > 1:
            raise ValueError("a non-zero alpha needs p > 1")
        if self.alpha < 1 - self.p:
            raise ValueError("alpha must be >= 1 - p")

    def fit(self, X, y=None):
        self._validate_params()
        batch = check_polygonals(X, self.closed)
        self.dimension_ = batch[0].dimension
        self.n_features_out_ = 3 if self.extra_features else 1
        return self

    def _energy(self, P: Polygonal) -> float:
        if self.kind == "kstar":
            return kstar_rotation(P, self.p)
        if self.alpha != 0 or self.scale != 1:
            return generalized_rotation(P, self.p, self.alpha, self.scale)
        return p_rotation(P, self.p)

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "dimension_")
        batch = check_polygonals(X, self.closed)
        if batch[0].dimension != self.dimension_:
            raise ValueError(f"fitted on dimension {self.dimension_}, got {batch[0].dimension}")
        rows = []
        for P in batch:
            row = [self._energy(P)]
            if self.extra_features:
                row += [rotation(P), polyline_length(P)]
            rows.append(row)
        return np.array(rows, dtype=float)

    def get_feature_names_out(self, input_features=None):
        names = [self.kind if self.alpha == 0 else "generalized_rotation"]
        if self.extra_features:
            names += ["rotation", "length"]
        return np.array(names, dtype=object)
