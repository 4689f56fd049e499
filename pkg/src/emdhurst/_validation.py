import numpy as np
from sklearn.utils import check_array

from .exceptions import TooShortError


def check_series(X, min_length=1, name="series"):
    """Coerce ``X`` to a finite 1-D float64 array.

    Accepts a :class:`~emdhurst.series_io.TimeSeries`, any 1-D array-like,
    or a single-column 2-D array (the sklearn ``(n_samples, 1)`` layout).
    """
    values = getattr(X, "values", X)
    if hasattr(values, "to_numpy"):
        values = values.to_numpy()
    arr = check_array(
        values,
        ensure_2d=False,
        dtype=np.float64,
        ensure_all_finite=True,
        ensure_min_samples=0,
        input_name=name,
    )
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(
                f"{name} must be 1-D or a single column, got shape {arr.shape}"
            )
        arr = arr[:, 0]
    if arr.shape[0] < min_length:
        raise TooShortError(
            f"{name} has {arr.shape[0]} points, at least {min_length} required"
        )
    return np.ascontiguousarray(arr)


def check_int(value, name, minimum=None):
    if isinstance(value, bool) or int(value) != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if minimum is not None and value < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {value}")
    return value
