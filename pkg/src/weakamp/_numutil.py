"""Small numerical helpers used by several modules."""

import numpy as np

TWO_PI = 2.0 * np.pi


def trapezoid(y: np.ndarray, x: np.ndarray) -> float:
    """Composite trapezoid integral of samples y over abscissae x."""
    return float(np.trapezoid(y, x))


def wrap_angle(angle: float) -> float:
    """Wrap an angle to the interval (-pi, pi]."""
    wrapped = float(np.remainder(angle + np.pi, TWO_PI))
    if wrapped == 0.0:
        # remainder maps odd multiples of pi to 0; they belong at +pi
        return np.pi
    return wrapped - np.pi
