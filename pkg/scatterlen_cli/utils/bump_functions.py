"""Compactly supported test functions chi for smoothed pair correlations"""

import numpy as np

TABLE_POINTS = 4001


def _smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide='ignore', over='ignore'):
        a = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        b = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return a / (a + b)


def _bump(x):
    """exp(-1 / (1 - 4x^2)) on (-1/2, 1/2), zero outside."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 0.5
    out = np.zeros_like(x)
    out[inside] = np.exp(-1.0 / (1.0 - 4.0 * x[inside] ** 2))
    return out


class BumpFunction:
    """
    Non-negative even function supported in [-support, support].

    Subclasses implement ``_profile`` on the unit support [-1, 1]; ``scale``
    stretches the support and ``amplitude`` multiplies the values.
    """
    name = 'chi'

    def __init__(self, scale=1.0, amplitude=1.0):
        if scale <= 0:
            raise ValueError(f"scale must be positive, got {scale}")
        self.scale = float(scale)
        self.amplitude = float(amplitude)

    @property
    def support(self):
        return self.scale

    def _profile(self, u):
        raise NotImplementedError

    def __call__(self, t):
        u = np.abs(np.asarray(t, dtype=float)) / self.scale
        values = np.where(u < 1.0, self._profile(np.minimum(u, 1.0)), 0.0)
        return self.amplitude * values

    def scaled(self, amplitude):
        clone = type(self).__new__(type(self))
        clone.__dict__.update(self.__dict__)
        clone.amplitude = self.amplitude * amplitude
        return clone

    def check_nonnegative(self, samples=2001):
        """Raise ValueError if chi takes negative values on a sampling grid."""
        grid = np.linspace(-self.support, self.support, samples)
        low = float(np.min(self(grid)))
        if low < 0:
            raise ValueError(f"Test function {self.name} takes negative values (min {low:.3g})")

    def __repr__(self):
        return f"{type(self).__name__}(scale={self.scale!r}, amplitude={self.amplitude!r})"


class PlateauBump(BumpFunction):
    """Equal to 1 on |t| <= plateau * scale, smooth decay to 0 at |t| = scale."""
    name = 'plateau'

    def __init__(self, plateau=0.25, scale=1.0, amplitude=1.0):
        super().__init__(scale, amplitude)
        if not 0 <= plateau < 1:
            raise ValueError(f"plateau must lie in [0, 1), got {plateau}")
        self.plateau = float(plateau)

    def _profile(self, u):
        return 1.0 - _smooth_step((u - self.plateau) / (1.0 - self.plateau))


class AutocorrelationBump(BumpFunction):
    """
    Normalized autocorrelation of a C-infinity bump on (-1/2, 1/2).

    Its Fourier transform is the squared modulus of the bump's transform,
    hence non-negative. Values come from a tabulated convolution.
    """
    name = 'autocorrelation'

    def __init__(self, scale=1.0, amplitude=1.0):
        super().__init__(scale, amplitude)
        x = np.linspace(-0.5, 0.5, TABLE_POINTS)
        dx = x[1] - x[0]
        b = _bump(x)
        full = np.convolve(b, b, mode='full') * dx
        lags = (np.arange(len(full)) - (TABLE_POINTS - 1)) * dx
        keep = lags >= 0
        self._lags = lags[keep]
        self._table = full[keep] / full[TABLE_POINTS - 1]

    def _profile(self, u):
        return np.interp(u, self._lags, self._table, right=0.0)


class WindowIndicator(BumpFunction):
    """1 on [-scale, scale] (not smooth; consistency checks of weighted sums)."""
    name = 'indicator'

    def __call__(self, t):
        return self.amplitude * (np.abs(np.asarray(t, dtype=float)) <= self.scale).astype(float)

    def _profile(self, u):
        return np.ones_like(u)


FAMILIES = {
    'plateau': PlateauBump,
    'autocorrelation': AutocorrelationBump,
    'indicator': WindowIndicator,
}


def make_test_function(name, scale=1.0, **kwargs) -> BumpFunction:
    """Build a test function by family name."""
    try:
        family = FAMILIES[name]
    except KeyError:
        raise ValueError(f"Unknown test function {name!r}; choose from {', '.join(sorted(FAMILIES))}")
    return family(scale=scale, **kwargs)


def plateau_width(chi: BumpFunction, level=1.0 - 1e-3, samples=20001) -> float:
    """Largest t with chi(s) >= level * chi(0) for all |s| <= t."""
    grid = np.linspace(0.0, chi.support, samples)
    values = chi(grid)
    below = np.nonzero(values < level * values[0])[0]
    return float(grid[below[0] - 1]) if len(below) else chi.support


def peak(chi: BumpFunction) -> float:
    return float(chi(0.0))
