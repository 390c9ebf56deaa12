"""Equivalent ISI filter of the linear cellular array.

A cell at offset ``l`` from a base station reaches it with amplitude gain
``alpha_l``, ``l = -l1..l2``. Seen along the array this is an LTI filter with
frequency response ``H(f) = sum_l alpha_l exp(-2j*pi*l*f)``; the rate formulas
only need ``S(f) = |H(f)|**2`` through two integrals over ``f in [0, 1]``:

    log_integral(x)       = int log2(1 + x S(f)) df
    resolvent_integral(x) = int 1 / (1 + x S(f)) df

Two-tap (soft-handoff) profiles have closed forms for both; everything else
goes through a composite Gauss-Legendre rule.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "ChannelProfile",
    "psd",
    "log_integral",
    "resolvent_integral",
    "quadrature_nodes",
]

QUAD_ORDER = 64
QUAD_PANELS = 64


@dataclass(frozen=True)
class ChannelProfile:
    """Inter-cell path gains ``alpha_{-l1}, ..., alpha_{l2}``.

    Parameters
    ----------
    l1 : int
        Number of interfering cells on one side.
    l2 : int
        Number of interfering cells on the other side.
    taps : tuple of complex
        ``l1 + l2 + 1`` gains ordered from ``l = -l1`` up to ``l = l2``.
    """

    l1: int
    l2: int
    taps: tuple

    def __post_init__(self):
        if int(self.l1) != self.l1 or int(self.l2) != self.l2 or self.l1 < 0 or self.l2 < 0:
            raise ValueError(f"l1, l2 must be nonnegative integers, got {self.l1}, {self.l2}")
        taps = tuple(complex(t) for t in self.taps)
        if len(taps) != self.l1 + self.l2 + 1:
            raise ValueError(
                f"expected {self.l1 + self.l2 + 1} taps for l1={self.l1}, l2={self.l2}, "
                f"got {len(taps)}"
            )
        if not all(np.isfinite(t) for t in taps):
            raise ValueError("taps must be finite")
        if all(t == 0 for t in taps):
            raise ValueError("at least one tap must be nonzero")
        object.__setattr__(self, "l1", int(self.l1))
        object.__setattr__(self, "l2", int(self.l2))
        object.__setattr__(self, "taps", taps)

    @classmethod
    def sho(cls, alpha0, alpha1):
        """Soft-handoff profile: own cell ``alpha0`` plus one neighbour ``alpha1``."""
        return cls(0, 1, (alpha0, alpha1))

    @classmethod
    def flat(cls, alpha0=1.0):
        return cls(0, 0, (alpha0,))

    @property
    def offsets(self):
        return np.arange(-self.l1, self.l2 + 1)

    @property
    def width(self):
        """Number of taps, ``l1 + l2 + 1``."""
        return self.l1 + self.l2 + 1

    def tap(self, l):
        """Gain ``alpha_l``; zero outside ``-l1..l2``."""
        if -self.l1 <= l <= self.l2:
            return self.taps[l + self.l1]
        return 0j

    def is_sho(self):
        return (self.l1, self.l2) in ((0, 1), (1, 0))

    def energy(self):
        """``sum_l |alpha_l|^2``, the mean of ``S(f)`` over a period."""
        return float(sum(abs(t) ** 2 for t in self.taps))

    def with_tap(self, l, value):
        taps = list(self.taps)
        taps[l + self.l1] = value
        return ChannelProfile(self.l1, self.l2, tuple(taps))

    def conjugate(self):
        return ChannelProfile(self.l1, self.l2, tuple(t.conjugate() for t in self.taps))

    def reversed(self):
        return ChannelProfile(self.l2, self.l1, tuple(reversed(self.taps)))


def psd(profile, f):
    """Filter output PSD ``S(f) = |sum_l alpha_l exp(-2j pi l f)|^2``.

    Accepts a scalar or an array of frequencies; returns the same shape.
    """
    f = np.asarray(f, dtype=float)
    taps = np.asarray(profile.taps)
    phase = np.exp(-2j * np.pi * np.multiply.outer(f, profile.offsets))
    h = phase @ taps
    s = h.real ** 2 + h.imag ** 2
    return float(s) if s.ndim == 0 else s


@lru_cache(maxsize=None)
def quadrature_nodes(order=QUAD_ORDER, panels=QUAD_PANELS):
    """Composite Gauss-Legendre nodes and weights on ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=256)
def _psd_at_nodes(profile):
    nodes, _ = quadrature_nodes()
    s = psd(profile, nodes)
    s.setflags(write=False)
    return s


def _sho_ab(profile, x):
    m0, m1 = (abs(t) for t in profile.taps)
    a = 1.0 + x * (m0 * m0 + m1 * m1)
    b = 2.0 * x * m0 * m1
    return a, b


def _sho_root(a, b):
    # sqrt(a^2 - b^2) without cancellation; a >= b >= 0 always holds here
    return np.sqrt((a - b) * (a + b))


def _resolve_method(profile, method):
    if method == "auto":
        return "closed" if profile.is_sho() else "quadrature"
    if method == "closed" and not profile.is_sho():
        raise ValueError("closed form only exists for two-tap profiles")
    if method not in ("closed", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    return method


def log_integral(profile, x, method="auto"):
    """``int_0^1 log2(1 + x S(f)) df`` in bits.

    ``method`` is ``"auto"`` (closed form for two-tap profiles), ``"closed"``
    or ``"quadrature"``.
    """
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0:
        return 0.0
    if _resolve_method(profile, method) == "closed":
        a, b = _sho_ab(profile, x)
        return float(np.log2(0.5 * (a + _sho_root(a, b))))
    _, weights = quadrature_nodes()
    return float(weights @ np.log1p(x * _psd_at_nodes(profile)) / np.log(2.0))


def resolvent_integral(profile, x, method="auto"):
    """``int_0^1 1 / (1 + x S(f)) df``; equals 1 at ``x = 0``."""
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0:
        return 1.0
    if _resolve_method(profile, method) == "closed":
        a, b = _sho_ab(profile, x)
        return float(1.0 / _sho_root(a, b))
    _, weights = quadrature_nodes()
    return float(weights @ (1.0 / (1.0 + x * _psd_at_nodes(profile))))
