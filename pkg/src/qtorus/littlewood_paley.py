"""Dyadic Littlewood-Paley decomposition.

The cutoff ``chi`` equals 1 on ``[0, 1]`` and 0 on ``[2, inf)``, with the smooth
bump quotient in between.  ``phi(xi) = chi(|xi|) - chi(2 |xi|)`` is supported in
the annulus ``1/2 <= |xi| <= 2`` and the dilates ``phi(2^{-k} .)`` telescope to 1
away from the origin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .algebra import QElement
from .multipliers import Symbol, apply

__all__ = [
    "LPProfile",
    "default_profile",
    "shifted_profile",
    "get_profile",
    "PROFILES",
    "block",
    "block_symbol",
    "block_indices",
    "block_coefficients",
]


def _g(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    pos = s > 0
    out[pos] = np.exp(-1.0 / s[pos])
    return out


def _bump_chi(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.where(t <= 1.0, 1.0, 0.0)
    mid = (t > 1.0) & (t < 2.0)
    if np.any(mid):
        a = _g(2.0 - t[mid])
        b = _g(t[mid] - 1.0)
        out[mid] = a / (a + b)
    return out


@dataclass(frozen=True)
class LPProfile:
    """A radial cutoff ``chi`` and the induced annular ``phi``."""

    chi: Callable[[np.ndarray], np.ndarray]
    name: str = "bump"

    def phi(self, xi) -> np.ndarray:
        """``chi(|xi|) - chi(2|xi|)`` for radii ``xi`` (array of nonnegative reals)."""
        r = np.abs(np.asarray(xi, dtype=float))
        return self.chi(r) - self.chi(2.0 * r)


def default_profile() -> LPProfile:
    return LPProfile(_bump_chi, "bump")


def shifted_profile() -> LPProfile:
    """Same bump, transition reparameterized by ``t -> t^2`` on the unit gap."""

    def chi(t):
        t = np.asarray(t, dtype=float)
        s = np.clip(t - 1.0, 0.0, None)
        return np.where(t <= 1.0, 1.0, _bump_chi(1.0 + s * s))

    return LPProfile(chi, "bump-shifted")


PROFILES = {"bump": default_profile, "bump-shifted": shifted_profile}


def get_profile(profile: LPProfile | str | None) -> LPProfile:
    if profile is None:
        return default_profile()
    if isinstance(profile, LPProfile):
        return profile
    try:
        return PROFILES[profile]()
    except KeyError:
        raise ValueError(f"unknown profile {profile!r}; choose from {sorted(PROFILES)}") from None


def _radius(f: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.asarray(f, dtype=float) ** 2, axis=-1))


def block_symbol(k: int, profile: LPProfile | str | None = None) -> Symbol:
    if k < 0:
        raise ValueError("block index must be >= 0")
    prof = get_profile(profile)
    scale = 2.0 ** (-k)
    return Symbol(lambda f: prof.phi(scale * _radius(f)), f"phi_{k}[{prof.name}]")


def block(x: QElement, k: int, profile: LPProfile | str | None = None) -> QElement:
    """``sum_m phi(2^{-k} m) x(m) U^m``."""
    return apply(block_symbol(k, profile), x)


def block_indices(x: QElement, profile: LPProfile | str | None = None) -> range:
    """Smallest range of ``k >= 0`` outside which every block of ``x`` vanishes."""
    prof = get_profile(profile)
    r = _radius(x.freqs)
    r = r[r > 0]
    if r.size == 0:
        return range(0)
    top = int(math.ceil(math.log2(r.max()))) + 2
    ks = [k for k in range(top + 1) if np.any(prof.phi(r * 2.0 ** (-k)) != 0)]
    if not ks:
        return range(0)
    return range(ks[0], ks[-1] + 1)


def block_coefficients(x: QElement, profile: LPProfile | str | None = None):
    """``(ks, table)`` where ``table[i, j] = phi(2^{-ks[i]} m_j)`` on the support."""
    prof = get_profile(profile)
    ks = list(block_indices(x, prof))
    r = _radius(x.freqs)
    table = np.array([prof.phi(r * 2.0 ** (-k)) for k in ks]).reshape(len(ks), r.size)
    return ks, table
