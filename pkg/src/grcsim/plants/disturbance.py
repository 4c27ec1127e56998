"""Deterministic disturbance profiles for the four channels D_1..D_4."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

KINDS = ("none", "constant", "step", "sine", "noise")


@dataclass(frozen=True)
class DisturbanceProfile:
    """Shared time shape scaled per channel by ``magnitude``.

    ``noise`` is a sum of ``tones`` sinusoids with frequencies drawn in
    (0, bandwidth] Hz and weights summing to one, so |D_j| <= |magnitude_j|
    holds by construction.
    """

    kind: str = "none"
    magnitude: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    t_on: float = 0.0
    frequency: float = 1.0
    bandwidth: float = 5.0
    tones: int = 16

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown disturbance kind {self.kind!r}; expected one of {KINDS}")
        mag = tuple(float(m) for m in self.magnitude)
        if len(mag) != 4 or not all(math.isfinite(m) for m in mag):
            raise ValueError("disturbance magnitude needs 4 finite entries")
        object.__setattr__(self, "magnitude", mag)
        if self.t_on < 0 or self.frequency < 0 or self.bandwidth <= 0 or self.tones < 1:
            raise ValueError("invalid disturbance timing parameters")

    def scaled(self, factor: float) -> "DisturbanceProfile":
        return DisturbanceProfile(
            self.kind, tuple(m * factor for m in self.magnitude), self.t_on, self.frequency, self.bandwidth, self.tones
        )


class DisturbanceSource:
    """A profile bound to one or more seeds; call with t to get D of shape (B, 4)."""

    def __init__(self, profile: DisturbanceProfile, seeds):
        self.profile = profile
        self.seeds = np.atleast_1d(np.asarray(seeds, dtype=np.int64))
        self._mag = np.asarray(profile.magnitude)
        if profile.kind == "noise":
            B, n = len(self.seeds), profile.tones
            self._f = np.empty((B, 4, n))
            self._phi = np.empty((B, 4, n))
            self._w = np.empty((B, 4, n))
            for b, seed in enumerate(self.seeds):
                rng = np.random.default_rng(int(seed))
                self._f[b] = rng.uniform(0.0, profile.bandwidth, (4, n))
                self._phi[b] = rng.uniform(0.0, 2 * np.pi, (4, n))
                w = rng.uniform(0.0, 1.0, (4, n))
                self._w[b] = w / w.sum(axis=1, keepdims=True)

    def __call__(self, t: float) -> np.ndarray:
        p = self.profile
        B = len(self.seeds)
        kind = p.kind
        if kind == "none":
            return np.zeros((B, 4))
        if kind == "constant":
            shape = 1.0
        elif kind == "step":
            shape = 1.0 if t >= p.t_on else 0.0
        elif kind == "sine":
            shape = math.sin(2 * math.pi * p.frequency * t)
        else:
            s = np.sum(self._w * np.sin(2 * np.pi * self._f * t + self._phi), axis=2)
            return np.clip(s, -1.0, 1.0) * self._mag
        return np.broadcast_to(shape * self._mag, (B, 4)).copy()


def sample_disturbance(profile: DisturbanceProfile, t: float, seed: int = 0) -> np.ndarray:
    """D_1..D_4 at time t for one seed."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return DisturbanceSource(profile, [seed])(t)[0]
