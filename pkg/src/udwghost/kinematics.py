"""Relativistic kinematics of smeared two-level detectors.

Momenta are numpy arrays whose last axis has length ``d``; every function
broadcasts over the leading axes so the quadrature can feed whole node
blocks at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ModelConfig:
    d: int = 3
    m: float = 0.0
    pump: tuple = (0.0, 0.0, -TWO_PI)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ConfigError(f"model.d must be a positive integer, got {self.d!r}")
        if not (self.m >= 0 and math.isfinite(self.m)):
            raise ConfigError(f"model.m must be finite and >= 0, got {self.m!r}")
        pump = tuple(float(x) for x in self.pump)
        if len(pump) != self.d:
            raise ConfigError(f"model.pump must have length d={self.d}, got {len(pump)}")
        if not all(math.isfinite(x) for x in pump):
            raise ConfigError("model.pump must be finite")
        object.__setattr__(self, "pump", pump)

    @property
    def pump_vector(self) -> np.ndarray:
        return np.asarray(self.pump, dtype=float)


@dataclass(frozen=True)
class SmearingProfile:
    """Gaussian smearing ``norm * exp(-|x|^2 / 2 sigma^2)``.

    ``norm=None`` selects the unit-area normalisation, i.e. the Fourier
    transform equals 1 at zero momentum.
    """

    sigma: float = 0.1
    norm: float | None = None

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise ConfigError(f"smearing sigma must be > 0, got {self.sigma!r}")
        if self.norm is not None and not (self.norm > 0 and math.isfinite(self.norm)):
            raise ConfigError(f"smearing norm must be > 0, got {self.norm!r}")

    def normalization(self, d: int) -> float:
        if self.norm is not None:
            return float(self.norm)
        return 1.0 / ((TWO_PI ** (d / 2)) * self.sigma**d)

    def ft_at_zero(self, d: int) -> float:
        return self.normalization(d) * TWO_PI ** (d / 2) * self.sigma**d


@dataclass(frozen=True)
class Inertial:
    x0: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        x0 = tuple(float(v) for v in self.x0)
        if not all(math.isfinite(v) for v in x0):
            raise ConfigError("inertial position must be finite")
        object.__setattr__(self, "x0", x0)


@dataclass(frozen=True)
class Rindler:
    """Uniform acceleration along x; at tau=0 the detector rests at x=1/a."""

    a: float = 1.0
    transverse: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ConfigError(f"Rindler acceleration must be > 0, got {self.a!r}")
        object.__setattr__(self, "transverse", tuple(float(v) for v in self.transverse))


Worldline = Union[Inertial, Rindler]


@dataclass(frozen=True)
class Detector:
    lam: float = 1.0
    omega: float = 1.0
    smearing: SmearingProfile = field(default_factory=SmearingProfile)
    worldline: Worldline = field(default_factory=Inertial)

    def __post_init__(self):
        if not math.isfinite(self.lam):
            raise ConfigError(f"detector coupling must be finite, got {self.lam!r}")
        if not (self.omega >= 0 and math.isfinite(self.omega)):
            raise ConfigError(f"detector gap must be finite and >= 0, got {self.omega!r}")


def _momentum(p, d: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape[-1:] != (d,):
        raise ConfigError(f"momentum must have trailing dimension {d}, got shape {p.shape}")
    return p


def _sq(p: np.ndarray) -> np.ndarray:
    return np.einsum("...i,...i->...", p, p)


def dispersion(cfg: ModelConfig, k) -> np.ndarray | float:
    k = _momentum(k, cfg.d)
    e = np.sqrt(_sq(k) + cfg.m**2)
    return float(e) if e.ndim == 0 else e


def smearing_ft(profile: SmearingProfile, d: int, p) -> np.ndarray | float:
    """Fourier transform with the ``exp(-i p.x)`` convention (real, positive)."""
    p = _momentum(p, d)
    out = profile.ft_at_zero(d) * np.exp(-0.5 * profile.sigma**2 * _sq(p))
    return float(out) if out.ndim == 0 else out


def worldline_position(w: Worldline, tau: float) -> np.ndarray:
    """Spacetime point ``(T, X, Y, Z, ...)`` at lab parameter ``tau``."""
    if isinstance(w, Inertial):
        return np.array((tau, *w.x0), dtype=float)
    if isinstance(w, Rindler):
        return np.array(
            (math.sinh(w.a * tau) / w.a, math.cosh(w.a * tau) / w.a, *w.transverse),
            dtype=float,
        )
    raise ConfigError(f"unknown worldline type {type(w).__name__}")


def spatial_position(w: Worldline, tau: float, d: int) -> np.ndarray:
    x = worldline_position(w, tau)[1:]
    if x.shape != (d,):
        raise ConfigError(f"worldline has {x.shape[0]} spatial components, model has d={d}")
    return x


def mode_amplitude_F(cfg: ModelConfig, det: Detector, tau: float, p):
    """Per-detector momentum amplitude ``F_j(p, X_j(tau))``.

    Non-finite at ``p = 0`` for a massless field; the quadrature never
    places a node there.
    """
    p = _momentum(p, cfg.d)
    x = spatial_position(det.worldline, tau, cfg.d)
    e = dispersion(cfg, p)
    with np.errstate(divide="ignore", invalid="ignore"):
        amp = smearing_ft(det.smearing, cfg.d, p) / (TWO_PI**cfg.d * np.sqrt(2.0 * e))
    phase = np.exp(1j * (e * tau - p @ x))
    return amp * phase


def check_diff_vector(c: Sequence[int], n: int) -> tuple:
    c = tuple(int(v) for v in c)
    if len(c) != n:
        raise ConfigError(f"difference vector has length {len(c)}, expected {n}")
    if any(v not in (-2, 0, 2) for v in c):
        raise ConfigError(f"difference vector entries must be in {{-2, 0, 2}}, got {c}")
    return c


def weighted_F(cfg: ModelConfig, dets: Sequence[Detector], tau: float, c, p):
    """``sum_t c_t lam_t F_t(p)`` for a difference vector ``c``."""
    c = check_diff_vector(c, len(dets))
    p = _momentum(p, cfg.d)
    out = np.zeros(p.shape[:-1], dtype=complex)
    for ct, det in zip(c, dets):
        if ct:
            out = out + (ct * det.lam) * mode_amplitude_F(cfg, det, tau, p)
    return out if out.ndim else complex(out)
