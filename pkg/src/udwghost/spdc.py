"""SPDC field state: displacement amplitudes beta(p) and their norms.

With a plane-wave pump and perfect phase matching the field after the
detector kick is a coherent state with amplitude

    beta(p) = -i * gamma * (F(p) cosh(theta) + F*(p_pump - p) sinh(theta)),

where ``F`` is the difference-vector weighted detector amplitude.  The
overlap entering the detector density matrix is ``exp(-I(c)/2)`` with
``I(c) = int d^3p |beta(c; p)|^2``.
"""

from __future__ import annotations

import itertools
import math
import threading
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, QuadratureConvergenceError
from .kinematics import (
    TWO_PI,
    Detector,
    ModelConfig,
    check_diff_vector,
    dispersion,
    smearing_ft,
    spatial_position,
    weighted_F,
)
from .quadrature import QuadratureSpec, build_grid


class SeriesTruncationWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SpdcConfig:
    """``theta`` is the hyperbolic argument (2(2pi)^d for the unscaled state)."""

    theta: float = 1.0
    beta_scale: float = 1.0

    def __post_init__(self):
        if not (self.theta >= 0 and math.isfinite(self.theta)):
            raise ConfigError(f"spdc.theta must be finite and >= 0, got {self.theta!r}")
        if not (self.beta_scale > 0 and math.isfinite(self.beta_scale)):
            raise ConfigError(f"spdc.beta_scale must be > 0, got {self.beta_scale!r}")

    @classmethod
    def unscaled(cls, d: int = 3) -> "SpdcConfig":
        return cls(theta=2.0 * TWO_PI**d, beta_scale=1.0)

    def hyperbolic(self) -> tuple[float, float]:
        """``(gamma cosh theta, gamma sinh theta)``, guarded against overflow of ``|beta|^2``."""
        try:
            ch = self.beta_scale * math.cosh(self.theta)
            sh = self.beta_scale * math.sinh(self.theta)
            if not math.isfinite(ch * ch):
                raise OverflowError
        except OverflowError:
            raise ConfigError(
                f"theta={self.theta} overflows |beta|^2 in double precision; "
                "lower spdc.theta or rescale with spdc.beta_scale (--theta / --beta-scale)"
            ) from None
        return ch, sh


@dataclass(frozen=True)
class SeriesTruncation:
    k_max: int = 20
    tolerance: float = 1e-12

    def __post_init__(self):
        if int(self.k_max) != self.k_max or self.k_max < 0:
            raise ConfigError(f"k_max must be a non-negative integer, got {self.k_max!r}")


def _reflected(cfg: ModelConfig, p):
    return cfg.pump_vector - np.asarray(p, dtype=float)


def beta_simplified(cfg: ModelConfig, spdc: SpdcConfig, dets: Sequence[Detector], tau, c, p):
    ch, sh = spdc.hyperbolic()
    f = weighted_F(cfg, dets, tau, c, p)
    f_ref = weighted_F(cfg, dets, tau, c, _reflected(cfg, p))
    return -1j * (ch * f + sh * np.conj(f_ref))


def series_coefficients(theta: float, k_max: int) -> tuple[float, float, float]:
    """Partial cosh/sinh Taylor sums and the first omitted term.

    Orders 0 (the bare kick) and 1 (the single pair-creation term) are
    always kept; ``k_max`` bounds the nested-convolution orders.
    """
    even = odd = 0.0
    top = max(k_max, 1)
    term = 1.0
    for k in range(top + 1):
        if k:
            term *= theta / k
        if k % 2:
            odd += term
        else:
            even += term
    return even, odd, term * theta / (top + 1)


def beta_general(
    cfg: ModelConfig,
    spdc: SpdcConfig,
    dets: Sequence[Detector],
    tau,
    c,
    p,
    trunc: SeriesTruncation = SeriesTruncation(),
):
    """Series form of beta with the delta pump/phase-matching kernels.

    Each convolution chain of ``k`` pair-creation kernels collapses to
    ``theta^k / k!`` times a delta function, so the even/odd series become
    partial sums of cosh/sinh.  A ``SeriesTruncationWarning`` is issued when
    the first omitted term exceeds ``trunc.tolerance`` relative to the sum.
    """
    even, odd, nxt = series_coefficients(spdc.theta, trunc.k_max)
    if nxt > trunc.tolerance * max(even, 1.0):
        warnings.warn(
            f"series truncated at k_max={trunc.k_max}: next term {nxt:.3e} exceeds tolerance",
            SeriesTruncationWarning,
            stacklevel=2,
        )
    g = spdc.beta_scale
    f = weighted_F(cfg, dets, tau, c, p)
    f_ref = weighted_F(cfg, dets, tau, c, _reflected(cfg, p))
    return -1j * g * (even * f + odd * np.conj(f_ref))


def beta_columns(cfg: ModelConfig, spdc: SpdcConfig, dets: Sequence[Detector], tau, p) -> np.ndarray:
    """Per-detector pieces of beta: ``beta(c; p) == beta_columns(p) @ c``.

    Same arithmetic as ``mode_amplitude_F``, with the detector-independent
    factors hoisted out of the detector loop.
    """
    ch, sh = spdc.hyperbolic()
    p = np.asarray(p, dtype=float)
    q = _reflected(cfg, p)
    e_p, e_q = dispersion(cfg, p), dispersion(cfg, q)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv_p = 1.0 / (TWO_PI**cfg.d * np.sqrt(2.0 * e_p))
        inv_q = 1.0 / (TWO_PI**cfg.d * np.sqrt(2.0 * e_q))
    t_p, t_q = np.exp(1j * tau * e_p), np.exp(1j * tau * e_q)
    envelopes = {}
    cols = np.empty(p.shape[:-1] + (len(dets),), dtype=complex)
    for t, det in enumerate(dets):
        if det.smearing not in envelopes:
            envelopes[det.smearing] = (
                smearing_ft(det.smearing, cfg.d, p) * inv_p,
                smearing_ft(det.smearing, cfg.d, q) * inv_q,
            )
        a_p, a_q = envelopes[det.smearing]
        x = spatial_position(det.worldline, tau, cfg.d)
        f = a_p * t_p * np.exp(-1j * (p @ x))
        f_ref = a_q * t_q * np.exp(-1j * (q @ x))
        cols[..., t] = (-1j * det.lam) * (ch * f + sh * np.conj(f_ref))
    return cols


def _sigma_min(dets: Sequence[Detector]) -> float:
    return min(det.smearing.sigma for det in dets)


def _node_sums(cfg, spdc, dets, tau, cs: np.ndarray, quad: QuadratureSpec) -> np.ndarray:
    grid = build_grid(quad, cfg.pump, _sigma_min(dets))
    coeffs = cs.T.astype(complex)  # (n, K)
    acc = np.zeros(cs.shape[0])
    for pts, w in grid.chunks():
        beta = beta_columns(cfg, spdc, dets, tau, pts) @ coeffs
        acc += w @ (beta.real**2 + beta.imag**2)
    return acc


def integrate_beta_norms(
    cfg: ModelConfig,
    spdc: SpdcConfig,
    dets: Sequence[Detector],
    tau,
    cs: Iterable[Sequence[int]],
    quad: QuadratureSpec = QuadratureSpec(),
):
    """``I(c)`` for a batch of difference vectors in one pass over the nodes.

    Returns ``(values, rel_err)``; ``rel_err`` compares against the
    companion rule (all node counts scaled by ``quad.companion_fraction``)
    and is zero when the estimate is disabled.
    """
    if cfg.d != 3:
        raise ConfigError("momentum quadrature is implemented for d = 3 only")
    cs = np.array([check_diff_vector(c, len(dets)) for c in cs], dtype=float).reshape(-1, len(dets))
    if cs.shape[0] == 0:
        return np.zeros(0), np.zeros(0)
    values = _node_sums(cfg, spdc, dets, tau, cs, quad)
    rel = np.zeros_like(values)
    if quad.error_estimate:
        coarse = _node_sums(cfg, spdc, dets, tau, cs, quad.companion())
        diff = np.abs(values - coarse)
        scale = np.maximum(np.abs(values), np.abs(coarse))
        rel = np.divide(diff, scale, out=np.zeros_like(diff), where=scale > 0)
        bad = np.flatnonzero(rel > quad.tolerance)
        if bad.size:
            worst = int(bad[np.argmax(rel[bad])])
            raise QuadratureConvergenceError(
                f"momentum quadrature not converged: relative change {rel[worst]:.3e} "
                f"> tolerance {quad.tolerance:.1e} for c={tuple(int(v) for v in cs[worst])}; "
                "increase radial/angular node counts",
                diagnostics={
                    "c": tuple(int(v) for v in cs[worst]),
                    "value": float(values[worst]),
                    "companion_value": float(coarse[worst]),
                    "rel_change": float(rel[worst]),
                    "radial_nodes": quad.radial_nodes,
                    "angular_nodes": quad.angular_nodes,
                },
            )
    return values, rel


def beta_norm_integral(cfg, spdc, dets, tau, c, quad: QuadratureSpec = QuadratureSpec()) -> float:
    c = check_diff_vector(c, len(dets))
    if not any(c):
        return 0.0
    values, _ = integrate_beta_norms(cfg, spdc, dets, tau, [c], quad)
    return float(values[0])


def gexp(cfg, spdc, dets, tau, c, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Uncached vacuum-overlap factor ``exp(-I(c)/2)``; see ``GexpCache``."""
    return math.exp(-0.5 * beta_norm_integral(cfg, spdc, dets, tau, c, quad))


def canonical(c: Sequence[int]) -> tuple:
    """Representative of ``{c, -c}``: first non-zero entry positive."""
    c = tuple(int(v) for v in c)
    for v in c:
        if v:
            return c if v > 0 else tuple(-x for x in c)
    return c


def diff_vectors(n: int) -> list[tuple]:
    return list(itertools.product((-2, 0, 2), repeat=n))


def canonical_diff_vectors(n: int) -> list[tuple]:
    """Non-zero canonical representatives, ``(3^n - 1) / 2`` of them."""
    seen = dict.fromkeys(canonical(c) for c in diff_vectors(n) if any(c))
    return list(seen)


class GexpCache:
    """Memoised ``exp(-I(c)/2)`` for one scenario at one coupling instant.

    ``c`` and ``-c`` share an entry since ``I`` is even; ``quadratures``
    counts the integrals actually evaluated.  Entries are immutable once
    inserted, so concurrent readers only need the insertion lock.
    """

    def __init__(self, cfg, spdc, dets, tau, quad: QuadratureSpec = QuadratureSpec()):
        self.cfg = cfg
        self.spdc = spdc
        self.dets = tuple(dets)
        self.tau = float(tau)
        self.quad = quad
        self.quadratures = 0
        self._values: dict[tuple, float] = {}
        self._rel_err: dict[tuple, float] = {}
        self._lock = threading.Lock()

    @property
    def n(self) -> int:
        return len(self.dets)

    def warm(self, cs=None):
        """Evaluate every missing entry of ``cs`` (default: all of them) in one pass."""
        if cs is None:
            keys = canonical_diff_vectors(self.n)
        else:
            keys = [canonical(check_diff_vector(c, self.n)) for c in cs]
        missing = list(dict.fromkeys(k for k in keys if any(k) and k not in self._values))
        if not missing:
            return self
        values, rel = integrate_beta_norms(self.cfg, self.spdc, self.dets, self.tau, missing, self.quad)
        with self._lock:
            for k, v, e in zip(missing, values, rel):
                if k not in self._values:
                    self._values[k] = float(v)
                    self._rel_err[k] = float(e)
                    self.quadratures += 1
        return self

    def integral(self, c) -> float:
        k = canonical(check_diff_vector(c, self.n))
        if not any(k):
            return 0.0
        if k not in self._values:
            self.warm([k])
        return self._values[k]

    def __call__(self, c) -> float:
        return math.exp(-0.5 * self.integral(c))

    @property
    def max_rel_err(self) -> float:
        return max(self._rel_err.values(), default=0.0)

    def entries(self) -> dict:
        return dict(self._values)
