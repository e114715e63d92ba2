"""Spherical product quadrature over momentum space.

The integrands handled here are sums of Gaussians centred at the origin
and at the pump momentum, each carrying an integrable ``1/sqrt(E)``
singularity at its own centre (massless field).  One spherical grid is
laid around every centre and the grids are blended with the rational
partition of unity

    w_i(p) = |p - c_i|^{-2k} / sum_l |p - c_l|^{-2k},

which is analytic away from the centres and vanishes like
``|p - c_j|^{2k}`` at every other centre.  Each grid therefore only sees
the singularity sitting at its own origin, where the spherical measure and
the ``r = R s^2`` radial map make the integrand smooth in ``s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import roots_legendre

from .errors import ConfigError

CHUNK = 1 << 16


@dataclass(frozen=True)
class QuadratureSpec:
    radial_nodes: int = 192
    angular_nodes: int = 80
    azimuthal_nodes: int | None = None  # None -> 2 * angular_nodes
    radial_cutoff: float | None = None  # None -> cutoff_sigmas / sigma
    cutoff_sigmas: float = 8.0
    partition_order: int = 3
    centers: tuple | None = None  # None -> (origin, pump)
    error_estimate: bool = True
    companion_fraction: float = 0.75
    tolerance: float = 1e-6
    scheme: str = "spherical"

    def __post_init__(self):
        if self.scheme != "spherical":
            raise ConfigError(f"quadrature.scheme must be 'spherical', got {self.scheme!r}")
        for name in ("radial_nodes", "angular_nodes"):
            v = getattr(self, name)
            if int(v) != v or v < 4:
                raise ConfigError(f"quadrature.{name} must be an integer >= 4, got {v!r}")
        if self.azimuthal_nodes is not None and (
            int(self.azimuthal_nodes) != self.azimuthal_nodes or self.azimuthal_nodes < 4
        ):
            raise ConfigError(
                f"quadrature.azimuthal_nodes must be an integer >= 4, got {self.azimuthal_nodes!r}"
            )
        if self.cutoff_sigmas < 8.0:
            raise ConfigError("quadrature.cutoff_sigmas must be >= 8")
        if self.partition_order < 1:
            raise ConfigError("quadrature.partition_order must be >= 1")
        if not 0.25 <= self.companion_fraction < 1.0:
            raise ConfigError("quadrature.companion_fraction must lie in [0.25, 1)")
        if not self.tolerance > 0:
            raise ConfigError("quadrature.tolerance must be > 0")

    @property
    def n_azimuthal(self) -> int:
        return self.azimuthal_nodes or 2 * self.angular_nodes

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        return replace(
            self,
            radial_nodes=self.radial_nodes * factor,
            angular_nodes=self.angular_nodes * factor,
            azimuthal_nodes=self.n_azimuthal * factor,
        )

    def companion(self) -> "QuadratureSpec":
        f = self.companion_fraction
        return replace(
            self,
            radial_nodes=max(4, int(round(self.radial_nodes * f))),
            angular_nodes=max(4, int(round(self.angular_nodes * f))),
            azimuthal_nodes=max(4, int(round(self.n_azimuthal * f))),
            error_estimate=False,
        )


def _gauss_unit(n):
    x, w = roots_legendre(n)
    return 0.5 * (x + 1.0), 0.5 * w


def radial_rule(cutoff: float, n: int):
    """Nodes/weights for ``int_0^R g(r) r^2 dr`` with ``r = R s^2``."""
    s, ws = _gauss_unit(n)
    r = cutoff * s * s
    return r, ws * 2.0 * cutoff * s * r * r


def angular_rule(n_polar: int, n_azimuthal: int):
    """Gauss-Legendre in cos(theta) times the periodic trapezoid in phi."""
    u, wu = roots_legendre(n_polar)
    phi = np.arange(n_azimuthal) * (2.0 * math.pi / n_azimuthal)
    st = np.sqrt(1.0 - u * u)
    dirs = np.empty((n_polar, n_azimuthal, 3))
    dirs[..., 0] = st[:, None] * np.cos(phi)[None, :]
    dirs[..., 1] = st[:, None] * np.sin(phi)[None, :]
    dirs[..., 2] = u[:, None]
    w = np.repeat(wu * (2.0 * math.pi / n_azimuthal), n_azimuthal)
    return dirs.reshape(-1, 3), w


def partition_weights(points: np.ndarray, centers: np.ndarray, own: int, order: int):
    """Weight of window ``own`` at ``points`` in the rational partition of unity."""
    diff = points[:, None, :] - centers[None, :, :]
    dist2 = np.einsum("nci,nci->nc", diff, diff)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = (dist2[:, own : own + 1] / dist2) ** order
        total = np.sum(ratio, axis=1)
    w = 1.0 / total
    w = np.where(np.isfinite(w), w, 0.0)
    # exactly on its own centre the window takes the full weight
    return np.where(dist2[:, own] == 0.0, 1.0, w)


@dataclass(frozen=True)
class MomentumGrid:
    """Lazily generated node set: one spherical product rule per centre."""

    spec: QuadratureSpec
    cutoff: float
    centers: np.ndarray
    radii: np.ndarray
    radial_weights: np.ndarray
    directions: np.ndarray
    angular_weights: np.ndarray

    @property
    def size(self) -> int:
        return len(self.centers) * self.radii.size * self.angular_weights.size

    def chunks(self, size: int = CHUNK):
        """Yield ``(points, weights)`` blocks covering every node exactly once."""
        n_dir = self.angular_weights.size
        shells = max(1, size // n_dir)
        for i, c in enumerate(self.centers):
            for j in range(0, self.radii.size, shells):
                r = self.radii[j : j + shells]
                p = (c[None, None, :] + r[:, None, None] * self.directions[None, :, :]).reshape(-1, 3)
                w = (self.radial_weights[j : j + shells, None] * self.angular_weights[None, :]).ravel()
                if len(self.centers) > 1:
                    w = w * partition_weights(p, self.centers, i, self.spec.partition_order)
                yield p, w


def resolve_centers(spec: QuadratureSpec, pump) -> np.ndarray:
    pump = np.asarray(pump, dtype=float)
    if spec.centers is None:
        centers = [np.zeros(3), pump]
    else:
        centers = [np.asarray(c, dtype=float) for c in spec.centers]
        have = lambda v: any(np.allclose(c, v, atol=1e-12) for c in centers)  # noqa: E731
        if not (have(np.zeros(3)) and have(pump)):
            raise ConfigError("quadrature.centers must include the origin and the pump momentum")
    uniq = []
    for c in centers:
        if not any(np.linalg.norm(c - u) < 1e-12 for u in uniq):
            uniq.append(c)
    return np.array(uniq)


def resolve_cutoff(spec: QuadratureSpec, sigma_min: float) -> float:
    need = spec.cutoff_sigmas / sigma_min
    if spec.radial_cutoff is None:
        return need
    if spec.radial_cutoff < 8.0 / sigma_min:
        raise ConfigError(
            f"quadrature.radial_cutoff={spec.radial_cutoff} must cover >= 8/sigma = {8.0 / sigma_min}"
        )
    return float(spec.radial_cutoff)


def build_grid(spec: QuadratureSpec, pump, sigma_min: float) -> MomentumGrid:
    pump = np.asarray(pump, dtype=float)
    if pump.shape != (3,):
        raise ConfigError("the spherical momentum quadrature is implemented for d = 3 only")
    centers = resolve_centers(spec, pump)
    cutoff = resolve_cutoff(spec, sigma_min)
    r, wr = radial_rule(cutoff, spec.radial_nodes)
    dirs, wa = angular_rule(spec.angular_nodes, spec.n_azimuthal)
    return MomentumGrid(spec, cutoff, centers, r, wr, dirs, wa)
