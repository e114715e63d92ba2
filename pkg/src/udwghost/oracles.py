"""Independent checks on the pipeline: closed-form limits and brute force.

Shipped with the library so a build can validate itself from the command
line (``udwghost oracle-check``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from .kinematics import Detector, Inertial, ModelConfig
from .quadrature import QuadratureSpec
from .register import RegisterState, assemble_rho, g_table, g_value, sign_vectors
from .spdc import GexpCache, SpdcConfig, gexp


@dataclass
class OracleReport:
    name: str
    oracle: float
    pipeline: float
    tolerance: float
    relative: bool = True

    @property
    def abs_dev(self) -> float:
        return abs(self.pipeline - self.oracle)

    @property
    def rel_dev(self) -> float:
        if self.oracle == 0:
            return 0.0 if self.pipeline == 0 else math.inf
        return self.abs_dev / abs(self.oracle)

    @property
    def passed(self) -> bool:
        dev = self.rel_dev if self.relative else self.abs_dev
        return math.isfinite(dev) and dev <= self.tolerance

    def line(self) -> str:
        kind = "rel" if self.relative else "abs"
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.name}: oracle={self.oracle:.15g} pipeline={self.pipeline:.15g} "
            f"abs={self.abs_dev:.3e} rel={self.rel_dev:.3e} ({kind} tol {self.tolerance:.0e})"
        )


def single_mode_norm(det: Detector, cfg: ModelConfig = ModelConfig()) -> float:
    """``I_1 = int d^dp |F_1(p)|^2`` for one Gaussian-smeared detector.

    The integrand is isotropic, so it reduces to a radial integral with the
    surface area of the unit (d-1)-sphere; evaluated with adaptive QUADPACK.
    """
    d = cfg.d
    sig = det.smearing.sigma
    ft0 = det.smearing.ft_at_zero(d)
    area = 2.0 * math.pi ** (d / 2) / special.gamma(d / 2)
    pref = area * ft0**2 / (2.0 * (2.0 * math.pi) ** (2 * d))

    def radial(p):
        return p ** (d - 1) * math.exp(-(sig * p) ** 2) / math.sqrt(p * p + cfg.m**2)

    # the Gaussian is negligible past 40/sigma; split at 1/sigma to help QUADPACK
    a, _ = integrate.quad(radial, 0.0, 1.0 / sig, epsabs=0, epsrel=1e-13, limit=200)
    b, _ = integrate.quad(radial, 1.0 / sig, 40.0 / sig, epsabs=0, epsrel=1e-13, limit=200)
    return pref * (a + b)


def vacuum_excitation_oracle(det: Detector, cfg: ModelConfig = ModelConfig()) -> float:
    """Excitation probability of a lone ground-state detector in the vacuum."""
    i1 = single_mode_norm(det, cfg)
    return 0.5 * (1.0 - math.exp(-2.0 * det.lam**2 * i1))


def vacuum_excitation_pipeline(det: Detector, cfg: ModelConfig = ModelConfig(), quad=QuadratureSpec()):
    spdc = SpdcConfig(theta=0.0, beta_scale=1.0)
    cache = GexpCache(cfg, spdc, [det], 0.0, quad).warm()
    rho = assemble_rho(RegisterState(("g",)), g_table(1, cache), [det])
    return float(rho[1, 1].real)


class UncachedGexp:
    """gexp provider that runs a fresh quadrature on every call."""

    def __init__(self, cfg, spdc, dets, tau, quad: QuadratureSpec = QuadratureSpec()):
        self.args = (cfg, spdc, tuple(dets), float(tau))
        self.quad = quad
        self.calls = 0

    def __call__(self, c) -> float:
        self.calls += 1
        return gexp(*self.args, tuple(c), self.quad)


def brute_force_g(l: Sequence[int], j: Sequence[int], provider: Callable) -> float:
    """The G sum evaluated literally: 4^n terms, one provider call each."""
    n = len(l)
    if len(j) != n:
        raise ValueError("sign vectors differ in length")
    total = 0.0
    for k in itertools.product((1, -1), repeat=n):
        for m in itertools.product((1, -1), repeat=n):
            coef = 1.0
            for s in range(n):
                coef *= (1 if m[s] == 1 else l[s]) * (1 if k[s] == 1 else j[s])
            total += coef * provider([ks - ms for ks, ms in zip(k, m)])
    return total / 2 ** (2 * n)


def default_pair(lam: float = 1.0):
    return [
        Detector(lam=lam, worldline=Inertial((1.0, 0.0, 0.0))),
        Detector(lam=lam, worldline=Inertial((-1.0, 0.0, 0.0))),
    ]


def run_oracle_suite(quad: QuadratureSpec = QuadratureSpec(), brute_quad: QuadratureSpec | None = None):
    """All oracle comparisons as a list of ``OracleReport``."""
    cfg = ModelConfig()
    reports = []
    for lam in (0.5, 1.0, 2.0):
        det = Detector(lam=lam)
        reports.append(
            OracleReport(
                f"vacuum excitation lam={lam}",
                vacuum_excitation_oracle(det, cfg),
                vacuum_excitation_pipeline(det, cfg, quad),
                1e-6,
            )
        )

    # brute-force G on the two-detector inertial pair; a coarse rule is enough
    # since both paths share it
    if brute_quad is None:
        brute_quad = replace(quad, radial_nodes=32, angular_nodes=16, error_estimate=False)
    dets = default_pair()
    spdc = SpdcConfig()
    cache = GexpCache(cfg, spdc, dets, 0.0, brute_quad)
    provider = UncachedGexp(cfg, spdc, dets, 0.0, brute_quad)
    cells = [
        OracleReport(f"brute-force G l={l} j={j}", brute_force_g(l, j, provider), g_value(l, j, cache), 1e-12, relative=False)
        for l in sign_vectors(2)
        for j in sign_vectors(2)
    ]
    reports.append(max(cells, key=lambda r: r.abs_dev))

    zero = default_pair(0.0)
    rho = assemble_rho(RegisterState(("e", "g")), g_table(2, GexpCache(cfg, spdc, zero, 0.0, quad)), zero)
    proj = np.zeros((4, 4))
    proj[2, 2] = 1.0
    reports.append(OracleReport("zero coupling identity", 0.0, float(np.max(np.abs(rho - proj))), 0.0, relative=False))
    return reports
