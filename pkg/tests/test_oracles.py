import math

import pytest

from conftest import COARSE
from udwghost.kinematics import Detector, ModelConfig, SmearingProfile
from udwghost.oracles import (
    OracleReport,
    UncachedGexp,
    brute_force_g,
    single_mode_norm,
    vacuum_excitation_oracle,
)
from udwghost.register import g_value, sign_vectors
from udwghost.spdc import GexpCache, SpdcConfig

# closed form 1 / (2 (2 pi)^5 sigma^2) and (1 - exp(-2 lam^2 I1)) / 2, evaluated with mpmath at 30 digits
I1 = 0.0051058806922709148009816400354
PINNED = {
    0.5: 0.00127484218264715720124632015464,
    1.0: 0.00507989918880699840026163585149,
    2.0: 0.0200120243379862686851768682308,
}


def test_radial_norm_closed_form():
    assert single_mode_norm(Detector()) == pytest.approx(I1, rel=1e-12)
    sig = 0.25
    assert single_mode_norm(Detector(smearing=SmearingProfile(sigma=sig))) == pytest.approx(
        1 / (2 * (2 * math.pi) ** 5 * sig**2), rel=1e-12
    )


def test_massive_norm_smaller():
    assert single_mode_norm(Detector(), ModelConfig(m=3.0)) < single_mode_norm(Detector())


@pytest.mark.parametrize("lam", sorted(PINNED))
def test_vacuum_oracle_pinned(lam):
    assert vacuum_excitation_oracle(Detector(lam=lam)) == pytest.approx(PINNED[lam], rel=1e-12)


def test_vacuum_oracle_limits():
    assert vacuum_excitation_oracle(Detector(lam=0.0)) == 0.0
    assert vacuum_excitation_oracle(Detector(lam=1e4)) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_brute_force_matches_cache(pair, triple, n):
    dets = {1: pair[:1], 2: pair, 3: triple}[n]
    cfg, spdc = ModelConfig(), SpdcConfig()
    cache = GexpCache(cfg, spdc, dets, 0.2, COARSE)
    provider = UncachedGexp(cfg, spdc, dets, 0.2, COARSE)
    signs = sign_vectors(n)
    cells = [(signs[0], signs[-1]), (signs[-1], signs[-1]), (signs[1], signs[0])] if n == 3 else [(l, j) for l in signs for j in signs]
    for l, j in cells:
        assert abs(brute_force_g(l, j, provider) - g_value(l, j, cache)) <= 1e-12
    assert provider.calls == len(cells) * 4**n
    assert cache.quadratures <= (3**n + 1) // 2


def test_brute_force_zero_coupling():
    one = lambda c: 1.0  # noqa: E731
    assert brute_force_g((1, 1), (1, 1), one) == 1.0
    assert brute_force_g((1, -1), (1, 1), one) == 0.0
    with pytest.raises(ValueError):
        brute_force_g((1,), (1, 1), one)


def test_brute_force_single_detector_pattern():
    g = 0.7
    provider = lambda c: g ** ((c[0] / 2) ** 2)  # noqa: E731
    for l in (1, -1):
        for j in (1, -1):
            assert brute_force_g((l,), (j,), provider) == pytest.approx((1 + l * j + (l + j) * g) / 4, abs=1e-15)


def test_report_fields():
    r = OracleReport("x", 2.0, 2.0 + 1e-9, 1e-6)
    assert r.passed and r.abs_dev == pytest.approx(1e-9) and r.rel_dev == pytest.approx(5e-10)
    assert r.line().startswith("PASS x")
    bad = OracleReport("y", 0.0, 1e-3, 1e-6, relative=False)
    assert not bad.passed and bad.line().startswith("FAIL")
    assert math.isinf(OracleReport("z", 0.0, 1.0, 1.0).rel_dev)
