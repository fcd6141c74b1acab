import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plsec.distance import (
    DiskGeometry,
    cdf_disk_line,
    cdf_disk_point,
    cdf_su_truncated,
    pdf_disk_line,
    pdf_disk_point,
    pdf_su_truncated,
    sample_independent_distances,
    sample_pair_distance,
)
from plsec.numerics import DomainError, integrate

# mpmath evaluations of the closed forms
PDF_LINE_1_1 = 0.78200443791154129
CDF_LINE_100_100 = 0.58650332843365596
CDF_LINE_60_150 = 0.13294667705309865


def test_frozen_values():
    assert pdf_disk_line(1.0, 1.0) == pytest.approx(PDF_LINE_1_1, rel=1e-13)
    assert cdf_disk_line(100.0, 100.0) == pytest.approx(CDF_LINE_100_100, rel=1e-13)
    assert cdf_disk_line(60.0, 150.0) == pytest.approx(CDF_LINE_60_150, rel=1e-13)


def test_disk_line_support_and_edges():
    assert pdf_disk_line(0.0, 1.0) == 0.0
    assert pdf_disk_line(2.5, 1.0) == 0.0
    assert cdf_disk_line(0.0, 1.0) == 0.0
    assert cdf_disk_line(2.0, 1.0) == 1.0
    with pytest.raises(DomainError):
        cdf_disk_line(3.0, 1.0)


@pytest.mark.parametrize("R", [1.0, 100.0, 150.0])
def test_disk_line_normalises(R):
    assert integrate(lambda l: pdf_disk_line(l, R), 0.0, 2 * R).value == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 1.99))
def test_cdf_is_integral_of_pdf(d):
    assert cdf_disk_line(d, 1.0) == pytest.approx(integrate(lambda l: pdf_disk_line(l, 1.0), 0.0, d).value, abs=1e-11)


def test_truncated_law():
    geo = DiskGeometry(100.0, 60.0, 50.0)
    assert integrate(lambda l: pdf_su_truncated(l, geo), 0.0, 60.0).value == pytest.approx(1.0, abs=1e-10)
    assert pdf_su_truncated(61.0, geo) == 0.0
    assert cdf_su_truncated(60.0, geo) == pytest.approx(1.0, abs=1e-15)
    assert cdf_su_truncated(80.0, geo) == pytest.approx(1.0, abs=1e-15)


def test_truncation_is_identity_at_full_diameter():
    geo = DiskGeometry(100.0, 200.0, 100.0)
    for l in (1.0, 50.0, 199.0):
        assert pdf_su_truncated(l, geo) == pdf_disk_line(l, 100.0)


def test_disk_point_law():
    assert integrate(lambda l: pdf_disk_point(l, 50.0), 0.0, 50.0).value == pytest.approx(1.0, abs=1e-12)
    assert cdf_disk_point(25.0, 50.0) == pytest.approx(0.25)
    assert pdf_disk_point(51.0, 50.0) == 0.0


def test_array_inputs():
    ls = np.array([-1.0, 0.5, 1.0, 2.5])
    assert np.allclose(pdf_disk_line(ls, 1.0), [0.0, pdf_disk_line(0.5, 1.0), PDF_LINE_1_1, 0.0])
    assert pdf_disk_point(ls, 1.0).shape == (4,)


def test_geometry_validation():
    assert DiskGeometry(10.0, 50.0, 5.0).D == 20.0
    with pytest.raises(ValueError):
        DiskGeometry(10.0, 5.0, 11.0)


def test_pair_sampler_matches_law():
    rng = np.random.default_rng(7)
    geo = DiskGeometry(100.0, 60.0, 100.0)
    s = sample_pair_distance(rng, geo, 200_000)
    assert s.d_su.max() <= 60.0
    # acceptance estimates F(D)
    assert abs(s.acceptance - cdf_disk_line(60.0, 100.0)) < 0.01
    for q in (20.0, 40.0):
        p = cdf_su_truncated(q, geo)
        assert abs(np.mean(s.d_su <= q) - p) < 4 * math.sqrt(p * (1 - p) / 200_000)


def test_independent_sampler_marginals():
    rng = np.random.default_rng(11)
    geo = DiskGeometry(100.0, 200.0, 50.0)
    s = sample_independent_distances(rng, geo, 200_000)
    assert abs(np.mean(s.d_sa <= 50.0) - 0.25) < 0.005
    assert abs(np.mean(s.d_su <= 100.0) - CDF_LINE_100_100) < 0.005
    # independence: correlation of the two attacker links vanishes
    assert abs(np.corrcoef(s.d_sa, s.d_au)[0, 1]) < 0.01
