import math

import numpy as np
import pytest
from scipy import integrate, stats

from quasigauss import multivar, qgauss
from quasigauss.multivar import (
    DegeneratePointError,
    ProductQuasiGaussian,
    from_polar,
    from_spherical,
    joint_pdf,
    polar_rect_probability,
    sample_vector,
    to_polar,
    to_spherical,
)
from quasigauss.qgauss import make_params


@pytest.fixture
def gauss2(std_normal):
    return ProductQuasiGaussian.iid(std_normal, 2)


class TestModel:
    def test_shared_sigma_checked(self):
        a = make_params(0, 0, 0, 1.0, 0.5)
        b = make_params(0, 2, 1, 2.0, 0.3)
        ProductQuasiGaussian((a, b))
        with pytest.raises(ValueError):
            ProductQuasiGaussian((a, b), shared_sigma=True)
        with pytest.raises(ValueError):
            ProductQuasiGaussian(())
        with pytest.raises(TypeError):
            ProductQuasiGaussian(({"a": 0},))

    def test_iid(self, quad2):
        m = ProductQuasiGaussian.iid(quad2, 3)
        assert m.dim == 3 and m.shared_sigma


class TestJointPdf:
    def test_examples(self, std_normal, quad2, gauss2):
        assert joint_pdf(ProductQuasiGaussian((quad2,)), [0.7]) == qgauss.pdf(quad2, 0.7)
        np.testing.assert_allclose(joint_pdf(gauss2, [0.0, 0.0]), 1 / (2 * math.pi), rtol=1e-15)
        val = joint_pdf(ProductQuasiGaussian.iid(quad2, 2), [1.0, 1.0])
        np.testing.assert_allclose(val, qgauss.pdf(quad2, 1.0) ** 2, rtol=1e-15)
        np.testing.assert_allclose(val, 0.05855, atol=1e-5)

    def test_rows(self, gauss2):
        pts = np.array([[0.0, 0.0], [1.0, -1.0]])
        np.testing.assert_allclose(joint_pdf(gauss2, pts), stats.norm.pdf(pts).prod(axis=1), rtol=1e-14)

    def test_dimension_mismatch(self, gauss2):
        with pytest.raises(ValueError):
            joint_pdf(gauss2, [0.0, 1.0, 2.0])

    def test_integrates_to_one(self):
        model = ProductQuasiGaussian((make_params(0.5, 2.0, 0.0, 1.0, 0.3), make_params(-1.0, 0.5, 1.5, 1.0, 0.6)))
        val, _ = integrate.nquad(
            lambda x, y: joint_pdf(model, [x, y]),
            [[-11.5, 12.5], [-13.0, 11.0]],
            opts=[{"points": [-1.0], "epsabs": 1e-10}, {"points": [0.5], "epsabs": 1e-10}],
        )
        np.testing.assert_allclose(val, 1.0, atol=1e-6)


class TestSampleVector:
    def test_empty(self, gauss2):
        assert sample_vector(gauss2, 0, 0).shape == (0, 2)

    def test_deterministic(self, gauss2):
        np.testing.assert_array_equal(sample_vector(gauss2, 9, 50), sample_vector(gauss2, 9, 50))

    def test_columns(self, gauss2):
        x = sample_vector(gauss2, 1, 100_000)
        assert abs(np.corrcoef(x.T)[0, 1]) < 0.02
        # a 1% test rejects 1 run in 100; over 40 columns allow up to 3 (P(more) < 0.001)
        pvals = [stats.kstest(col, "norm").pvalue for s in range(20) for col in sample_vector(gauss2, s, 10_000).T]
        assert sum(p < 0.01 for p in pvals) <= 3

    def test_mixed_columns_independent(self):
        model = ProductQuasiGaussian((make_params(0, 2, 0, 1, 0.5), make_params(1, 0.5, 3, 2, 0.2)))
        x = sample_vector(model, 3, 100_000)
        assert abs(np.corrcoef(x.T)[0, 1]) < 0.02
        for j, p in enumerate(model.coords):
            assert stats.kstest(x[:, j], lambda t, p=p: qgauss.cdf(p, t)).pvalue > 0.01


class TestPolar:
    @pytest.mark.parametrize(
        "xy, expected",
        [((1, 0), (1, 0)), ((1, 1), (math.sqrt(2), math.pi / 4)), ((-1, 0), (1, math.pi)), ((0, -2), (2, 1.5 * math.pi))],
    )
    def test_examples(self, xy, expected):
        np.testing.assert_allclose(to_polar(*xy), expected, rtol=1e-15)

    def test_origin(self):
        with pytest.raises(DegeneratePointError):
            to_polar(0.0, 0.0)
        with pytest.raises(DegeneratePointError):
            to_polar(np.array([1.0, 0.0]), np.array([1.0, 0.0]))

    def test_angle_range(self):
        rho, theta = to_polar(np.array([1.0, 1.0]), np.array([-1e-300, -0.0]))
        assert np.all((theta >= 0) & (theta < 2 * math.pi))

    def test_round_trip(self):
        rho, theta = np.meshgrid(np.linspace(0.01, 10, 50), np.linspace(0, 2 * math.pi, 73, endpoint=False))
        back = to_polar(*from_polar(rho, theta))
        np.testing.assert_allclose(back.rho, rho, rtol=1e-12)
        diff = np.angle(np.exp(1j * (back.theta - theta)))
        np.testing.assert_allclose(diff, 0.0, atol=1e-12)

    def test_rect_examples(self):
        assert polar_rect_probability(1.0, np.inf, 2 * math.pi) == 1.0
        np.testing.assert_allclose(polar_rect_probability(1.0, math.sqrt(2 * math.log(2)), 2 * math.pi), 0.5, rtol=1e-15)
        np.testing.assert_allclose(polar_rect_probability(1.0, 1.0, math.pi / 2), 0.25 * (1 - math.exp(-0.5)), rtol=1e-15)
        np.testing.assert_allclose(polar_rect_probability(1.0, 1.0, math.pi / 2), 0.0983673, atol=1e-7)

    @pytest.mark.parametrize("args", [(0, 1, 1), (1, 0, 1), (1, 1, 0), (1, 1, 7.0)])
    def test_rect_domain(self, args):
        with pytest.raises(ValueError):
            polar_rect_probability(*args)

    def test_rect_monte_carlo(self):
        sigma = 1.7
        model = ProductQuasiGaussian.iid(make_params(0, 0, 0, sigma, 0.5), 2)
        rho, theta = to_polar(*sample_vector(model, 77, 100_000).T)
        for r, phi in [(1.0, 0.7), (2.5, 4.0), (4.0, 2 * math.pi)]:
            p = polar_rect_probability(sigma, r, phi)
            est = np.mean((rho < r) & (theta < phi))
            assert abs(est - p) < 3 * math.sqrt(p * (1 - p) / rho.size) + 1e-12


class TestSpherical:
    def test_basis_vector(self):
        radius, angles = to_spherical(np.array([1.0, 0.0, 0.0, 0.0]))
        assert radius == 1.0
        np.testing.assert_array_equal(angles, 0.0)

    def test_ones(self):
        radius, angles = to_spherical(np.array([1.0, 1.0, 1.0]))
        np.testing.assert_allclose(radius, math.sqrt(3), rtol=1e-15)
        # brute-force inverse: x1 = r cos t1, x2 = r sin t1 cos t2, x3 = r sin t1 sin t2
        t1 = math.acos(1 / math.sqrt(3))
        np.testing.assert_allclose(angles, [t1, math.pi / 4], rtol=1e-14)
        np.testing.assert_allclose(from_spherical(radius, angles), 1.0, rtol=1e-14)

    @pytest.mark.parametrize("d", [2, 3, 5, 8])
    def test_round_trip(self, d, rng):
        for _ in range(50):
            x = rng.normal(size=d) * rng.uniform(0.1, 10)
            radius, angles = to_spherical(x)
            assert np.all(angles[:-1] >= 0) and np.all(angles[:-1] <= math.pi)
            assert 0 <= angles[-1] < 2 * math.pi
            np.testing.assert_allclose(from_spherical(radius, angles), x, atol=1e-12 * radius)

    def test_errors(self):
        with pytest.raises(DegeneratePointError):
            to_spherical(np.zeros(3))
        with pytest.raises(ValueError):
            to_spherical(np.array([1.0]))


class TestCsv:
    def test_round_trip(self, tmp_path, rng):
        data = rng.normal(size=(20, 3)) * 10.0 ** rng.integers(-20, 20, size=(20, 3))
        path = tmp_path / "s.csv"
        multivar.write_csv(path, data)
        text = path.read_bytes()
        assert text.startswith(b"x1,x2,x3\n") and b"\r" not in text
        np.testing.assert_array_equal(multivar.read_csv(path), data)
        np.testing.assert_array_equal(multivar.read_csv(path, ["x3", "x1"]), data[:, [2, 0]])
        with pytest.raises(ValueError):
            multivar.read_csv(path, ["y"])

    def test_one_column(self, tmp_path):
        path = tmp_path / "v.csv"
        multivar.write_csv(path, np.array([0.1, 1 / 3]))
        assert path.read_text() == "x1\n0.10000000000000001\n0.33333333333333331\n"
