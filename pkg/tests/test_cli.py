import json

import numpy as np
import pytest

from quasigauss import cli, mixture, multivar, qgauss
from quasigauss.mixture import MixtureModel
from quasigauss.multivar import ProductQuasiGaussian
from quasigauss.qgauss import make_params


def run(*argv):
    return cli.main([str(a) for a in argv])


@pytest.fixture
def params_file(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(qgauss.params_to_json(make_params(0.5, 2.0, 1.0, 1.2, 0.4)))
    return path


@pytest.fixture(scope="module")
def bimodal(tmp_path_factory):
    d = tmp_path_factory.mktemp("bimodal")
    truth = MixtureModel(
        (0.5, 0.5),
        (ProductQuasiGaussian((make_params(-3, 0, 0, 1, 0.5),)), ProductQuasiGaussian((make_params(3, 2, 2, 1, 0.5),))),
    )
    model = d / "truth.json"
    model.write_text(mixture.model_to_json(truth))
    data = d / "s.csv"
    assert run("sample", "--model", model, "--n", 20_000, "--seed", 7, "--out", data) == 0
    return truth, model, data


class TestSample:
    def test_rerun_identical(self, params_file, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run("sample", "--model", params_file, "--n", 1000, "--seed", 7, "--out", a) == 0
        assert run("sample", "--model", params_file, "--n", 1000, "--seed", 7, "--out", b) == 0
        assert a.read_bytes() == b.read_bytes()
        assert multivar.read_csv(a).shape == (1000, 1)

    def test_stdout_matches_file(self, params_file, tmp_path, capsys):
        run("sample", "--model", params_file, "--n", 5, "--seed", 1, "--out", tmp_path / "f.csv")
        run("sample", "--model", params_file, "--n", 5, "--seed", 1)
        assert capsys.readouterr().out == (tmp_path / "f.csv").read_text()

    def test_mixture_model(self, bimodal):
        truth, _, data = bimodal
        x = multivar.read_csv(data)
        np.testing.assert_array_equal(x, mixture.sample_mixture(truth, 7, 20_000))


class TestEvaluate:
    def test_pdf_grid(self, params_file, capsys):
        assert run("pdf", "--model", params_file, "--grid", -1, 2, 4) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "x\tvalue" and len(lines) == 5
        p = qgauss.params_from_json(params_file.read_text())
        x, v = map(float, lines[2].split("\t"))
        assert x == 0.0 and v == qgauss.pdf(p, 0.0)

    def test_cdf_column(self, params_file, tmp_path, capsys):
        data = tmp_path / "pts.csv"
        multivar.write_csv(data, np.array([[1.0, -0.25], [2.0, 3.0]]))
        assert run("cdf", "--model", params_file, "--data", data, "--column", "x2") == 0
        rows = [line.split("\t") for line in capsys.readouterr().out.splitlines()[1:]]
        p = qgauss.params_from_json(params_file.read_text())
        np.testing.assert_array_equal([float(r[1]) for r in rows], qgauss.cdf(p, np.array([-0.25, 3.0])))

    def test_mixture_cdf_with_atom(self, tmp_path, capsys):
        model = MixtureModel((0.6,), (ProductQuasiGaussian((make_params(0, 0, 0, 1, 0.5),)),), mixture.Atom(0.4, 1.0))
        path = tmp_path / "atom.json"
        path.write_text(mixture.model_to_json(model))
        run("cdf", "--model", path, "--grid", 0, 1, 2)
        values = [float(line.split("\t")[1]) for line in capsys.readouterr().out.splitlines()[1:]]
        np.testing.assert_allclose(values, [0.3, 0.6 * 0.8413447460685429 + 0.4], rtol=1e-14)

    def test_moments(self, capsys, tmp_path):
        path = tmp_path / "q.json"
        path.write_text(qgauss.params_to_json(make_params(0, 2, 2, 1, 0.5)))
        assert run("moments", "--model", path) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["second_moment"] == pytest.approx(3.0, abs=1e-12)
        assert out["moments"]["1"]["signed"] == pytest.approx(0.0, abs=1e-15)
        assert out["about"] == "quasi-center"

    def test_degree(self, tmp_path, capsys):
        data = tmp_path / "d.csv"
        multivar.write_csv(data, qgauss.sample(make_params(0, 1, 1, 1, 0.5), 3, 20_000))
        assert run("degree", "--data", data) == 0
        est = json.loads(capsys.readouterr().out)
        assert abs(est["mu_hat"] - 1.0) < 0.3


class TestFitAndVerify:
    def test_fit_dominates_truth(self, bimodal, tmp_path):
        truth, _, data = bimodal
        out, diag = tmp_path / "fit.json", tmp_path / "diag.json"
        assert run("fit", "--data", data, "--components", 2, "--seed", 7, "--out", out, "--diagnostics", diag) == 0
        fitted = mixture.model_from_json(out.read_text())
        x = multivar.read_csv(data)
        assert mixture.log_likelihood(fitted, x) >= mixture.log_likelihood(truth, x) - 10
        trace = json.loads(diag.read_text())["trace"]
        assert np.all(np.diff(trace) >= -1e-9)

    def test_gaussian_round_trip(self, tmp_path):
        model = tmp_path / "g.json"
        model.write_text(qgauss.params_to_json(make_params(2.0, 0, 0, 0.5, 0.5)))
        data, out = tmp_path / "g.csv", tmp_path / "fit.json"
        run("sample", "--model", model, "--n", 2000, "--seed", 3, "--out", data)
        args = ["--alpha-bounds", 0, 0, "--right-mass-bounds", 0.5, 0.5, "--restarts", 1]
        assert run("fit", "--data", data, "--out", out, *args) == 0
        p = mixture.model_from_json(out.read_text()).components[0].coords[0]
        x = multivar.read_csv(data)[:, 0]
        assert abs(p.a - x.mean()) <= 1e-6 and abs(p.sigma - x.std()) <= 1e-6

    def test_verify_unequal_sigma(self, tmp_path):
        out = tmp_path / "v.json"
        assert run("verify", "--sigma1", 1, "--sigma2", 2, "--n", 5000, "--trials", 200, "--out", out) == 0
        report = json.loads(out.read_text())
        assert report["rejection_rate"] >= 0.95
        assert report["trials"] == 200 and report["bins"] == [8, 8]


class TestErrors:
    def _error(self, capsys):
        err = capsys.readouterr().err.strip().splitlines()
        assert len(err) == 1
        return json.loads(err[0])

    def test_missing_file(self, capsys):
        assert run("sample", "--model", "/nonexistent.json", "--n", 3) == 1
        assert self._error(capsys)["error"] == "FileNotFoundError"

    def test_bad_arguments(self, capsys, params_file):
        assert run("nosuchcommand") == 1
        self._error(capsys)
        assert run("sample", "--model", params_file) == 1
        self._error(capsys)
        assert run("pdf", "--model", params_file) == 1
        assert "grid" in self._error(capsys)["message"]
        assert run("moments", "--model", params_file, "--orders", -2.5) == 0
        assert run("verify", "--corr", 1.5, "--trials", 1) == 1
        self._error(capsys)

    def test_unnormalized_model(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"a": 0, "alpha_neg": 0, "alpha_pos": 0, "sigma": 1, "c_neg": 1, "c_pos": 2}))
        assert run("pdf", "--model", path, "--grid", 0, 1, 2) == 1
        assert "normalization" in self._error(capsys)["message"]

    def test_degenerate_fit_exit_code(self, monkeypatch, tmp_path, capsys):
        data = tmp_path / "x.csv"
        multivar.write_csv(data, np.random.default_rng(0).normal(size=100))

        def boom(*args, **kwargs):
            raise mixture.DegenerateFitError("every mixture component degenerated")

        monkeypatch.setattr(mixture, "fit_em", boom)
        assert run("fit", "--data", data) == 2
        assert self._error(capsys)["error"] == "DegenerateFitError"
