import json
import math

import numpy as np
import pytest

from cvesd import Region, UnphysicalStateError, classify_oracle, embed, two_mode_squeezed, vacuum
from cvesd.ingest import (
    QuadratureRecord,
    TooFewSamplesError,
    estimate_covariance,
    gaussianity_check,
    read_record,
    synthesize_record,
    write_record,
)
from oracles import random_physical_matrix

FRAGILE = embed((0.5, 2.1, 1.7, 2.05))
ROBUST = embed((0.5, 3.0, 0.5, 3.0))


@pytest.fixture(scope="module")
def vacuum_estimate():
    return estimate_covariance(synthesize_record(vacuum(), 100_000, seed=1), seed=2)


@pytest.fixture(scope="module")
def fragile_estimate():
    return estimate_covariance(synthesize_record(FRAGILE, 100_000, seed=3), seed=4)


class TestRecord:
    @pytest.mark.parametrize("bad", [np.zeros((5, 3)), np.zeros(4), [[0, 0, 0, np.inf]]])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            QuadratureRecord(bad)

    def test_len(self):
        assert len(QuadratureRecord(np.zeros((7, 4)))) == 7


class TestEstimate:
    def test_vacuum_within_three_stderr(self, vacuum_estimate):
        est = vacuum_estimate
        assert est.n_samples == 100_000
        assert np.all(np.abs(est.matrix - np.eye(4)) <= 3 * est.stderr)

    def test_fragile_round_trip(self, fragile_estimate):
        est = fragile_estimate
        assert np.all(np.abs(est.matrix - FRAGILE) <= 3 * est.stderr)
        assert abs(est.nu_min - math.sqrt(0.85)) <= 3 * est.nu_min_stderr
        assert est.positive_definite and est.is_physical()

    def test_exactly_symmetric(self, rng):
        est = estimate_covariance(QuadratureRecord(rng.normal(size=(50, 4))), n_resamples=5)
        assert np.array_equal(est.matrix, est.matrix.T)

    def test_unbiased_divisor(self):
        x = np.array([[1.0, 0, 0, 0], [-1.0, 0, 0, 0]] * 10)
        est = estimate_covariance(QuadratureRecord(x), n_resamples=0)
        assert est.matrix[0, 0] == pytest.approx(20 / 19, abs=1e-15)

    def test_mean_subtracted(self, rng):
        x = rng.normal(size=(200, 4))
        a = estimate_covariance(QuadratureRecord(x), n_resamples=0).matrix
        b = estimate_covariance(QuadratureRecord(x + 5.0), n_resamples=0).matrix
        np.testing.assert_allclose(a, b, atol=1e-12)

    @pytest.mark.parametrize("n", [1, 4, 15])
    def test_too_few(self, n):
        with pytest.raises(TooFewSamplesError, match="too few samples"):
            estimate_covariance(QuadratureRecord(np.ones((n, 4))))

    def test_min_samples_configurable(self, rng):
        est = estimate_covariance(QuadratureRecord(rng.normal(size=(4, 4))), min_samples=3, n_resamples=3)
        assert est.n_samples == 4

    def test_no_repair(self):
        # perfectly anticorrelated p's: singular and reported as such
        x = np.random.default_rng(0).normal(size=(100, 4))
        x[:, 2] = -x[:, 0]
        est = estimate_covariance(QuadratureRecord(x), n_resamples=0)
        assert not est.positive_definite and not est.is_physical()
        assert math.isnan(est.nu_min_stderr)

    def test_bootstrap_seeded(self, rng):
        rec = QuadratureRecord(rng.normal(size=(300, 4)))
        a, b = estimate_covariance(rec, seed=9), estimate_covariance(rec, seed=9)
        assert np.array_equal(a.stderr, b.stderr)
        assert not np.array_equal(a.stderr, estimate_covariance(rec, seed=10).stderr)

    def test_stderr_scale(self, vacuum_estimate):
        # var of a Gaussian sample variance is 2 sigma^4 / N
        diag = np.diag(vacuum_estimate.stderr)
        np.testing.assert_allclose(diag, math.sqrt(2 / 100_000), rtol=0.25)


class TestSynthesize:
    def test_deterministic(self):
        a = synthesize_record(vacuum(), 1000, seed=5)
        b = synthesize_record(vacuum(), 1000, seed=5)
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, synthesize_record(vacuum(), 1000, seed=6).samples)

    def test_rejects_unphysical(self):
        with pytest.raises(UnphysicalStateError):
            synthesize_record(np.diag([0.5, 0.5, 1.0, 1.0]), 10)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            synthesize_record(vacuum(), 0)

    def test_convergence_rate(self, rng):
        V = random_physical_matrix(rng)
        errs = []
        for n in (1_000, 100_000):
            e = [np.abs(estimate_covariance(synthesize_record(V, n, seed=s), n_resamples=0).matrix - V).max()
                 for s in range(10)]
            errs.append(np.mean(e))
        assert 0.1 / 3 <= errs[1] / errs[0] <= 0.1 * 3


class TestGaussianity:
    def test_gaussian_passes(self):
        report = gaussianity_check(synthesize_record(FRAGILE, 20_000, seed=1))
        assert report.passed and report.failures() == []
        assert len(report.channels) == 8
        assert report.skew_threshold == pytest.approx(5 * math.sqrt(6 / 20_000))
        assert report.kurtosis_threshold == pytest.approx(5 * math.sqrt(24 / 20_000))

    def test_bernoulli_fails_on_kurtosis(self, rng):
        x = rng.choice([-1.0, 1.0], size=(20_000, 4))
        report = gaussianity_check(QuadratureRecord(x))
        assert not report.passed
        # direct fourth and second moments of a +-1 variable
        m = x[:, 0] - x[:, 0].mean()
        assert report.excess_kurtosis[0] == pytest.approx((m**4).mean() / (m**2).mean() ** 2 - 3, abs=1e-12)
        np.testing.assert_allclose(report.excess_kurtosis[:4], -2, atol=0.01)
        assert any("p1: excess kurtosis" in f for f in report.failures())

    def test_exponential_fails_on_skewness(self, rng):
        x = rng.normal(size=(20_000, 4))
        x[:, 1] = rng.exponential(size=20_000)
        report = gaussianity_check(QuadratureRecord(x))
        assert not report.passed
        assert report.skewness[1] == pytest.approx(2, abs=0.2)
        assert any(f.startswith("q1: skewness") for f in report.failures())

    def test_too_few(self, rng):
        with pytest.raises(TooFewSamplesError):
            gaussianity_check(QuadratureRecord(rng.normal(size=(99, 4))))

    def test_as_dict_serializable(self):
        report = gaussianity_check(synthesize_record(vacuum(), 500, seed=0))
        doc = json.loads(json.dumps(report.as_dict()))
        assert set(doc["channels"]) == {"p1", "q1", "p2", "q2", "p_minus", "p_plus", "q_plus", "q_minus"}

    def test_sigmas_configurable(self, rng):
        rec = synthesize_record(vacuum(), 1000, seed=0)
        assert not gaussianity_check(rec, sigmas=1e-6).passed


class TestFiles:
    def test_round_trip(self, tmp_path):
        rec = synthesize_record(FRAGILE, 50, seed=0)
        path = tmp_path / "run.csv"
        write_record(rec, path)
        back = read_record(path)
        assert np.array_equal(back.samples, rec.samples)
        assert back.label == "run"

    def test_sidecar(self, tmp_path):
        path = tmp_path / "run.csv"
        write_record(synthesize_record(vacuum(), 20, seed=0), path)
        (tmp_path / "run.json").write_text(json.dumps({"label": "day 3", "pump": 0.8}))
        rec = read_record(path)
        assert rec.label == "day 3" and rec.metadata["pump"] == 0.8

    @pytest.mark.parametrize(
        "text,match",
        [
            ("", "empty"),
            ("p1,q1,p2\n1,2,3\n", "header"),
            ("p1,q1,p2,q2\n1,2,3\n", "expected 4 columns"),
            ("p1,q1,p2,q2\n1,2,x,4\n", "non-numeric"),
            ("p1,q1,p2,q2\n1,2,nan,4\n", "non-finite"),
        ],
    )
    def test_malformed(self, tmp_path, text, match):
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(ValueError, match=match):
            read_record(path)


def test_classification_stability():
    robust = 0
    for seed in range(100):
        est = estimate_covariance(synthesize_record(ROBUST, 100_000, seed=seed), n_resamples=0)
        robust += classify_oracle(est.matrix, tol=1e-3).region is Region.ROBUST
    assert robust >= 95


def test_pure_state_estimate_classifies_robust():
    est = estimate_covariance(synthesize_record(two_mode_squeezed(0.8), 100_000, seed=0), n_resamples=0)
    assert classify_oracle(est.matrix, tol=1e-2).region is Region.ROBUST
