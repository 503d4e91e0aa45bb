"""Covariance reconstruction from joint quadrature samples, plus a Gaussianity check."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .criteria import ppt_nu_min
from .cv_core import UnphysicalStateError, is_physical, symplectic_eigenvalues

COLUMNS = ("p1", "q1", "p2", "q2")
MIN_SAMPLES_ESTIMATE = 16
MIN_SAMPLES_GAUSSIANITY = 100
DEFAULT_RESAMPLES = 200
GAUSSIANITY_SIGMAS = 5.0

# rows of the map from (p1, q1, p2, q2) to the EPR combinations
_EPR = np.array(
    [
        [1, 0, -1, 0],  # p_minus
        [1, 0, 1, 0],  # p_plus
        [0, 1, 0, 1],  # q_plus
        [0, 1, 0, -1],  # q_minus
    ]
) / np.sqrt(2)
_EPR_NAMES = ("p_minus", "p_plus", "q_plus", "q_minus")


class TooFewSamplesError(ValueError):
    pass


@dataclass
class QuadratureRecord:
    """Joint samples of ``(p1, q1, p2, q2)``, one row per sample."""

    samples: np.ndarray
    label: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 2 or self.samples.shape[1] != 4:
            raise ValueError(f"samples must have shape (N, 4), got {self.samples.shape}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("samples contain non-finite values")

    def __len__(self):
        return self.samples.shape[0]


@dataclass
class CovarianceEstimate:
    matrix: np.ndarray
    stderr: np.ndarray
    n_samples: int
    nu_min: float
    nu_min_stderr: float
    nu_phys: float
    nu_phys_stderr: float
    positive_definite: bool

    def is_physical(self, tol=1e-3):
        return self.positive_definite and self.nu_phys >= 1 - tol


@dataclass
class GaussianityReport:
    channels: tuple
    skewness: np.ndarray
    excess_kurtosis: np.ndarray
    skew_threshold: float
    kurtosis_threshold: float

    @property
    def passed(self):
        return bool(
            np.all(np.abs(self.skewness) <= self.skew_threshold)
            and np.all(np.abs(self.excess_kurtosis) <= self.kurtosis_threshold)
        )

    def failures(self):
        out = []
        for name, s, k in zip(self.channels, self.skewness, self.excess_kurtosis):
            if abs(s) > self.skew_threshold:
                out.append(f"{name}: skewness {s:.4g}")
            if abs(k) > self.kurtosis_threshold:
                out.append(f"{name}: excess kurtosis {k:.4g}")
        return out

    def as_dict(self):
        return {
            "passed": self.passed,
            "skew_threshold": self.skew_threshold,
            "kurtosis_threshold": self.kurtosis_threshold,
            "channels": {
                name: {"skewness": float(s), "excess_kurtosis": float(k)}
                for name, s, k in zip(self.channels, self.skewness, self.excess_kurtosis)
            },
        }


def _sample_cov(x):
    c = np.cov(x, rowvar=False, ddof=1)
    return 0.5 * (c + c.T)


def estimate_covariance(record, n_resamples=DEFAULT_RESAMPLES, seed=0,
                        min_samples=MIN_SAMPLES_ESTIMATE):
    """Unbiased sample covariance with bootstrap standard errors.

    The estimate is not projected onto physical states: ``nu_phys`` (smallest
    symplectic eigenvalue) and ``positive_definite`` report how close it is.
    ``nu_min`` is the PPT eigenvalue. Bootstrap resamples
    are drawn from ``numpy.random.default_rng(seed)`` so results are
    reproducible. ``n_resamples=0`` skips the bootstrap (errors are NaN).
    """
    x = record.samples
    n = len(record)
    if n < max(min_samples, 2):
        raise TooFewSamplesError(f"too few samples: {n} < {max(min_samples, 2)}")
    V = _sample_cov(x)
    nu = float(ppt_nu_min(V))
    nu_phys = float(symplectic_eigenvalues(V, check=False)[0])
    if n_resamples > 0:
        rng = np.random.default_rng(seed)
        boot = np.empty((n_resamples, 4, 4))
        for b in range(n_resamples):
            boot[b] = _sample_cov(x[rng.integers(0, n, n)])
        stderr = boot.std(axis=0, ddof=1)
        nu_se = float(np.std(ppt_nu_min(boot), ddof=1))
        phys_se = float(np.std(symplectic_eigenvalues(boot, check=False)[:, 0], ddof=1))
    else:
        stderr = np.full((4, 4), np.nan)
        nu_se = phys_se = float("nan")
    pos_def = bool(np.all(np.linalg.eigvalsh(V) > 0))
    return CovarianceEstimate(V, stderr, n, nu, nu_se, nu_phys, phys_se, pos_def)


def gaussianity_check(record, sigmas=GAUSSIANITY_SIGMAS, min_samples=MIN_SAMPLES_GAUSSIANITY):
    """Skewness and excess kurtosis of each quadrature and each EPR combination.

    Thresholds are ``sigmas`` times the asymptotic standard errors
    ``sqrt(6/N)`` and ``sqrt(24/N)`` of a Gaussian sample.
    """
    n = len(record)
    if n < min_samples:
        raise TooFewSamplesError(f"too few samples: {n} < {min_samples}")
    x = np.hstack([record.samples, record.samples @ _EPR.T])
    return GaussianityReport(
        channels=COLUMNS + _EPR_NAMES,
        skewness=stats.skew(x, axis=0),
        excess_kurtosis=stats.kurtosis(x, axis=0, fisher=True),
        skew_threshold=sigmas * np.sqrt(6 / n),
        kurtosis_threshold=sigmas * np.sqrt(24 / n),
    )


def synthesize_record(V, n, seed=0, tol=1e-9, label=""):
    """Draw ``n`` zero-mean Gaussian samples with covariance ``V``.

    Deterministic in ``(V, n, seed)``.
    """
    if not is_physical(V, tol):
        raise UnphysicalStateError("cannot sample an unphysical state")
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    L = np.linalg.cholesky(np.asarray(V, dtype=float))
    return QuadratureRecord(rng.standard_normal((n, 4)) @ L.T, label=label)


def read_record(path):
    """Read a sample CSV with header ``p1,q1,p2,q2``.

    A JSON sidecar ``<path>.json`` (or same stem with ``.json``) is merged into
    ``metadata`` when present.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError(f"{path}: empty sample file") from None
        if tuple(header) != COLUMNS:
            raise ValueError(f"{path}: header must be {','.join(COLUMNS)}, got {','.join(header)}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric value") from None
    metadata = {}
    for sidecar in (path.with_suffix(path.suffix + ".json"), path.with_suffix(".json")):
        if sidecar.exists() and sidecar != path:
            metadata = json.loads(sidecar.read_text())
            break
    samples = np.array(rows, dtype=float).reshape(-1, 4)
    return QuadratureRecord(samples, label=metadata.get("label", path.stem), metadata=metadata)


def write_record(record, path):
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        writer.writerows([repr(float(c)) for c in row] for row in record.samples)
