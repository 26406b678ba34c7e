"""Synthetic posteriors, corruptions, and annotation sampling."""

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, strategies as st

from bayeserr.errors import DomainError
from bayeserr.rng import Seed
from bayeserr.synthdata import (
    CorruptionSpec,
    GaussianMixtureSpec,
    beta_corruption,
    corrupt,
    corrupted_hard_label_pipeline,
    invert_beta_corruption,
    label_flip_posteriors,
    logit_gaussian_corruption,
    posterior_gaussian_mixture,
    sample_gaussian_mixture,
    sample_hard_labels,
)

MIX = GaussianMixtureSpec(theta=0.4, mu0=(0.0, 0.0), mu1=(2.0, 2.0))

open_unit = st.floats(min_value=1e-9, max_value=1.0 - 1e-9, allow_nan=False)


def test_posterior_matches_bayes_rule():
    # Direct density ratio, written independently of the implementation.
    rng = np.random.default_rng(0)
    x = rng.normal(size=(50, 2)) * 2
    d0 = scipy.stats.multivariate_normal(MIX.mu0, np.eye(2)).pdf(x)
    d1 = scipy.stats.multivariate_normal(MIX.mu1, np.eye(2)).pdf(x)
    expected = 0.4 * d1 / (0.4 * d1 + 0.6 * d0)
    np.testing.assert_allclose(posterior_gaussian_mixture(x, MIX), expected, rtol=1e-10)


def test_posterior_overlapping_components_is_prior():
    spec = GaussianMixtureSpec(theta=0.5, mu0=(0.0, 0.0), mu1=(0.0, 0.0))
    x = np.random.default_rng(1).normal(size=(20, 2))
    np.testing.assert_allclose(posterior_gaussian_mixture(x, spec), 0.5)


def test_posterior_scale_parameter():
    spec = GaussianMixtureSpec(theta=0.4, mu0=(0.0,), mu1=(2.0,), scale=4.0)
    x = np.array([[1.0]])
    d0 = scipy.stats.norm(0.0, 2.0).pdf(1.0)
    d1 = scipy.stats.norm(2.0, 2.0).pdf(1.0)
    expected = 0.4 * d1 / (0.4 * d1 + 0.6 * d0)
    assert posterior_gaussian_mixture(x, spec)[0] == pytest.approx(expected, rel=1e-12)


def test_mixture_spec_validation():
    with pytest.raises(DomainError):
        GaussianMixtureSpec(theta=0.0, mu0=(0.0,), mu1=(1.0,))
    with pytest.raises(DomainError):
        GaussianMixtureSpec(theta=0.4, mu0=(0.0,), mu1=(1.0, 2.0))
    with pytest.raises(DomainError):
        GaussianMixtureSpec(theta=0.4, mu0=(0.0,), mu1=(1.0,), scale=0.0)


def test_sample_gaussian_mixture_shapes_and_determinism():
    etas, x = sample_gaussian_mixture(MIX, 500, Seed(3))
    assert etas.shape == (500,) and x.shape == (500, 2)
    assert etas.min() > 0.0 and etas.max() < 1.0
    etas2, x2 = sample_gaussian_mixture(MIX, 500, Seed(3))
    np.testing.assert_array_equal(etas, etas2)
    np.testing.assert_array_equal(x, x2)
    np.testing.assert_allclose(etas, posterior_gaussian_mixture(x, MIX), rtol=1e-12)


def test_sample_gaussian_mixture_class_balance():
    spec = GaussianMixtureSpec(theta=0.25, mu0=(0.0,), mu1=(8.0,))
    etas, x = sample_gaussian_mixture(spec, 40_000, Seed(5))
    # Far-separated means make eta > 1/2 a reliable component indicator.
    assert abs((etas > 0.5).mean() - 0.25) < 0.01


def test_label_flip_posteriors():
    etas = label_flip_posteriors(0.1, 1000, Seed(2))
    assert set(np.unique(etas)) == {0.1, 0.9}
    assert abs((etas == 0.9).mean() - 0.5) < 0.05
    with pytest.raises(DomainError):
        label_flip_posteriors(0.5, 10, Seed(0))
    with pytest.raises(DomainError):
        label_flip_posteriors(1.2, 10, Seed(0))


def test_beta_corruption_known_points():
    assert beta_corruption(0.5, 2.0, 0.7) == pytest.approx(0.7)
    assert beta_corruption(0.3, 1.0, 0.5) == pytest.approx(0.3, abs=1e-12)
    assert beta_corruption(0.0, 2.0, 0.7) == 0.0
    assert beta_corruption(1.0, 2.0, 0.7) == 1.0


@given(
    st.floats(min_value=1e-4, max_value=1.0 - 1e-4),
    st.floats(min_value=0.5, max_value=3.0),
    st.floats(min_value=0.05, max_value=0.95),
)
def test_beta_corruption_round_trip(p, a, b):
    # Inversion is exact while the corrupted value stays clear of the
    # logit clipping region near 0 and 1.
    q = beta_corruption(p, a, b)
    assert 0.0 <= q <= 1.0
    back = invert_beta_corruption(q, a, b)
    assert back == pytest.approx(p, abs=1e-9)


@given(st.floats(min_value=0.2, max_value=5.0), open_unit)
def test_beta_corruption_is_increasing(a, b):
    p = np.linspace(0.0, 1.0, 101)
    q = beta_corruption(p, a, b)
    assert np.all(np.diff(q) > 0.0)


def test_logit_gaussian_reduces_to_beta_at_zero_sigma():
    p = np.linspace(0.01, 0.99, 50)
    noiseless = logit_gaussian_corruption(p, 2.0, 0.7, 0.0, Seed(1))
    np.testing.assert_array_equal(noiseless, beta_corruption(p, 2.0, 0.7))


def test_logit_gaussian_noise_is_seeded():
    p = np.linspace(0.01, 0.99, 50)
    a = logit_gaussian_corruption(p, 2.0, 0.7, 0.3, Seed(4))
    b = logit_gaussian_corruption(p, 2.0, 0.7, 0.3, Seed(4))
    c = logit_gaussian_corruption(p, 2.0, 0.7, 0.3, Seed(5))
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    assert a.min() >= 0.0 and a.max() <= 1.0


def test_logit_gaussian_preserves_endpoints():
    p = np.array([0.0, 1.0, 0.5])
    out = logit_gaussian_corruption(p, 2.0, 0.7, 0.5, Seed(9))
    assert out[0] == 0.0 and out[1] == 1.0
    assert 0.0 < out[2] < 1.0


def test_corrupt_dispatch():
    p = np.linspace(0.05, 0.95, 20)
    np.testing.assert_array_equal(corrupt(p, CorruptionSpec("identity")), p)
    np.testing.assert_array_equal(
        corrupt(p, CorruptionSpec("beta", a=2.0, b=0.7)), beta_corruption(p, 2.0, 0.7)
    )
    noisy = corrupt(p, CorruptionSpec("logit-gaussian", a=2.0, b=0.7, sigma=0.2), seed=Seed(3))
    np.testing.assert_array_equal(
        noisy, logit_gaussian_corruption(p, 2.0, 0.7, 0.2, Seed(3))
    )
    with pytest.raises(DomainError):
        corrupt(p, CorruptionSpec("logit-gaussian", sigma=0.2))  # needs a seed


def test_corruption_spec_validation():
    with pytest.raises(DomainError):
        CorruptionSpec("nope")
    with pytest.raises(DomainError):
        CorruptionSpec("beta", a=0.0)
    with pytest.raises(DomainError):
        CorruptionSpec("beta", b=1.0)
    with pytest.raises(DomainError):
        CorruptionSpec("logit-gaussian", sigma=-0.1)


def test_sample_hard_labels_moments():
    etas = np.full(5000, 0.3)
    counts = sample_hard_labels(etas, 20, Seed(6))
    assert counts.min() >= 0 and counts.max() <= 20
    assert abs(counts.mean() / 20 - 0.3) < 0.01
    # Binomial variance m p (1-p).
    assert abs(counts.var() - 20 * 0.3 * 0.7) < 0.2


def test_sample_hard_labels_determinism():
    etas = np.random.default_rng(0).random(100)
    a = sample_hard_labels(etas, 7, Seed(8))
    b = sample_hard_labels(etas, 7, Seed(8))
    np.testing.assert_array_equal(a, b)


def test_pipeline_shapes_and_streams():
    etas = np.random.default_rng(1).random(300)
    spec = CorruptionSpec("beta", a=2.0, b=0.5)
    scores, labels = corrupted_hard_label_pipeline(etas, spec, 10, Seed(11))
    assert scores.shape == labels.shape == (300,)
    assert set(np.unique(labels)) <= {0, 1}
    assert np.all((scores * 10) % 1 == pytest.approx(0.0, abs=1e-9))
    # Without averaging, scores are the corrupted posteriors themselves.
    raw_scores, raw_labels = corrupted_hard_label_pipeline(etas, spec, None, Seed(11))
    np.testing.assert_array_equal(raw_scores, beta_corruption(etas, 2.0, 0.5))
    np.testing.assert_array_equal(raw_labels, labels)


def test_pipeline_labels_follow_clean_posteriors():
    etas = np.full(30_000, 0.2)
    spec = CorruptionSpec("beta", a=3.0, b=0.8)
    _, labels = corrupted_hard_label_pipeline(etas, spec, 5, Seed(12))
    # Corruption moves the scores but the labels stay tied to the clean eta.
    assert abs(labels.mean() - 0.2) < 0.01
