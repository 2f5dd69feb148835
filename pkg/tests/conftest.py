import numpy as np
import pytest

from gck.graph import MULTI_CLASS, AttributeSet


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_attrs(n, feature_dim=3, label_of=None, num_labels=2, seed=0,
               train=None, val=None, test=None):
    """AttributeSet helper: one-hot labels, uniform features, all-train by default."""
    r = np.random.default_rng(seed)
    features = r.random((n, feature_dim))
    label_of = np.zeros(n, dtype=int) if label_of is None else np.asarray(label_of)
    labels = np.zeros((n, num_labels))
    labels[np.arange(n), label_of] = 1.0
    train = np.ones(n, dtype=bool) if train is None else train
    val = np.zeros(n, dtype=bool) if val is None else val
    test = np.zeros(n, dtype=bool) if test is None else test
    return AttributeSet(features, labels, train, val, test, MULTI_CLASS)
