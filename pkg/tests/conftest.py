import pytest

import treecam as tc
from treecam.dataset import load_iris


@pytest.fixture(scope="session")
def iris():
    return load_iris()


@pytest.fixture(scope="session")
def iris_split(iris):
    """Normalized 90/10 split plus the tree trained on it."""
    train, test = tc.split(iris, 0.1, seed=7)
    train_n, params = tc.normalize(train)
    test_n = tc.apply_norm(test, params)
    tree = tc.train_cart(train_n)
    return train_n, test_n, tree


@pytest.fixture(scope="session")
def iris_lut(iris_split):
    _, _, tree = iris_split
    return tc.compile_tree(tree)
