import numpy as np
import pytest

import paritywalk as pw


@pytest.fixture(scope="session")
def layout4():
    return pw.build_layout(4)


@pytest.fixture(scope="session")
def layout5():
    return pw.build_layout(5)


@pytest.fixture(scope="session")
def inst4():
    return pw.generate_sk(4, 11).with_ground_state()


@pytest.fixture(scope="session")
def inst5():
    return pw.generate_sk(5, 7).with_ground_state()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
