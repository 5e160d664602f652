import numpy as np
import pytest

import fkb_exporter.bridge  # noqa: F401  (silences the legacy-save chatter)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
