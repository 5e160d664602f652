import numpy as np
import pytest

from fkb.activations import ActivationSpec
from fkb.model_format import DenseSpec, ModelSpec


@pytest.fixture
def identity_spec():
    return ModelSpec(input_dim=2, layers=[
        DenseSpec(weights=np.eye(2), biases=np.zeros(2),
                  activation=ActivationSpec("linear"))])
