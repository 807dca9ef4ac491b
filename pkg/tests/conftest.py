"""
Shared fixtures: operator documents, a small wavelet basis and built pipelines
"""

from pathlib import Path

import numpy as np
import pytest

from bicarleman.config import PipelineConfig
from bicarleman.pipeline.assignment import assign
from bicarleman.pipeline.documents import load_operator
from bicarleman.pipeline.kernel import build_kernel_model
from bicarleman.pipeline.splitting import OperatorEnvironment, build_split, normalize_null_sequence
from bicarleman.pipeline.wavelets import WaveletBasis

FIXTURES = Path(__file__).parent / "fixtures"

# Orders up to 2 keep the pipeline tests quick; the CLI tests cover the defaults
TEST_I_MAX = 2


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES


@pytest.fixture(scope="session")
def basis():
    return WaveletBasis.build(i_max=TEST_I_MAX, enumeration_size=64)


@pytest.fixture
def config():
    return PipelineConfig(i_max=TEST_I_MAX, enumeration_size=64)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def build_pipeline(path, basis):
    """(env, split, assignment, model) for an operator document."""
    return pipeline_for(load_operator(path), basis)


def pipeline_for(env, basis):
    env = normalize_null_sequence(env)
    split = build_split(env)
    assignment = assign(env, split, basis, TEST_I_MAX)
    model = build_kernel_model(env, split, assignment, basis, TEST_I_MAX)
    return env, split, assignment, model


@pytest.fixture(scope="session")
def zero_pipeline(basis):
    return build_pipeline(FIXTURES / "zero_operator.json", basis)


@pytest.fixture(scope="session")
def rank_one_pipeline(basis):
    return build_pipeline(FIXTURES / "rank_one.json", basis)


@pytest.fixture
def geometric_env():
    return load_operator(FIXTURES / "geometric.json")


def rank_two_environment(seed):
    """
    dim 8: a random rank-2 block on the complement {0, 1, 2} with norm <= 0.3,
    coupled to the null vector e_3 through S[0, 3] and S[3, 1].
    """
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    b = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    matrix = np.zeros((8, 8), dtype=complex)
    matrix[:3, :3] = 0.3 * (a / np.linalg.norm(a)) @ (b / np.linalg.norm(b))
    matrix[0, 3] = 1e-3
    matrix[3, 1] = 2e-3
    return OperatorEnvironment(matrix, null_indices=range(3, 8), complement_indices=range(3))


@pytest.fixture(scope="session", params=[0, 1, 2], ids=lambda seed: f"seed{seed}")
def rank_two_pipeline(request, basis):
    """(seed, (env, split, assignment, model)) for the rank-2 operator of each seed."""
    return request.param, pipeline_for(rank_two_environment(request.param), basis)
