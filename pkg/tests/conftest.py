from __future__ import annotations

import pytest

from rlncart.experiment import ExperimentConfig


@pytest.fixture
def config_1sv() -> ExperimentConfig:
    return ExperimentConfig(mode="1SV")


@pytest.fixture
def config_2sv() -> ExperimentConfig:
    return ExperimentConfig(mode="2SV")
