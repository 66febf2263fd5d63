"""Shared fixtures: synthetic data and trained checkpoints at two scales."""

import numpy as np
import pytest

from novact.dataset import SynthConfig, synthesize_boxing_set
from novact.network import NetworkSpec
from novact.trainer import TrainingConfig, train

# One fixed seed for every desk-scale artifact in the suite.
DESK_SEED = 0
DESK_EPOCHS = 12000


@pytest.fixture(scope="session")
def boxing_set():
    return synthesize_boxing_set(SynthConfig())


@pytest.fixture(scope="session")
def tiny_checkpoint(boxing_set):
    """A small model trained just long enough that generation from each
    learned latent point classifies as appropriate-learned."""
    spec = NetworkSpec(d=8, j=6, fast=12, mid=8, slow=6)
    config = TrainingConfig(gamma=0.5, epochs=3000, seed=1)
    checkpoint, _ = train(boxing_set, spec, config)
    return checkpoint


@pytest.fixture(scope="session")
def desk_checkpoint(boxing_set):
    """The desk-scale run used by the acceptance criteria."""
    spec = NetworkSpec()
    config = TrainingConfig(gamma=0.5, epochs=DESK_EPOCHS, seed=DESK_SEED)
    checkpoint, curve = train(boxing_set, spec, config)
    return checkpoint, curve
