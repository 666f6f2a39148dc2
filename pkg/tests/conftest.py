import random

import pytest

from reminisce.seed import build_demo
from reminisce.service import TherapyService
from reminisce.store import BlobStore, Store


@pytest.fixture
def store():
    return Store()


@pytest.fixture
def blobs(tmp_path):
    return BlobStore(tmp_path / "media")


@pytest.fixture
def service(store, blobs):
    return TherapyService(store, blobs)


@pytest.fixture
def demo(service):
    """Seeded demo dataset; returns the id map from the seeder."""
    return build_demo(service)


@pytest.fixture
def rng():
    return random.Random(20240824)
