import numpy as np
import pytest

from histanalysis.corpus import random_message, synthetic_corpus
from histanalysis.image_core import GrayImage
from histanalysis.stego import embed, max_message_bytes


def random_image(rng, height=32, width=32, low=0, high=256):
    return GrayImage.from_array(rng.integers(low, high, (height, width), dtype=np.uint8))


def full_capacity_stego(cover, n_planes, seed):
    return embed(cover, random_message(max_message_bytes(cover, n_planes), seed), n_planes)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def corpus():
    return synthetic_corpus(20, seed=0)


@pytest.fixture(scope="session")
def stegos_1plane(corpus):
    return [full_capacity_stego(c, 1, 1000 + i) for i, c in enumerate(corpus)]
