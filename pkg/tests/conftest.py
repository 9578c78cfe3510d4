import colorsys
import sys
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable


def write_noise_png(path, width, height, rng) -> np.ndarray:
    arr = rng.integers(0, 256, (height, width, 3)).astype(np.uint8)
    Image.fromarray(arr).save(path)
    return arr


def build_noise_corpus(folder: Path, count: int, seed: int = 0, size: int = 48) -> list[Path]:
    folder.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    paths = []
    for i in range(count):
        path = folder / f"img_{i:04d}.png"
        write_noise_png(path, size, size, rng)
        paths.append(path)
    return paths


def hue_sweep_images(count: int = 64, size: int = 32) -> list[np.ndarray]:
    """Uniform-color images sweeping the hue circle at fixed S and V."""
    images = []
    for i in range(count):
        r, g, b = colorsys.hsv_to_rgb(i / count, 0.9, 0.9)
        color = (round(r * 255), round(g * 255), round(b * 255))
        images.append(np.full((size, size, 3), color, dtype=np.uint8))
    return images


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def fixture_corpus(tmp_path_factory) -> Path:
    """300 small noise PNGs shared by the service and acceptance tests."""
    folder = tmp_path_factory.mktemp("corpus300")
    build_noise_corpus(folder, 300, seed=7)
    return folder
