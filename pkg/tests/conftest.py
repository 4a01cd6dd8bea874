from pathlib import Path

import pytest
from PIL import Image


@pytest.fixture
def frame_factory():
    """Factory writing small numbered frame images into a directory."""

    def make(
        directory: Path,
        count: int,
        size: tuple[int, int] = (64, 48),
        fmt: str = "jpg",
        start: int = 0,
    ) -> Path:
        directory.mkdir(parents=True, exist_ok=True)
        for i in range(count):
            color = ((i * 37) % 256, (i * 11) % 256, 200)
            Image.new("RGB", size, color).save(directory / f"frame_{start + i:06d}.{fmt}")
        return directory

    return make
