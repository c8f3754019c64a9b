import numpy as np
import pytest
from hypothesis import settings

from mirrorsweep.geometry import CameraIntrinsics

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def k256():
    return CameraIntrinsics(221.7, 221.7, 127.5, 127.5, 256, 256)


def random_intrinsics(rng) -> CameraIntrinsics:
    w, h = int(rng.integers(64, 640)), int(rng.integers(64, 480))
    f = rng.uniform(0.5, 2.0) * w
    return CameraIntrinsics(f, f * rng.uniform(0.9, 1.1), rng.uniform(0.3, 0.7) * w,
                            rng.uniform(0.3, 0.7) * h, w, h)


def random_plane(rng) -> np.ndarray:
    """``w`` of a plane at distance 0.5..5 from the camera."""
    n = rng.normal(size=3)
    n /= np.linalg.norm(n)
    return n / rng.uniform(0.5, 5.0)


# one line per acceptance criterion, printed after the run
ACCEPTANCE: dict = {}


def record_criterion(num: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[num] = f"criterion {num}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[num])
