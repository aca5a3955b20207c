import numpy as np
import pytest

from lidarprep.cloud import PointCloud


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_cloud(rng, n, extent=((0, 70), (-40, 40), (-3, 1))):
    """Uniform random cloud over a box, float32, reflectivity in [0, 1)."""
    (x0, x1), (y0, y1), (z0, z1) = extent
    pts = np.stack(
        [
            rng.uniform(x0, x1, n),
            rng.uniform(y0, y1, n),
            rng.uniform(z0, z1, n),
            rng.random(n),
        ],
        axis=1,
    ).astype(np.float32)
    return PointCloud(pts)
