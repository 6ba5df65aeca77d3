import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "chronoline",
    derandomize=True,
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("chronoline")


@pytest.fixture
def ortho_anchors():
    """Orthonormal-basis anchors for years 1700..1702."""
    from chronoline import TimeAnchorSet

    e = np.eye(3)
    return TimeAnchorSet(
        y_min=1700, y_max=1702, anchors={1700 + i: e[i] for i in range(3)}
    )
