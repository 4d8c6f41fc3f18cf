import numpy as np
import pytest

from fairkc.fairness import FairnessParams, GroupModel
from fairkc.geometry import PointSet

R, G, B = 0, 1, 2

# Three centers on a triangle, radius 6. Points listed in 1-based order 1..16 so
# that the centers are points 3, 7, 13, point 6 lies only in ball 2, point 11 in
# all three balls and point 12 in balls 1 and 3.
WORKED_LAMBDA = 6.0
WORKED_POINTS = [
    ((-1.0, -1.0), R, 0b001),   # 1
    ((-1.5, 0.0), G, 0b001),    # 2
    ((0.0, 0.0), G, 0b001),     # 3  center 1
    ((0.0, -1.5), B, 0b001),    # 4
    ((11.0, -1.0), R, 0b010),   # 5
    ((11.5, 0.0), R, 0b010),    # 6
    ((10.0, 0.0), G, 0b010),    # 7  center 2
    ((10.0, -1.5), B, 0b010),   # 8
    ((7.5, 4.0), R, 0b110),     # 9
    ((7.3, 4.5), B, 0b110),     # 10
    ((5.0, 2.9), R, 0b111),     # 11
    ((2.5, 4.0), B, 0b101),     # 12
    ((5.0, 8.0), R, 0b100),     # 13 center 3
    ((4.0, 9.0), G, 0b100),     # 14
    ((6.0, 9.0), G, 0b100),     # 15
    ((5.0, 9.5), B, 0b100),     # 16
]
WORKED_CENTERS = (2, 6, 12)

# (color, joiner) -> count for the instance above
WORKED_TABLE = {
    ((R,), 0b001): 1, ((G,), 0b001): 2, ((B,), 0b001): 1,
    ((R,), 0b010): 2, ((G,), 0b010): 1, ((B,), 0b010): 1,
    ((R,), 0b100): 1, ((G,), 0b100): 2, ((B,), 0b100): 1,
    ((B,), 0b101): 1,
    ((R,), 0b110): 1, ((B,), 0b110): 1,
    ((R,), 0b111): 1,
}


@pytest.fixture
def worked():
    points = PointSet([p for p, _, _ in WORKED_POINTS])
    model = GroupModel.from_labels([c for _, c, _ in WORKED_POINTS], names=("red", "green", "blue"))
    return points, model


def random_instance(rng, n, k_groups, dim=2, overlap=0.0):
    """Uniform points with random (possibly overlapping) group memberships."""
    points = PointSet(rng.uniform(0, 10, size=(n, dim)))
    groups = []
    for _ in range(n):
        g = {int(rng.integers(k_groups))}
        if k_groups > 1 and rng.random() < overlap:
            g.add(int(rng.integers(k_groups)))
        groups.append(g)
    return points, GroupModel.from_memberships(groups, n_groups=k_groups)


def random_params(rng, model, loose=False):
    """Random alpha/beta around the group ratios."""
    r = model.ratios
    if loose:
        return FairnessParams(np.ones_like(r), np.zeros_like(r))
    slack = rng.uniform(0.0, 0.6)
    alpha = np.minimum(1.0, r + slack * (1 - r))
    beta = r * rng.uniform(0.0, 1.0) * (1 - slack)
    return FairnessParams(alpha, beta)


# acceptance criteria record one line each here; printed after the run
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[number])
