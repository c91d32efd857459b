import json

import pytest

from orthantwalks.stepsets import validate_stepset

UNIT_STEPS = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, 0, 0], [0, -1, 0], [0, 0, -1]]


def flagship_raw():
    # up-steps weight 1, down-steps weight 2: drift (-1,-1,-1)
    return [(s, 1 if sum(s) > 0 else 2) for s in UNIT_STEPS]


@pytest.fixture(scope="session")
def flagship():
    return validate_stepset(flagship_raw())


@pytest.fixture(scope="session")
def zero_drift():
    return validate_stepset([(s, 1) for s in UNIT_STEPS])


@pytest.fixture(scope="session")
def unit_z():
    # unweighted steps with -e2 doubled: minimizer has x* = z* = 1
    raw = [(s, 1) for s in UNIT_STEPS]
    raw[4] = ([0, -1, 0], 2)
    return validate_stepset(raw)


@pytest.fixture
def model_file(tmp_path):
    def write(stepset, name="model.json", **extra):
        doc = {"steps": [{"step": list(s), "weight": w} for s, w in stepset.entries]}
        doc.update(extra)
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return write
