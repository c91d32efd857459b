import json

import pytest

from orthantwalks.errors import ParseError, UnknownFormatError
from orthantwalks.exporters import (
    export_csv,
    export_hull_obj,
    export_obj,
    export_ply,
    export_walks,
    hue_to_rgb,
    import_csv_positions,
    load_model,
    parse_model_document,
    read_walk_records,
    walk_vertex_colors,
    write_walk_records,
)
from orthantwalks.hull import convex_hull_3d
from orthantwalks.pipeline import Walk3D
from orthantwalks.stepsets import Step3


@pytest.fixture
def walks():
    return [
        Walk3D((Step3(1, 0, 0), Step3(0, 1, 0), Step3(0, 0, 1), Step3(-1, 0, 0))),
        Walk3D((Step3(0, 0, 1), Step3(0, 0, -1))),
    ]


# ------------------------------------------------------------------- models


def test_parse_model_document(flagship):
    doc = {"steps": [{"step": list(s), "weight": w} for s, w in flagship.entries]}
    ss, options = parse_model_document(doc)
    assert ss == flagship
    assert options == {}


def test_parse_model_options():
    doc = {"steps": [{"step": [1, 0, 0]}, {"step": [-1, 0, 0]}, {"step": [0, 1, 0]}, {"step": [0, -1, 0]}, {"step": [0, 0, 1]}, {"step": [0, 0, -1]}], "max_den": 5, "seed": 7}
    ss, options = parse_model_document(doc)
    assert options == {"max_den": 5, "seed": 7}
    assert all(w == 1 for _, w in ss.entries)  # weight defaults to 1


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {},
        {"steps": []},
        {"steps": [{"weight": 1}]},
        {"steps": [{"step": [1, 0]}]},
        {"steps": [{"step": [1, 0, 0], "weight": 0}]},
        {"steps": [{"step": [1, 0, 0], "weight": 1.5}]},
        {"steps": [{"step": [1, 0, 0]}], "max_den": 0},
    ],
)
def test_parse_model_rejects(doc):
    with pytest.raises(ParseError):
        parse_model_document(doc)


def test_load_model_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{nope")
    with pytest.raises(ParseError):
        load_model(str(path))


# ------------------------------------------------------------- walk records


def test_walk_records_roundtrip(tmp_path, walks):
    path = str(tmp_path / "walks.ndjson")
    write_walk_records(path, walks, "abc123", 42)
    lines = [json.loads(l) for l in open(path) if l.strip()]
    assert lines[0]["model"] == "abc123"
    assert lines[0]["seed"] == 42
    assert lines[0]["length"] == 4
    back = read_walk_records(path)
    assert [w.steps for w in back] == [w.steps for w in walks]


def test_read_walk_records_bad_line(tmp_path):
    path = tmp_path / "walks.ndjson"
    path.write_text('{"steps": "nope"}\n')
    with pytest.raises(ParseError):
        read_walk_records(str(path))


# ------------------------------------------------------------------- colors


def test_hue_reference_values():
    assert hue_to_rgb(0) == (255, 0, 0)
    assert hue_to_rgb(100) == (85, 255, 0)
    assert hue_to_rgb(200) == (0, 170, 255)
    assert hue_to_rgb(300) == (255, 0, 255)


def test_ramp_starts_red_ends_magenta():
    colors = walk_vertex_colors(11)
    assert colors[0] == (255, 0, 0)
    assert colors[-1] == (255, 0, 255)
    assert len(colors) == 11


# ------------------------------------------------------------------- export


def test_csv_roundtrip(tmp_path, walks):
    path = str(tmp_path / "walks.csv")
    export_csv(walks, path)
    positions = import_csv_positions(path)
    assert positions == [w.positions() for w in walks]


def test_ply_header_contract(tmp_path, walks):
    path = str(tmp_path / "walks.ply")
    export_ply(walks, path)
    lines = open(path).read().splitlines()
    n_vertices = sum(len(w.positions()) for w in walks)
    n_edges = sum(w.length for w in walks)
    header_end = lines.index("end_header")
    assert lines[:3] == ["ply", "format ascii 1.0", "element vertex %d" % n_vertices]
    assert "property uchar red" in lines[:header_end]
    assert "element edge %d" % n_edges in lines[:header_end]
    body = lines[header_end + 1 :]
    assert len(body) == n_vertices + n_edges
    first = body[0].split()
    assert first[:3] == ["0", "0", "0"]
    assert first[3:] == ["255", "0", "0"]  # start of walk is red


def test_obj_polylines(tmp_path, walks):
    path = str(tmp_path / "walks.obj")
    export_obj(walks, path)
    lines = open(path).read().splitlines()
    vs = [l for l in lines if l.startswith("v ")]
    ls = [l for l in lines if l.startswith("l ")]
    assert len(vs) == sum(len(w.positions()) for w in walks)
    assert len(ls) == len(walks)
    # 1-based indexing, consecutive
    assert ls[0] == "l 1 2 3 4 5"


def test_export_walks_unknown_format(tmp_path, walks):
    with pytest.raises(UnknownFormatError):
        export_walks(walks, "stl", str(tmp_path / "x.stl"))


def test_export_hull_obj(tmp_path):
    mesh = convex_hull_3d([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    path = str(tmp_path / "hull.obj")
    export_hull_obj(mesh, path)
    lines = open(path).read().splitlines()
    assert sum(l.startswith("v ") for l in lines) == 4
    assert sum(l.startswith("f ") for l in lines) == 4
