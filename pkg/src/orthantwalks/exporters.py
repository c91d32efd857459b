"""File formats: model files, walk records, CSV/PLY/OBJ exports, hulls.

Walk records are newline-delimited JSON, one walk per line, carrying the
model digest and seed so downstream tooling can trace provenance.  The
PLY export colors vertices along a hue ramp from red (start) to magenta
(end); the ramp stops at 300 degrees to avoid wrapping back to red.
"""
from __future__ import annotations

import csv
import json
from typing import Iterable, Optional

from .errors import ParseError, UnknownFormatError
from .hull import HullMesh
from .pipeline import Walk3D
from .stepsets import Step3, WeightedStepSet3, validate_stepset

HUE_END_DEGREES = 300.0


# ---------------------------------------------------------------- model files


def parse_model_document(doc: dict):
    """Parse a model document: {"steps": [{"step": [i,j,k], "weight": w}]}.

    Weights default to 1.  Returns (stepset, options) where options holds
    the optional max_den / seed fields.
    """
    if not isinstance(doc, dict) or "steps" not in doc:
        raise ParseError('model file must be an object with a "steps" list')
    raw = []
    steps = doc["steps"]
    if not isinstance(steps, list) or not steps:
        raise ParseError('"steps" must be a nonempty list')
    for i, entry in enumerate(steps):
        if not isinstance(entry, dict) or "step" not in entry:
            raise ParseError('steps[%d] must be an object with a "step" field' % i)
        step = entry["step"]
        if not (isinstance(step, list) and len(step) == 3 and all(isinstance(c, int) for c in step)):
            raise ParseError("steps[%d].step must be three integers" % i)
        weight = entry.get("weight", 1)
        if not isinstance(weight, int) or weight < 1:
            raise ParseError("steps[%d].weight must be a positive integer" % i)
        raw.append((step, weight))
    options = {}
    if "max_den" in doc:
        if not isinstance(doc["max_den"], int) or doc["max_den"] < 1:
            raise ParseError('"max_den" must be a positive integer')
        options["max_den"] = doc["max_den"]
    if "seed" in doc:
        if not isinstance(doc["seed"], int):
            raise ParseError('"seed" must be an integer')
        options["seed"] = doc["seed"]
    return validate_stepset(raw), options


def load_model(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError("model file is not valid JSON: %s" % exc) from None
    return parse_model_document(doc)


# --------------------------------------------------------------- walk records


def walk_record(walk: Walk3D, digest: str, seed: Optional[int]) -> dict:
    return {
        "model": digest,
        "seed": seed,
        "length": walk.length,
        "steps": [list(s) for s in walk.steps],
    }


def write_walk_records(path: str, walks: Iterable[Walk3D], digest: str, seed) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for w in walks:
            fh.write(json.dumps(walk_record(w, digest, seed), separators=(",", ":")))
            fh.write("\n")


def read_walk_records(path: str):
    walks = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
                steps = tuple(Step3(*s) for s in doc["steps"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ParseError("bad walk record on line %d: %s" % (lineno, exc)) from None
            walks.append(Walk3D(steps))
    return walks


# -------------------------------------------------------------------- colors


def hue_to_rgb(hue_degrees: float):
    """Hue (degrees) at full saturation and value -> 8-bit RGB."""
    h = (hue_degrees % 360.0) / 60.0
    x = 1.0 - abs(h % 2.0 - 1.0)
    sector = int(h) % 6
    r, g, b = [
        (1.0, x, 0.0),
        (x, 1.0, 0.0),
        (0.0, 1.0, x),
        (0.0, x, 1.0),
        (x, 0.0, 1.0),
        (1.0, 0.0, x),
    ][sector]
    return (round(255 * r), round(255 * g), round(255 * b))


def walk_vertex_colors(n_positions: int):
    """Hue ramp over a walk's positions: 0 (red) to 300 (magenta)."""
    if n_positions <= 1:
        return [hue_to_rgb(0.0)] * max(n_positions, 0)
    return [
        hue_to_rgb(HUE_END_DEGREES * i / (n_positions - 1)) for i in range(n_positions)
    ]


# -------------------------------------------------------------------- export


def export_csv(walks, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["walk_id", "step_index", "x", "y", "z"])
        for wid, walk in enumerate(walks):
            for i, (x, y, z) in enumerate(walk.positions()):
                writer.writerow([wid, i, x, y, z])


def import_csv_positions(path: str):
    """Inverse of export_csv: position sequences keyed by walk id."""
    walks: dict = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            wid = int(row["walk_id"])
            walks.setdefault(wid, []).append(
                (int(row["step_index"]), int(row["x"]), int(row["y"]), int(row["z"]))
            )
    out = []
    for wid in sorted(walks):
        rows = sorted(walks[wid])
        out.append([(x, y, z) for _, x, y, z in rows])
    return out


def export_ply(walks, path: str) -> None:
    """ASCII PLY: colored vertices plus edges along each walk."""
    vertices = []
    edges = []
    for walk in walks:
        pts = walk.positions()
        colors = walk_vertex_colors(len(pts))
        base = len(vertices)
        for p, c in zip(pts, colors):
            vertices.append((p, c))
        for i in range(len(pts) - 1):
            edges.append((base + i, base + i + 1))
    lines = [
        "ply",
        "format ascii 1.0",
        "element vertex %d" % len(vertices),
        "property float x",
        "property float y",
        "property float z",
        "property uchar red",
        "property uchar green",
        "property uchar blue",
        "element edge %d" % len(edges),
        "property int vertex1",
        "property int vertex2",
        "end_header",
    ]
    for (x, y, z), (r, g, b) in vertices:
        lines.append("%g %g %g %d %d %d" % (x, y, z, r, g, b))
    for a, b in edges:
        lines.append("%d %d" % (a, b))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def export_obj(walks, path: str) -> None:
    """OBJ with one polyline per walk (no color)."""
    lines = []
    bases = []
    count = 0
    for walk in walks:
        pts = walk.positions()
        bases.append((count, len(pts)))
        for x, y, z in pts:
            lines.append("v %g %g %g" % (x, y, z))
        count += len(pts)
    for base, n in bases:
        lines.append("l " + " ".join(str(base + i + 1) for i in range(n)))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def export_walks(walks, fmt: str, path: str) -> None:
    if fmt == "csv":
        export_csv(walks, path)
    elif fmt == "ply":
        export_ply(walks, path)
    elif fmt == "obj":
        export_obj(walks, path)
    else:
        raise UnknownFormatError("unknown export format %r" % fmt)


def export_hull_obj(mesh: HullMesh, path: str) -> None:
    lines = ["v %g %g %g" % tuple(v) for v in mesh.vertices]
    lines += ["f %d %d %d" % (i + 1, j + 1, k + 1) for i, j, k in mesh.faces]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
