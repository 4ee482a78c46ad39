"""File formats: skeleton documents, OFF import, flexes, colorings, canonical JSON."""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import FormatError
from .flex import SampledFlex
from .geometry import Realization
from .projective import ProjectivePoint
from .skeleton import Polyhedron2Skeleton, TriangularSkeleton, edge, sorted_vertices


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x}")
    s = format(x, ".17g")
    if all(c not in s for c in ".e"):
        s += ".0"
    return s


def dumps_canonical(obj, indent: int = 2) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, bool) or o is None:
            return json.dumps(o)
        if isinstance(o, int):
            return str(int(o))
        if isinstance(o, float):
            return _fmt_float(o)
        if hasattr(o, "dtype") and hasattr(o, "item"):
            return enc(o.item(), level)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = sorted((str(k), v) for k, v in o.items())
            body = (",\n").join(f"{pad}{json.dumps(k)}: {enc(v, level + 1)}" for k, v in items)
            return "{\n" + body + "\n" + end + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(isinstance(v, (int, float, str)) or hasattr(v, "item") for v in o):
                return "[" + ", ".join(enc(v, level + 1) for v in o) + "]"
            body = (",\n").join(pad + enc(v, level + 1) for v in o)
            return "[\n" + body + "\n" + end + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(obj, 0)


def load_json(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _vertex_lookup(vertices) -> dict:
    lookup = {}
    for v in vertices:
        key = str(v)
        if key in lookup and lookup[key] != v:
            raise FormatError(f"vertex identifiers {lookup[key]!r} and {v!r} collide as JSON keys")
        lookup[key] = v
    return lookup


def _point(value, where):
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise FormatError(f"{where}: expected [x, y, z]")
    try:
        return [float(c) for c in value]
    except (TypeError, ValueError):
        raise FormatError(f"{where}: coordinates must be numbers") from None


def parse_skeleton_document(doc: dict, source="document"):
    """Return ``(skeleton, realization or None)`` from ``{"vertices", "faces", "coordinates"}``."""
    if not isinstance(doc, dict):
        raise FormatError(f"{source}: top level must be an object")
    if "faces" not in doc:
        raise FormatError(f"{source}: missing field 'faces'")
    faces = doc["faces"]
    if not isinstance(faces, list) or not all(isinstance(f, list) for f in faces):
        raise FormatError(f"{source}: field 'faces' must be a list of vertex lists")
    vertices = doc.get("vertices")
    if vertices is None:
        vertices = sorted_vertices({v for f in faces for v in f})
    for v in vertices:
        if not isinstance(v, (int, str)) or isinstance(v, bool):
            raise FormatError(f"{source}: field 'vertices': invalid identifier {v!r}")
    faces = [tuple(f) for f in faces]
    cls = TriangularSkeleton if faces and all(len(f) == 3 for f in faces) else Polyhedron2Skeleton
    H = cls.from_faces(faces, vertices)
    rho = None
    if "coordinates" in doc:
        coords = doc["coordinates"]
        if not isinstance(coords, dict):
            raise FormatError(f"{source}: field 'coordinates' must map vertex -> [x, y, z]")
        lookup = _vertex_lookup(H.vertices)
        data = {}
        for k, p in coords.items():
            if k not in lookup:
                raise FormatError(f"{source}: field 'coordinates': unknown vertex {k!r}")
            data[lookup[k]] = _point(p, f"{source}: field 'coordinates.{k}'")
        missing = [v for v in H.vertices if v not in data]
        if missing:
            raise FormatError(f"{source}: field 'coordinates' lacks vertices {missing}")
        rho = Realization(data)
    return H, rho


def skeleton_document(H, rho: Realization | None = None) -> dict:
    doc = H.to_dict()
    if rho is not None:
        doc["coordinates"] = {str(v): [float(c) for c in rho[v]] for v in H.vertices}
    return doc


def read_off(text: str):
    """Parse OFF text (header, counts, coordinate lines, face lines) into a skeleton document."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append((lineno, line.split()))
    if not rows:
        raise FormatError("OFF: empty input")
    if rows[0][1][0].upper() == "OFF":
        rows[0] = (rows[0][0], rows[0][1][1:])
        if not rows[0][1]:
            rows.pop(0)
    try:
        lineno, counts = rows[0]
        nv, nf = int(counts[0]), int(counts[1])
    except (IndexError, ValueError):
        raise FormatError(f"OFF line {rows[0][0]}: expected vertex and face counts") from None
    if len(rows) < 1 + nv + nf:
        raise FormatError(f"OFF: expected {nv} vertex lines and {nf} face lines")
    coords = {}
    for i in range(nv):
        lineno, toks = rows[1 + i]
        try:
            coords[str(i)] = [float(t) for t in toks[:3]]
        except ValueError:
            raise FormatError(f"OFF line {lineno}: bad coordinates") from None
        if len(coords[str(i)]) != 3:
            raise FormatError(f"OFF line {lineno}: expected 3 coordinates")
    faces = []
    for j in range(nf):
        lineno, toks = rows[1 + nv + j]
        try:
            k = int(toks[0])
            face = [int(t) for t in toks[1:1 + k]]
        except (IndexError, ValueError):
            raise FormatError(f"OFF line {lineno}: bad face") from None
        if len(face) != k or any(not 0 <= v < nv for v in face):
            raise FormatError(f"OFF line {lineno}: face indices out of range or truncated")
        faces.append(face)
    return {"vertices": list(range(nv)), "faces": faces, "coordinates": coords}


def load_skeleton(path):
    path = Path(path)
    if path.suffix.lower() == ".off":
        return parse_skeleton_document(read_off(path.read_text()), str(path))
    return parse_skeleton_document(load_json(path), str(path))


def flex_document(flex: SampledFlex) -> dict:
    return {
        "t": list(flex.parameters),
        "samples": [{str(v): [float(c) for c in s[v]] for v in s} for s in flex.samples],
    }


def parse_flex_document(doc: dict, vertices, source="flex") -> SampledFlex:
    if not isinstance(doc, dict) or "t" not in doc or "samples" not in doc:
        raise FormatError(f"{source}: expected fields 't' and 'samples'")
    lookup = _vertex_lookup(vertices)
    samples = []
    for k, s in enumerate(doc["samples"]):
        data = {}
        for key, p in s.items():
            if key not in lookup:
                raise FormatError(f"{source}: samples[{k}]: unknown vertex {key!r}")
            data[lookup[key]] = _point(p, f"{source}: samples[{k}].{key}")
        samples.append(Realization(data))
    try:
        t = [float(x) for x in doc["t"]]
    except (TypeError, ValueError):
        raise FormatError(f"{source}: field 't' must be numbers") from None
    if len(t) != len(samples):
        raise FormatError(f"{source}: 't' and 'samples' differ in length")
    return SampledFlex(t, samples)


def parse_coloring_document(doc: dict, vertices, source="coloring"):
    """Return ``(colors or None, rho_infinity or None, s)``."""
    lookup = _vertex_lookup(vertices)

    def vtx(key, where):
        if str(key) not in lookup:
            raise FormatError(f"{source}: {where}: unknown vertex {key!r}")
        return lookup[str(key)]

    s = vtx(doc["s"], "field 's'") if "s" in doc else None
    if "rho_infinity" in doc:
        rho_inf = {}
        for key, pt in doc["rho_infinity"].items():
            try:
                rho_inf[vtx(key, "field 'rho_infinity'")] = ProjectivePoint.from_json(pt)
            except (TypeError, ValueError) as exc:
                raise FormatError(f"{source}: field 'rho_infinity.{key}': {exc}") from None
        if s is None:
            raise FormatError(f"{source}: field 's' is required with 'rho_infinity'")
        return None, rho_inf, s
    if "colors" in doc:
        colors = {vtx(k, "field 'colors'"): c for k, c in doc["colors"].items()}
        return colors, None, s
    raise FormatError(f"{source}: expected 'colors' or 'rho_infinity'")


def parse_edge_list(doc, vertices, source="edges") -> frozenset:
    if isinstance(doc, dict):
        doc = doc.get("e_const", doc.get("edges"))
    if not isinstance(doc, list):
        raise FormatError(f"{source}: expected a list of [u, v] pairs")
    lookup = _vertex_lookup(vertices)
    out = set()
    for k, pair in enumerate(doc):
        if not isinstance(pair, list) or len(pair) != 2 or any(str(v) not in lookup for v in pair):
            raise FormatError(f"{source}: entry {k} is not a pair of known vertices")
        out.add(edge(lookup[str(pair[0])], lookup[str(pair[1])]))
    return frozenset(out)
