"""Readers for edge lists, GML and label files; CSV writers for results.

CSV output uses ``\\n`` line endings, minimal RFC 4180 quoting and reals with
17 significant digits. Every result file starts with a ``#`` comment row
carrying the config digest and seed.
"""
from dataclasses import dataclass, field
import csv
import io
import re

import numpy as np


class ParseError(ValueError):
    pass


@dataclass
class RawDataset:
    """Vertices and edges as read from disk, before any cleaning.

    Self-loops and repeated edges are kept; :func:`vsparse.graph.preprocess`
    removes them.
    """

    vertices: list
    edges: list
    attributes: dict = field(default_factory=dict)
    source_format: str = "edgelist"

    @property
    def n(self):
        return len(self.vertices)

    def adjacency(self):
        """Raw count matrix (row = source, column = target)."""
        pos = {v: i for i, v in enumerate(self.vertices)}
        A = np.zeros((self.n, self.n))
        for u, v in self.edges:
            A[pos[u], pos[v]] += 1
        return A

    def labels(self, key="value"):
        """Per-vertex attribute ``key`` in vertex order, or ``None`` if absent."""
        vals = self.attributes.get(key)
        if vals is None:
            return None
        return [vals[v] for v in self.vertices]


@dataclass
class LabelVector:
    """Labels mapped to ``1..K`` in order of first appearance."""

    labels: np.ndarray
    classes: list

    @property
    def K(self):
        return len(self.classes)

    def mapping(self):
        return {c: i + 1 for i, c in enumerate(self.classes)}


def encode_labels(raw):
    classes = []
    index = {}
    out = []
    for x in raw:
        if x not in index:
            index[x] = len(classes) + 1
            classes.append(x)
        out.append(index[x])
    return LabelVector(np.array(out, dtype=int), classes)


_SPLIT = re.compile(r"[,\s]+")


def read_edge_list(path, index_base=0, n=None):
    """Read ``u v`` or ``u,v`` lines; ``#`` and ``%`` start comment lines.

    Vertex ids are integers, shifted down by ``index_base``. The vertex set is
    ``0 .. max id`` (or ``0 .. n-1`` when ``n`` is given).
    """
    if index_base not in (0, 1):
        raise ValueError("index_base must be 0 or 1")
    edges = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line[0] in "#%":
                continue
            parts = [p for p in _SPLIT.split(line) if p]
            if len(parts) < 2:
                raise ParseError(f"{path}:{lineno}: expected two vertex ids, got {line!r}")
            try:
                u, v = int(parts[0]) - index_base, int(parts[1]) - index_base
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-integer vertex id in {line!r}") from None
            if u < 0 or v < 0 or (n is not None and (u >= n or v >= n)):
                raise ParseError(f"{path}:{lineno}: vertex id out of range in {line!r}")
            edges.append((u, v))
    size = n if n is not None else (max(max(e) for e in edges) + 1 if edges else 0)
    return RawDataset(list(range(size)), edges, {}, "edgelist")


def write_edge_list(path, A, header=None):
    """Write the upper-triangle edges of a symmetric adjacency matrix."""
    iu, ju = np.nonzero(np.triu(np.asarray(A), k=1))
    with open(path, "w", newline="\n") as fh:
        if header:
            fh.write(f"# {header}\n")
        fh.write(f"# n={np.asarray(A).shape[0]}\n")
        for i, j in zip(iu, ju):
            fh.write(f"{i} {j}\n")


_TOKEN = re.compile(r'\s*(?:(\[)|(\])|"((?:[^"\\]|\\.)*)"|([^\s\[\]"]+))')


def _gml_tokens(text):
    pos = 0
    text = "\n".join(line for line in text.splitlines() if not line.lstrip().startswith("#"))
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                return
            raise ParseError(f"GML: cannot tokenize near {text[pos:pos + 20]!r}")
        pos = m.end()
        if m.group(1):
            yield "["
        elif m.group(2):
            yield "]"
        elif m.group(3) is not None:
            yield ("str", m.group(3))
        elif m.group(4):
            yield ("atom", m.group(4))


def _gml_value(tok):
    kind, s = tok
    if kind == "str":
        return s
    for conv in (int, float):
        try:
            return conv(s)
        except ValueError:
            pass
    return s


def _gml_parse(tokens):
    """Nested ``[(key, value), ...]`` lists."""
    stack = [[]]
    key = None
    for tok in tokens:
        if tok == "[":
            if key is None:
                raise ParseError("GML: '[' without a key")
            new = []
            stack[-1].append((key, new))
            stack.append(new)
            key = None
        elif tok == "]":
            if key is not None or len(stack) == 1:
                raise ParseError("GML: unbalanced brackets")
            stack.pop()
        elif key is None:
            key = tok[1]
        else:
            stack[-1].append((key, _gml_value(tok)))
            key = None
    if len(stack) != 1 or key is not None:
        raise ParseError("GML: unbalanced brackets")
    return stack[0]


def read_gml(path):
    """Read the node/edge records of a GML ``graph``.

    Node attributes other than ``id`` are kept in ``attributes`` by key, so
    the class attribute of the Newman datasets is ``attributes["value"]``.
    """
    with open(path) as fh:
        tree = _gml_parse(_gml_tokens(fh.read()))
    graphs = [v for k, v in tree if k == "graph" and isinstance(v, list)]
    if not graphs:
        raise ParseError("GML: no graph record")
    vertices, edges, attributes = [], [], {}
    seen = set()
    for key, rec in graphs[0]:
        if key == "node":
            fields = dict(rec)
            if "id" not in fields:
                raise ParseError("GML: node without id")
            vid = fields["id"]
            if vid in seen:
                raise ParseError(f"GML: duplicate node id {vid}")
            seen.add(vid)
            vertices.append(vid)
            for k, v in fields.items():
                if k != "id":
                    attributes.setdefault(k, {})[vid] = v
        elif key == "edge":
            fields = dict(rec)
            if "source" not in fields or "target" not in fields:
                raise ParseError("GML: edge without source/target")
            edges.append((fields["source"], fields["target"]))
    for u, v in edges:
        if u not in seen or v not in seen:
            raise ParseError(f"GML: edge ({u}, {v}) references an unknown node")
    return RawDataset(vertices, edges, attributes, "gml")


def read_labels(path, n=None):
    """Read one label per line, or ``vertex,label`` pairs.

    With pairs, vertices are sorted by their integer id before encoding.
    """
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and line[0] not in "#%":
                rows.append(line)
    if not rows:
        raise ParseError(f"{path}: no labels")
    parsed = list(csv.reader(rows))
    if all(len(r) >= 2 for r in parsed):
        try:
            pairs = sorted((int(r[0]), r[1].strip()) for r in parsed)
        except ValueError:
            raise ParseError(f"{path}: vertex ids must be integers") from None
        raw = [lab for _, lab in pairs]
    else:
        raw = [r[0].strip() for r in parsed]
    if n is not None and len(raw) != n:
        raise ParseError(f"{path}: {len(raw)} labels for a graph with {n} vertices")
    return encode_labels(raw)


def write_labels(path, labels, classes=None):
    """Write one label per line; ``classes`` maps ``1..K`` back to names."""
    with open(path, "w", newline="\n") as fh:
        for lab in np.asarray(labels, dtype=int):
            fh.write(f"{classes[lab - 1] if classes else lab}\n")


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return "" if x is None else str(x)


def csv_text(header, rows, comment=None):
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def write_csv(path, header, rows, comment=None):
    text = csv_text(header, rows, comment)
    if path is None or path == "-":
        return text
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return text


def scree_rows(scree):
    return [(i + 1, v, int(np.sign(v)), abs(v)) for i, v in enumerate(scree.values)]


def write_scree(path, scree, comment=None):
    return write_csv(path, ["index", "eigenvalue", "sign", "magnitude"], scree_rows(scree), comment)


def curve_rows(curve):
    return [(curve.variable, g, m, s, curve.replicates, curve.chance)
            for g, m, s in zip(curve.grid, curve.mean, curve.std_error)]


def write_curve(path, curve, comment=None):
    return write_csv(path, ["variable", "value", "mean_error", "std_error", "replicates", "chance"],
                     curve_rows(curve), comment)


def write_loo(path, result, comment=None):
    rows = [(v, int(y), int(p), bool(p == y), bool(d), bool(x))
            for v, (y, p, d, x) in enumerate(zip(result.labels, result.predictions,
                                                  result.degenerate, result.excluded))]
    text = csv_text(["vertex", "label", "predicted", "correct", "degenerate", "excluded"],
                    rows, comment)
    text += csv_text(["classifier", "error", "chance", "n_evaluated"],
                     [(result.descriptor, result.error, result.chance, result.n_evaluated)])
    if path is None or path == "-":
        return text
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return text


def read_csv(path):
    """Rows of a CSV written by this module, comment lines skipped."""
    with open(path, newline="") as fh:
        return list(csv.reader(line for line in fh if not line.startswith("#")))
