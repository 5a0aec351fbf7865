"""
Line-oriented model and kernel files.

A model file has three sections::

    ; comments start with a semicolon
    #theta
    <label> <prior weight>      one line per parameter point
    #x
    <label>                     one line per sample point
    #P
    <p_1> <p_2> ... <p_m>       one row per parameter point, x order

A kernel file uses ``#theta`` (or ``#states``) for labels and reference
weights and ``#R`` for the row-stochastic matrix.  Any other ``#name``
section is preserved by :func:`parse_sections` and ignored by the loaders,
so a full report can be re-read as a kernel.  Floats are written with
``repr`` and round-trip exactly.
"""
from __future__ import annotations

import io as _io
from pathlib import Path

import numpy as np

from .finite_model import FiniteModel, ModelError, WeightedMeasure
from .kernel import TransitionKernel


class ParseError(ModelError):
    def __init__(self, message, line=None, source="<input>"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + message)


def parse_sections(text: str, source: str = "<input>") -> dict:
    """Map section name to a list of ``(line_number, tokens)`` entries."""
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            name = line[1:].strip()
            if not name or len(name.split()) != 1:
                raise ParseError(f"malformed section header {raw.strip()!r}",
                                 lineno, source)
            if name in sections:
                raise ParseError(f"duplicate section #{name}", lineno, source)
            current = sections.setdefault(name, [])
            continue
        if current is None:
            raise ParseError("data before the first section header",
                             lineno, source)
        current.append((lineno, line.split()))
    return sections


def _require(sections, name, source):
    if name not in sections:
        raise ParseError(f"missing section #{name}", None, source)
    return sections[name]


def _labels_weights(entries, source, weights_required=True):
    labels, weights = [], []
    for lineno, tokens in entries:
        if len(tokens) == 2:
            labels.append(tokens[0])
            weights.append(_float(tokens[1], lineno, source))
        elif len(tokens) == 1 and not weights_required:
            labels.append(tokens[0])
            weights.append(1.0)
        else:
            raise ParseError("expected 'label weight'", lineno, source)
    return labels, weights


def _float(token, lineno, source):
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", lineno, source) from None


def _matrix(entries, n_rows, n_cols, name, source):
    if len(entries) != n_rows:
        line = entries[-1][0] if entries else None
        raise ParseError(f"#{name} has {len(entries)} rows, expected {n_rows}",
                         line, source)
    rows = []
    for lineno, tokens in entries:
        if len(tokens) != n_cols:
            raise ParseError(
                f"row has {len(tokens)} entries, expected {n_cols}",
                lineno, source)
        rows.append([_float(t, lineno, source) for t in tokens])
    return np.array(rows, dtype=float).reshape(n_rows, n_cols)


def _wrap(exc, entries, source):
    """Attach the offending line number to a structural ModelError."""
    msg = str(exc)
    if msg.startswith("row ") and entries:
        try:
            i = int(msg.split()[1])
            return ParseError(msg, entries[i][0], source)
        except (ValueError, IndexError):
            pass
    return ParseError(msg, None, source)


def loads_model(text: str, source: str = "<input>") -> FiniteModel:
    sections = parse_sections(text, source)
    theta_entries = _require(sections, "theta", source)
    labels, weights = _labels_weights(theta_entries, source)
    x_entries = _require(sections, "x", source)
    x_labels = []
    for lineno, tokens in x_entries:
        if len(tokens) != 1:
            raise ParseError("expected one label per line", lineno, source)
        x_labels.append(tokens[0])
    p_entries = _require(sections, "P", source)
    P = _matrix(p_entries, len(labels), len(x_labels), "P", source)
    try:
        return FiniteModel(WeightedMeasure(labels, weights), x_labels, P)
    except ModelError as exc:
        raise _wrap(exc, p_entries, source) from exc


def load_model(path) -> FiniteModel:
    path = Path(path)
    return loads_model(path.read_text(encoding="utf-8"), str(path))


def loads_kernel(text: str, source: str = "<input>"):
    """Parse a kernel file into ``(TransitionKernel, weights)``.

    Weights default to 1 for every state when the label section omits them.
    """
    sections = parse_sections(text, source)
    name = "theta" if "theta" in sections else "states"
    labels, weights = _labels_weights(_require(sections, name, source), source,
                                      weights_required=False)
    r_entries = _require(sections, "R", source)
    R = _matrix(r_entries, len(labels), len(labels), "R", source)
    try:
        return TransitionKernel(labels, R), WeightedMeasure(labels, weights)
    except ModelError as exc:
        raise _wrap(exc, r_entries, source) from exc


def load_kernel(path):
    path = Path(path)
    return loads_kernel(path.read_text(encoding="utf-8"), str(path))


def _write_matrix(out, M):
    for row in np.asarray(M):
        out.write(" ".join(repr(float(v)) for v in row) + "\n")


def _write_measure(out, name, measure: WeightedMeasure):
    out.write(f"#{name}\n")
    for lab, w in zip(measure.labels, measure.weights):
        out.write(f"{lab} {float(w)!r}\n")


def dumps_model(model: FiniteModel, comment: str = None) -> str:
    out = _io.StringIO()
    if comment:
        for line in comment.splitlines():
            out.write(f"; {line}\n")
    _write_measure(out, "theta", model.theta_space)
    out.write("#x\n")
    for lab in model.x_labels:
        out.write(f"{lab}\n")
    out.write("#P\n")
    _write_matrix(out, model.P)
    return out.getvalue()


def dumps_kernel(kernel: TransitionKernel, weights: WeightedMeasure,
                 comment: str = None) -> str:
    out = _io.StringIO()
    if comment:
        for line in comment.splitlines():
            out.write(f"; {line}\n")
    _write_measure(out, "theta", weights)
    out.write("#R\n")
    _write_matrix(out, kernel.S)
    return out.getvalue()


def dumps_matrix_section(name: str, M) -> str:
    out = _io.StringIO()
    out.write(f"#{name}\n")
    _write_matrix(out, M)
    return out.getvalue()


def dumps_measure_section(name: str, measure: WeightedMeasure) -> str:
    out = _io.StringIO()
    _write_measure(out, name, measure)
    return out.getvalue()


def load_distribution(path, labels) -> np.ndarray:
    """Read ``label probability`` lines into a vector ordered by ``labels``."""
    path = Path(path)
    index = {lab: i for i, lab in enumerate(labels)}
    p = np.zeros(len(labels))
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError("expected 'label probability'", lineno, str(path))
        if tokens[0] not in index:
            raise ParseError(f"unknown label {tokens[0]!r}", lineno, str(path))
        p[index[tokens[0]]] = _float(tokens[1], lineno, str(path))
    return p
