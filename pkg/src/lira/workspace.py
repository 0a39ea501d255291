"""Line-oriented workspace files.

Example::

    [ring]
    vars = x, y
    laurent = x
    relation = "x^2 + y^2 - 1"

    [liealgebra]
    rank = 2
    anchor.e1 = "1", "0"
    bracket.e1.e2 = "0", "0"

    [cocycle.one]
    f.e1.e2 = "1"

    [cochain.h]
    f.e2 = "x"

    [connection.c]
    gamma.e2 = [["x"]]

    [idempotent.p]
    phi = [["1", "0"], ["0", "0"]]

Every value except names and integers is a quoted expression.  Loading is
atomic: the first problem raises with its line number and nothing is
returned.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .cochain import Cochain, Connection, is_cocycle
from .curvmod import IdempotentModule
from .errors import DomainError, LiraError, LiraSyntaxError, NotIdempotent, ValidationError
from .lierinehart import LieRinehart, lr_validate
from .ring import BaseRing, Derivation

FIXTURE_DIR = Path(__file__).parent / "fixtures"

_SECTION_RE = re.compile(r"\[\s*([A-Za-z]+)(?:\.([A-Za-z_][A-Za-z0-9_]*))?\s*\]\Z")
_KEY_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")
_INDEXED_RE = re.compile(r"e([1-9][0-9]*)\Z")
_NAMED_SECTIONS = ("cocycle", "cochain", "connection", "idempotent")


@dataclass
class Workspace:
    ring: BaseRing
    algebra: LieRinehart
    cocycles: dict = field(default_factory=dict)
    cochains: dict = field(default_factory=dict)
    connections: dict = field(default_factory=dict)
    idempotents: dict = field(default_factory=dict)
    source: str = ""

    def twist(self, name) -> Cochain:
        """A named 2-cochain; ``zero`` is always available."""
        if name in self.cocycles:
            return self.cocycles[name]
        if name in self.cochains and self.cochains[name].degree == 2:
            return self.cochains[name]
        if name == "zero":
            return Cochain.zero(self.algebra, 2)
        raise KeyError(f"no 2-cochain named {name!r} in {self.source}")

    def cochain(self, name) -> Cochain:
        if name in self.cochains:
            return self.cochains[name]
        if name in self.cocycles:
            return self.cocycles[name]
        raise KeyError(f"no cochain named {name!r} in {self.source}")

    def connection(self, name) -> Connection:
        if name not in self.connections:
            raise KeyError(f"no connection named {name!r} in {self.source}")
        return self.connections[name]


@dataclass
class _Section:
    kind: str
    name: str | None
    line: int
    entries: list = field(default_factory=list)  # (key, raw value, line, value column)


def _split(text):
    sections = []
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("["):
            m = _SECTION_RE.match(stripped)
            if not m:
                raise LiraSyntaxError(f"malformed section header {stripped!r}", line=n, col=1)
            kind, name = m.group(1), m.group(2)
            if kind in ("ring", "liealgebra"):
                if name is not None:
                    raise LiraSyntaxError(f"[{kind}] takes no name", line=n, col=1)
            elif kind in _NAMED_SECTIONS:
                if name is None:
                    raise LiraSyntaxError(f"[{kind}.NAME] needs a name", line=n, col=1)
            else:
                raise LiraSyntaxError(f"unknown section [{kind}]", line=n, col=1)
            current = _Section(kind, name, n)
            sections.append(current)
            continue
        if "=" not in line:
            raise LiraSyntaxError("expected 'key = value'", line=n, col=len(raw) - len(raw.lstrip()) + 1)
        if current is None:
            raise LiraSyntaxError("entry outside of any section", line=n, col=1)
        key, value = line.split("=", 1)
        key = key.strip()
        if not _KEY_RE.match(key):
            raise LiraSyntaxError(f"bad key {key!r}", line=n, col=1)
        col = line.index("=") + 2 + (len(value) - len(value.lstrip()))
        current.entries.append((key, value.strip(), n, col))
    return sections


def _strip_comment(raw):
    out = []
    quoted = False
    for ch in raw:
        if ch == '"':
            quoted = not quoted
        if ch == "#" and not quoted:
            break
        out.append(ch)
    return "".join(out).rstrip()


def _strings(value, line, col):
    """Parse '"a", "b"' into a list of strings."""
    if not value:
        return []
    try:
        items = json.loads("[" + value + "]")
    except json.JSONDecodeError as exc:
        raise LiraSyntaxError(f"expected quoted expressions: {exc.msg}", line=line, col=col + max(exc.colno - 2, 0)) from None
    if not all(isinstance(s, str) for s in items):
        raise LiraSyntaxError("values must be quoted expression strings", line=line, col=col)
    return items


def _matrix(value, line, col):
    try:
        rows = json.loads(value)
    except json.JSONDecodeError as exc:
        raise LiraSyntaxError(f"expected a matrix [[...], ...]: {exc.msg}", line=line, col=col + max(exc.colno - 1, 0)) from None
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise LiraSyntaxError("matrix must be a list of rows", line=line, col=col)
    if not all(isinstance(x, str) for r in rows for x in r):
        raise LiraSyntaxError("matrix entries must be quoted expressions", line=line, col=col)
    return rows


def _names(value):
    return [v.strip() for v in value.split(",") if v.strip()]


def _expr(ring, text, line, col):
    try:
        return ring.parse(text)
    except LiraSyntaxError as exc:
        raise LiraSyntaxError(exc.message, line=line, col=(col or 0) + (exc.col or 1)) from None
    except DomainError as exc:
        raise LiraSyntaxError(str(exc), line=line, col=col) from None


def _indices(parts, count, rank, line, key):
    out = []
    for p in parts:
        m = _INDEXED_RE.match(p)
        if not m:
            raise LiraSyntaxError(f"bad generator {p!r} in key {key!r}", line=line, col=1)
        k = int(m.group(1))
        if not 1 <= k <= rank:
            raise LiraSyntaxError(f"generator {p} out of range 1..{rank}", line=line, col=1)
        out.append(k - 1)
    if count is not None and len(out) != count:
        raise LiraSyntaxError(f"key {key!r} needs {count} generator indices", line=line, col=1)
    return out


def _build_ring(sec):
    vars_, laurent, relation = [], [], None
    rel_pos = None
    for key, value, line, col in sec.entries:
        if key == "vars":
            vars_ = _names(value)
        elif key == "laurent":
            laurent = _names(value)
        elif key == "relation":
            rel = _strings(value, line, col)
            if len(rel) != 1:
                raise LiraSyntaxError("relation takes one expression", line=line, col=col)
            relation, rel_pos = rel[0], (line, col)
        else:
            raise LiraSyntaxError(f"unknown key {key!r} in [ring]", line=line, col=1)
    try:
        ring = BaseRing(vars_, laurent)
    except DomainError as exc:
        raise LiraSyntaxError(str(exc), line=sec.line, col=1) from None
    if relation is not None:
        g = _expr(ring, relation, *rel_pos)
        try:
            ring = BaseRing(vars_, laurent, g)
        except DomainError as exc:
            raise ValidationError("ring", str(exc), rel_pos[0]) from None
    return ring


def _build_algebra(sec, ring):
    rank = None
    for key, value, line, col in sec.entries:
        if key == "rank":
            try:
                rank = int(value)
            except ValueError:
                raise LiraSyntaxError("rank must be an integer", line=line, col=col) from None
            if rank < 1:
                raise LiraSyntaxError("rank must be positive", line=line, col=col)
    if rank is None:
        raise LiraSyntaxError("[liealgebra] needs 'rank'", line=sec.line, col=1)
    anchor = [None] * rank
    structure = {}
    for key, value, line, col in sec.entries:
        parts = key.split(".")
        if key == "rank":
            continue
        if parts[0] == "anchor":
            (i,) = _indices(parts[1:], 1, rank, line, key)
            if anchor[i] is not None:
                raise LiraSyntaxError(f"duplicate {key}", line=line, col=1)
            coeffs = [_expr(ring, s, line, col) for s in _strings(value, line, col)]
            if len(coeffs) != ring.n:
                raise LiraSyntaxError(f"{key} needs {ring.n} coefficients", line=line, col=col)
            anchor[i] = Derivation(ring, coeffs)
        elif parts[0] == "bracket":
            i, j = _indices(parts[1:], 2, rank, line, key)
            if i == j:
                raise LiraSyntaxError("diagonal bracket is forbidden (it is zero by antisymmetry)", line=line, col=1)
            if i > j:
                raise LiraSyntaxError("brackets are given only for e_i, e_j with i < j", line=line, col=1)
            if (i, j) in structure:
                raise LiraSyntaxError(f"duplicate {key}", line=line, col=1)
            coords = [_expr(ring, s, line, col) for s in _strings(value, line, col)]
            if len(coords) != rank:
                raise LiraSyntaxError(f"{key} needs {rank} coordinates", line=line, col=col)
            structure[(i, j)] = coords
        else:
            raise LiraSyntaxError(f"unknown key {key!r} in [liealgebra]", line=line, col=1)
    anchor = [a if a is not None else Derivation.zero(ring) for a in anchor]
    return LieRinehart(ring, rank, anchor, structure)


def _build_cochain(sec, lr):
    degree = None
    values = {}
    for key, value, line, col in sec.entries:
        parts = key.split(".")
        if key == "degree":
            try:
                degree = int(value)
            except ValueError:
                raise LiraSyntaxError("degree must be an integer", line=line, col=col) from None
            continue
        if parts[0] != "f":
            raise LiraSyntaxError(f"unknown key {key!r} in [{sec.kind}.{sec.name}]", line=line, col=1)
        idx = _indices(parts[1:], None, lr.rank, line, key)
        if len(set(idx)) != len(idx):
            raise LiraSyntaxError("repeated index in an alternating cochain", line=line, col=1)
        if idx != sorted(idx):
            raise LiraSyntaxError("cochain indices must be strictly increasing", line=line, col=1)
        if degree is None:
            degree = len(idx)
        elif len(idx) != degree:
            raise LiraSyntaxError(f"key {key!r} does not match degree {degree}", line=line, col=1)
        if tuple(idx) in values:
            raise LiraSyntaxError(f"duplicate {key}", line=line, col=1)
        vals = _strings(value, line, col)
        if len(vals) != 1:
            raise LiraSyntaxError("cochain values take one expression", line=line, col=col)
        values[tuple(idx)] = _expr(lr.ring, vals[0], line, col)
    if degree is None:
        degree = 2
    if sec.kind == "cocycle" and degree != 2:
        raise ValidationError(f"cocycle.{sec.name}", "cocycles are 2-cochains", sec.line)
    return Cochain(lr, degree, values)


def _build_connection(sec, lr):
    rank = None
    gamma = [None] * lr.rank
    for key, value, line, col in sec.entries:
        parts = key.split(".")
        if key == "rank":
            try:
                rank = int(value)
            except ValueError:
                raise LiraSyntaxError("rank must be an integer", line=line, col=col) from None
        elif parts[0] == "gamma":
            (i,) = _indices(parts[1:], 1, lr.rank, line, key)
            rows = _matrix(value, line, col)
            gamma[i] = ([[_expr(lr.ring, s, line, col) for s in row] for row in rows], line)
        else:
            raise LiraSyntaxError(f"unknown key {key!r} in [connection.{sec.name}]", line=line, col=1)
    if rank is None:
        given = [g for g in gamma if g is not None]
        rank = len(given[0][0]) if given else 1
    mats = []
    for g in gamma:
        if g is None:
            mats.append([[lr.ring.zero] * rank for _ in range(rank)])
            continue
        m, line = g
        if len(m) != rank or any(len(row) != rank for row in m):
            raise ValidationError(f"connection.{sec.name}", f"Christoffel matrix must be {rank}x{rank}", line)
        mats.append(m)
    return Connection(lr, mats, rank, name=sec.name)


def _build_idempotent(sec, ring):
    phi = None
    for key, value, line, col in sec.entries:
        if key != "phi":
            raise LiraSyntaxError(f"unknown key {key!r} in [idempotent.{sec.name}]", line=line, col=1)
        rows = _matrix(value, line, col)
        phi = [[_expr(ring, s, line, col) for s in row] for row in rows]
    if phi is None:
        raise LiraSyntaxError("idempotent needs 'phi'", line=sec.line, col=1)
    try:
        return IdempotentModule(ring, phi, name=sec.name)
    except (NotIdempotent, DomainError) as exc:
        raise ValidationError(f"idempotent.{sec.name}", str(exc), sec.line) from None


def parse_workspace(text: str, source: str = "<string>") -> Workspace:
    sections = _split(text)
    ring_secs = [s for s in sections if s.kind == "ring"]
    alg_secs = [s for s in sections if s.kind == "liealgebra"]
    if len(ring_secs) != 1:
        raise LiraSyntaxError("exactly one [ring] section is required", line=ring_secs[1].line if ring_secs else 1, col=1)
    if len(alg_secs) != 1:
        raise LiraSyntaxError("exactly one [liealgebra] section is required", line=alg_secs[1].line if alg_secs else 1, col=1)
    names = {}
    for s in sections:
        if s.name is not None:
            if s.name in names:
                raise ValidationError(f"{s.kind}.{s.name}", f"name already used on line {names[s.name]}", s.line)
            names[s.name] = s.line
    ring = _build_ring(ring_secs[0])
    lr = _build_algebra(alg_secs[0], ring)
    report = lr_validate(lr)
    if not report.passed:
        bad = [c for c in report.checks if not c.passed]
        reason = "; ".join(f"{c.name}: {c.detail}" for c in bad)
        raise ValidationError("liealgebra", reason, alg_secs[0].line)
    ws = Workspace(ring, lr, source=source)
    for s in sections:
        if s.kind == "cocycle":
            f = _build_cochain(s, lr)
            chk = is_cocycle(lr, f)
            if not chk:
                raise ValidationError(f"cocycle.{s.name}", f"not a cocycle: d2 f on triple {chk.triple} = {chk.value}", s.line)
            ws.cocycles[s.name] = f
        elif s.kind == "cochain":
            ws.cochains[s.name] = _build_cochain(s, lr)
        elif s.kind == "connection":
            ws.connections[s.name] = _build_connection(s, lr)
        elif s.kind == "idempotent":
            ws.idempotents[s.name] = _build_idempotent(s, ring)
    return ws


def resolve_path(name) -> Path:
    """A path on disk, or the name of a shipped fixture (with or without .lira)."""
    p = Path(name)
    if p.exists():
        return p
    stem = p.name[:-5] if p.name.endswith(".lira") else p.name
    q = FIXTURE_DIR / f"{stem}.lira"
    if q.exists():
        return q
    raise FileNotFoundError(f"no such workspace file or fixture: {name}")


def load_workspace(path) -> Workspace:
    p = resolve_path(path)
    text = p.read_text(encoding="utf-8")
    try:
        return parse_workspace(text, source=str(p))
    except LiraError as exc:
        exc.source = str(p)
        raise


def load_fixture(name) -> Workspace:
    return load_workspace(FIXTURE_DIR / f"{name}.lira")


def fixture_names():
    return sorted(p.stem for p in FIXTURE_DIR.glob("*.lira"))
