"""JSON instance documents and CSV reports.

An instance document is a JSON object::

    {
      "simplices": [{"vertices": ["a", "b"], "weight": 1.0, "birth": 0.0}, ...],
      "gram": {"1": [[...], ...]},                       # optional, per degree
      "cosheaf": {"stalks": [{"simplex": [...], "dim": 2, "gram": [[...]]}],
                  "maps": [{"face": [...], "coface": [...], "matrix": [[...]]}]},
      "pair": {"s": 0.0, "t": 1.0} | {"subcomplexes": [[simplex, ...], [...]]},
      "triple": {"thresholds": [a, b, c]} | {"subcomplexes": [[...], [...], [...]]},
      "chains": [{"dims": [..], "boundaries": {"1": [[...]]}, "grams": {"0": [[...]]}}, ...]
    }

Every section is optional except that something must describe a complex:
``simplices`` or ``chains``.  ``chains`` are abstract complexes nested by
prefix inclusions (the smaller space spans the first coordinates).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .complexes import (ChainComplexRep, Filtration, WeightedComplex, assemble,
                        closure, inclusion, make_simplex, prefix_inclusion)
from .cosheaf import Cosheaf, cosheaf_assemble
from .errors import InputError, InvariantError, NumericalError, PersLapError
from .laplacians import PersistentPair
from .linalg import InnerProduct


def _matrix(value, shape, where: str) -> np.ndarray:
    try:
        m = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: not a numeric matrix") from exc
    if m.size == 0:
        return np.zeros(shape)
    if m.ndim != 2 or m.shape != tuple(shape):
        raise InputError(f"{where}: expected shape {tuple(shape)}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{where}: non-finite entry")
    return m


def _simplex(value, where: str):
    if not isinstance(value, list) or not value:
        raise InputError(f"{where}: a simplex is a nonempty list of vertices")
    for v in value:
        if not isinstance(v, (int, str)) or isinstance(v, bool):
            raise InputError(f"{where}: vertices must be integers or strings")
    try:
        s = make_simplex(value)
    except (InputError, TypeError) as exc:
        raise InputError(f"{where}: {exc}") from exc
    return s


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{where}: expected a number")
    x = float(value)
    if not math.isfinite(x):
        raise InputError(f"{where}: expected a finite number")
    return x


@dataclass
class InputDocument:
    complex: WeightedComplex | None = None
    birth: dict | None = None
    cosheaf_stalks: dict | None = None
    cosheaf_maps: dict | None = None
    cosheaf_grams: dict = field(default_factory=dict)
    pair: dict | None = None
    triple: dict | None = None
    chains: list[ChainComplexRep] | None = None

    # -- derived objects --------------------------------------------------------

    def filtration(self) -> Filtration:
        if self.complex is None:
            raise InputError("document has no simplices")
        return Filtration(self.complex, self.birth)

    def cosheaf(self, sub: WeightedComplex | None = None) -> Cosheaf | None:
        if self.cosheaf_stalks is None:
            return None
        f = Cosheaf(self.complex, dict(self.cosheaf_stalks), dict(self.cosheaf_maps),
                    dict(self.cosheaf_grams))
        return f if sub is None else f.restrict(sub)

    def _chain(self, sub: WeightedComplex) -> ChainComplexRep:
        if self.cosheaf_stalks is not None:
            return cosheaf_assemble(self.cosheaf(sub))
        return assemble(sub)

    def stage(self, t: float) -> ChainComplexRep:
        return self._chain(self.filtration().at(t))

    def _explicit(self, lists) -> list[ChainComplexRep]:
        out = []
        for i, sims in enumerate(lists):
            keep = closure(sims)
            missing = [s for s in keep if s not in self.complex]
            if missing:
                raise InputError(f"subcomplexes[{i}]: {missing[0]} is not in the complex")
            out.append(self._chain(self.complex.subcomplex(keep)))
        return out

    def persistent_pair(self, s: float | None = None, t: float | None = None) -> PersistentPair:
        """Pair from the document's ``pair`` section, else thresholds ``s <= t``."""
        if self.chains is not None and self.pair is None:
            if len(self.chains) < 2:
                return PersistentPair.trivial(self.chains[0])
            a, b = self.chains[0], self.chains[1]
            return PersistentPair(a, b, prefix_inclusion(a, b))
        if self.pair is not None and "subcomplexes" in self.pair:
            a, b = self._explicit(self.pair["subcomplexes"])
            return PersistentPair(a, b, inclusion(a, b))
        if self.pair is not None:
            s = self.pair["s"] if s is None else s
            t = self.pair["t"] if t is None else t
        f = self.filtration()
        top = float(f.critical_values()[-1]) if len(f.birth) else 0.0
        t = top if t is None else t
        s = t if s is None else s
        if s > t:
            raise InputError(f"need s <= t, got s={s}, t={t}")
        a, b = self.stage(s), self.stage(t)
        return PersistentPair(a, b, inclusion(a, b))

    def filtration_triple(self, thresholds=None):
        from .analysis import FiltrationTriple

        if thresholds is None and self.chains is not None and len(self.chains) == 3:
            c = self.chains
            return FiltrationTriple(c[0], c[1], c[2], prefix_inclusion(c[0], c[1]),
                                    prefix_inclusion(c[1], c[2]))
        if thresholds is None and self.triple is not None and "subcomplexes" in self.triple:
            c = self._explicit(self.triple["subcomplexes"])
        else:
            if thresholds is None:
                if self.triple is None:
                    raise InputError("document has no triple section")
                thresholds = self.triple["thresholds"]
            t1, t2, t3 = thresholds
            if not t1 <= t2 <= t3:
                raise InputError("triple thresholds must be nondecreasing")
            c = [self.stage(t) for t in (t1, t2, t3)]
        return FiltrationTriple(c[0], c[1], c[2], inclusion(c[0], c[1]), inclusion(c[1], c[2]))


# -- parsing ----------------------------------------------------------------------


def _parse_chain(obj, where: str) -> ChainComplexRep:
    if not isinstance(obj, dict) or "dims" not in obj:
        raise InputError(f"{where}: needs 'dims'")
    dims = obj["dims"]
    if not isinstance(dims, list) or not all(isinstance(n, int) and n >= 0 for n in dims):
        raise InputError(f"{where}.dims: expected a list of nonnegative integers")
    bds = {}
    for key, m in (obj.get("boundaries") or {}).items():
        k = _degree(key, f"{where}.boundaries")
        if not 1 <= k < len(dims):
            raise InputError(f"{where}.boundaries.{key}: degree out of range")
        bds[k] = _matrix(m, (dims[k - 1], dims[k]), f"{where}.boundaries.{key}")
    inners = [InnerProduct.identity(n) for n in dims]
    for key, g in (obj.get("grams") or {}).items():
        k = _degree(key, f"{where}.grams")
        if not 0 <= k < len(dims):
            raise InputError(f"{where}.grams.{key}: degree out of range")
        inners[k] = InnerProduct(_matrix(g, (dims[k], dims[k]), f"{where}.grams.{key}"))
    return ChainComplexRep(dims, bds, inners)


def _degree(key, where: str) -> int:
    try:
        return int(key)
    except ValueError as exc:
        raise InputError(f"{where}: degree keys must be integers, got {key!r}") from exc


def parse_document(text: str) -> InputDocument:
    """Parse and validate an instance document; every failure is an ``InputError``."""
    try:
        return _parse_document(text)
    except (NumericalError, InvariantError) as exc:
        raise InputError(f"invalid document: {exc}") from exc


def _parse_document(text: str) -> InputDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise InputError("top level must be a JSON object")
    known = {"simplices", "gram", "cosheaf", "pair", "triple", "chains"}
    extra = set(raw) - known
    if extra:
        raise InputError(f"unknown top-level field(s): {sorted(extra)}")
    doc = InputDocument()
    if "simplices" in raw:
        sims, weights, birth = [], {}, {}
        for i, entry in enumerate(raw["simplices"]):
            where = f"simplices[{i}]"
            if not isinstance(entry, dict) or "vertices" not in entry:
                raise InputError(f"{where}: needs 'vertices'")
            s = _simplex(entry["vertices"], f"{where}.vertices")
            if s in weights:
                raise InputError(f"{where}: duplicate simplex {s}")
            w = _number(entry.get("weight", 1.0), f"{where}.weight")
            if w <= 0:
                raise InputError(f"{where}.weight: must be positive")
            sims.append(s)
            weights[s] = w
            birth[s] = _number(entry.get("birth", 0.0), f"{where}.birth")
        grams = {}
        dims = {}
        for s in sims:
            dims[len(s) - 1] = dims.get(len(s) - 1, 0) + 1
        for key, g in (raw.get("gram") or {}).items():
            k = _degree(key, "gram")
            grams[k] = _matrix(g, (dims.get(k, 0),) * 2, f"gram.{key}")
        try:
            doc.complex = WeightedComplex.from_simplices(sims, weights, grams or None)
        except InputError as exc:
            raise InputError(f"simplices: {exc}") from exc
        doc.birth = birth
        doc.filtration()  # validates monotone births
    elif "gram" in raw or "cosheaf" in raw:
        raise InputError("'gram' and 'cosheaf' need a 'simplices' section")
    if "cosheaf" in raw:
        _parse_cosheaf(doc, raw["cosheaf"])
    if "chains" in raw:
        chains = raw["chains"]
        if not isinstance(chains, list) or not 1 <= len(chains) <= 3:
            raise InputError("chains: expected a list of one to three chain complexes")
        doc.chains = [_parse_chain(c, f"chains[{i}]") for i, c in enumerate(chains)]
        for i in range(len(doc.chains) - 1):
            prefix_inclusion(doc.chains[i], doc.chains[i + 1])
    if doc.complex is None and doc.chains is None:
        raise InputError("document needs 'simplices' or 'chains'")
    if "pair" in raw:
        doc.pair = _parse_stages(raw["pair"], "pair", 2, "s", doc)
    if "triple" in raw:
        doc.triple = _parse_stages(raw["triple"], "triple", 3, None, doc)
    return doc


def _parse_stages(obj, name: str, n: int, scalar, doc: InputDocument) -> dict:
    if not isinstance(obj, dict):
        raise InputError(f"{name}: expected an object")
    if doc.complex is None:
        raise InputError(f"{name}: needs a 'simplices' section")
    if "subcomplexes" in obj:
        subs = obj["subcomplexes"]
        if not isinstance(subs, list) or len(subs) != n:
            raise InputError(f"{name}.subcomplexes: expected {n} lists")
        return {"subcomplexes": [[_simplex(s, f"{name}.subcomplexes[{i}][{j}]") for j, s in enumerate(sub)]
                                 for i, sub in enumerate(subs)]}
    if scalar:
        if "s" not in obj or "t" not in obj:
            raise InputError(f"{name}: needs 's' and 't' or 'subcomplexes'")
        s, t = _number(obj["s"], f"{name}.s"), _number(obj["t"], f"{name}.t")
        if s > t:
            raise InputError(f"{name}: s must not exceed t")
        return {"s": s, "t": t}
    th = obj.get("thresholds")
    if not isinstance(th, list) or len(th) != n:
        raise InputError(f"{name}.thresholds: expected {n} numbers")
    th = [_number(x, f"{name}.thresholds[{i}]") for i, x in enumerate(th)]
    if not th[0] <= th[1] <= th[2]:
        raise InputError(f"{name}.thresholds: must be nondecreasing")
    return {"thresholds": th}


def _parse_cosheaf(doc: InputDocument, obj):
    if not isinstance(obj, dict):
        raise InputError("cosheaf: expected an object")
    stalks, grams = {}, {}
    for i, st in enumerate(obj.get("stalks", [])):
        where = f"cosheaf.stalks[{i}]"
        s = _simplex(st.get("simplex"), f"{where}.simplex")
        if s not in doc.complex:
            raise InputError(f"{where}: {s} is not in the complex")
        n = st.get("dim")
        if not isinstance(n, int) or n < 0:
            raise InputError(f"{where}.dim: expected a nonnegative integer")
        stalks[s] = n
        if "gram" in st:
            grams[s] = _matrix(st["gram"], (n, n), f"{where}.gram")
    for s in doc.complex.all_simplices():
        stalks.setdefault(s, 1)
    maps = {}
    for i, m in enumerate(obj.get("maps", [])):
        where = f"cosheaf.maps[{i}]"
        tau = _simplex(m.get("face"), f"{where}.face")
        sigma = _simplex(m.get("coface"), f"{where}.coface")
        if tau not in stalks or sigma not in stalks:
            raise InputError(f"{where}: incidence {tau} ⊂ {sigma} is not in the complex")
        maps[(tau, sigma)] = _matrix(m.get("matrix"), (stalks[tau], stalks[sigma]), f"{where}.matrix")
    doc.cosheaf_stalks, doc.cosheaf_maps, doc.cosheaf_grams = stalks, maps, grams
    try:
        doc.cosheaf()
    except PersLapError as exc:
        raise InputError(f"cosheaf: {exc}") from exc


def load_document(path) -> InputDocument:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_document(text)


# -- serialization ------------------------------------------------------------------


def _vertices(s) -> list:
    return list(s)


def _rows(m: np.ndarray) -> list:
    return [[float(x) for x in row] for row in np.asarray(m)]


def document_to_dict(doc: InputDocument) -> dict:
    out: dict = {}
    if doc.complex is not None:
        cx = doc.complex
        out["simplices"] = [{"vertices": _vertices(s), "weight": float(cx.weights[s]),
                             "birth": float(doc.birth[s])} for s in cx.all_simplices()]
        if cx.grams:
            out["gram"] = {str(k): _rows(g) for k, g in sorted(cx.grams.items())}
    if doc.cosheaf_stalks is not None:
        order = doc.complex.all_simplices()
        stalks = []
        for s in order:
            entry = {"simplex": _vertices(s), "dim": int(doc.cosheaf_stalks[s])}
            if s in doc.cosheaf_grams:
                entry["gram"] = _rows(doc.cosheaf_grams[s])
            stalks.append(entry)
        rank = {s: i for i, s in enumerate(order)}
        maps = [{"face": _vertices(t), "coface": _vertices(s), "matrix": _rows(m)}
                for (t, s), m in sorted(doc.cosheaf_maps.items(), key=lambda kv: (rank[kv[0][1]], rank[kv[0][0]]))]
        out["cosheaf"] = {"stalks": stalks, "maps": maps}
    if doc.chains is not None:
        out["chains"] = [{"dims": list(c.dims),
                          "boundaries": {str(k): _rows(c.boundary(k)) for k in range(1, c.top + 1)},
                          "grams": {str(k): _rows(c.inner(k).gram) for k in range(c.top + 1)}}
                         for c in doc.chains]
    for name, sec in (("pair", doc.pair), ("triple", doc.triple)):
        if sec is None:
            continue
        if "subcomplexes" in sec:
            out[name] = {"subcomplexes": [[_vertices(s) for s in sorted(sub, key=lambda s: (len(s), s))]
                                          for sub in sec["subcomplexes"]]}
        else:
            out[name] = dict(sec)
    return out


def _dump_value(value, indent: str) -> str:
    # one list entry per line keeps instance files diff-able
    if isinstance(value, list) and value and isinstance(value[0], dict):
        inner = ",\n".join(indent + "  " + json.dumps(x) for x in value)
        return "[\n" + inner + "\n" + indent + "]"
    if isinstance(value, dict) and any(isinstance(v, list) and v and isinstance(v[0], dict)
                                       for v in value.values()):
        inner = ",\n".join(f"{indent}  {json.dumps(k)}: {_dump_value(v, indent + '  ')}"
                           for k, v in value.items())
        return "{\n" + inner + "\n" + indent + "}"
    return json.dumps(value)


def dump_document(doc: InputDocument) -> str:
    """Canonical JSON text; floats are written with ``repr``, the shortest round-trip form."""
    d = document_to_dict(doc)
    body = ",\n".join(f"  {json.dumps(k)}: {_dump_value(v, '  ')}" for k, v in d.items())
    return "{\n" + body + "\n}\n"


def filtration_document(f: Filtration, thresholds=None, pair=None) -> InputDocument:
    doc = InputDocument(f.complex, dict(f.birth))
    if thresholds is not None:
        doc.triple = {"thresholds": [float(x) for x in thresholds]}
    if pair is not None:
        doc.pair = {"s": float(pair[0]), "t": float(pair[1])}
    return doc


# -- reports ------------------------------------------------------------------------

REPORT_COLUMNS = ["section", "k", "kind", "q", "s", "t", "value", "status", "reason"]
_KIND_ORDER = {"up": 0, "down": 1, "full": 2}


def format_number(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


@dataclass
class ReportRow:
    section: str
    k: int
    kind: str
    q: int | None = None
    s: float | None = None
    t: float | None = None
    value: float | int | None = None
    status: str = ""
    reason: str = ""

    def sort_key(self):
        return (self.k, _KIND_ORDER.get(self.kind, 3), self.kind, self.q if self.q is not None else -1,
                self.s if self.s is not None else -math.inf, self.t if self.t is not None else -math.inf)


def render_report(rows: list[ReportRow], sort: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_COLUMNS)
    for r in (sorted(rows, key=ReportRow.sort_key) if sort else rows):
        w.writerow([r.section, r.k, r.kind, format_number(r.q), format_number(r.s), format_number(r.t),
                    format_number(r.value), r.status, r.reason])
    return buf.getvalue()
