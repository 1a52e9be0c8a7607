"""JSON channel files.

A file is a UTF-8 JSON object::

    {
      "format_version": "1.0",
      "kind": "single",
      "name": "...",
      "alphabets": {"x": 2, "y": 3, "s": 2, "s_t": 2, "s_r": 1},
      "state_law_axes": ["s", "s_t", "s_r"],
      "state_law": [...],            # flattened, row-major over state_law_axes
      "transition_axes": ["x", "s", "y"],
      "transition": [[[...]]]        # nested, innermost axis is the output
    }

MAC files add ``"tx_states_independent"``. Numbers are written with 17
significant digits so a write/read round trip is exact.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from typing import Any

import numpy as np

from .channels import AnyChannel, BcChannel, MacChannel, RelayChannel, StateChannel, validate
from .errors import ChannelFormatError

FORMAT_VERSION = "1.0"
SUPPORTED_MAJOR = 1

# kind -> (class, state_law axis names, transition axis names)
LAYOUTS = {
    "single": (StateChannel, ("s", "s_t", "s_r"), ("x", "s", "y")),
    "mac": (MacChannel, ("s", "s_t1", "s_t2", "s_r"), ("x1", "x2", "s", "y")),
    "bc": (BcChannel, ("s_t", "s_r1", "s_r2"), ("x", "s_t", "y1", "y2")),
    "relay": (RelayChannel, ("s", "s_d"), ("x_s", "x_r", "s", "s_d", "y_r", "y_d")),
}
_KIND_OF = {cls: kind for kind, (cls, _, _) in LAYOUTS.items()}


def _num(v: float) -> str:
    if not np.isfinite(v):
        raise ValueError(f"cannot serialize non-finite value {v!r}")
    return format(float(v), ".17g")


def _nested(a: np.ndarray, depth: int = 0, indent: int = 2) -> str:
    if a.ndim == 1:
        return "[" + ", ".join(_num(v) for v in a) + "]"
    pad = " " * (indent * (depth + 2))
    inner = (",\n" + pad).join(_nested(sub, depth + 1, indent) for sub in a)
    return "[\n" + pad + inner + "\n" + " " * (indent * (depth + 1)) + "]"


def dumps_channel(c: AnyChannel) -> str:
    """Canonical text of ``c``; identical channels give identical bytes."""
    kind = _KIND_OF.get(type(c))
    if kind is None:
        raise TypeError(f"cannot serialize {type(c).__name__}")
    _, sl_axes, tr_axes = LAYOUTS[kind]
    alph = c.sizes()
    head = {
        "format_version": FORMAT_VERSION,
        "kind": kind,
        "name": c.name,
        "alphabets": alph,
        "state_law_axes": list(sl_axes),
    }
    lines = ["{"]
    for k, v in head.items():
        lines.append(f'  {json.dumps(k)}: {json.dumps(v)},')
    if isinstance(c, MacChannel):
        lines.append(f'  "tx_states_independent": {json.dumps(bool(c.tx_states_independent))},')
    lines.append('  "state_law": [' + ", ".join(_num(v) for v in c.state_law.ravel()) + "],")
    lines.append(f'  "transition_axes": {json.dumps(list(tr_axes))},')
    lines.append('  "transition": ' + _nested(c.transition))
    lines.append("}")
    return "\n".join(lines) + "\n"


def content_hash(c: AnyChannel) -> str:
    """SHA-256 of the canonical file text."""
    return hashlib.sha256(dumps_channel(c).encode("utf-8")).hexdigest()


def atomic_write(path, text: str) -> None:
    """Write to a temporary sibling then rename, so readers never see a partial file."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_channel(c: AnyChannel, path) -> str:
    """Write ``c`` to ``path``; returns its content hash."""
    text = dumps_channel(c)
    atomic_write(path, text)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _field(doc: dict, key: str, typ=None) -> Any:
    if key not in doc:
        raise ChannelFormatError("missing required field", where=key)
    v = doc[key]
    if typ is not None and not isinstance(v, typ):
        raise ChannelFormatError(f"expected {typ.__name__ if isinstance(typ, type) else typ}, got {type(v).__name__}", where=key)
    return v


def _check_shape(obj, shape: tuple, where: str) -> None:
    """Walk a nested list and name the first entry whose extent is wrong."""
    if not shape:
        if isinstance(obj, bool) or not isinstance(obj, (int, float)):
            raise ChannelFormatError(f"expected a number, got {json.dumps(obj)[:40]}", where=where)
        return
    if not isinstance(obj, list):
        raise ChannelFormatError(f"expected a list of {shape[0]} entries", where=where)
    if len(obj) != shape[0]:
        raise ChannelFormatError(f"expected {shape[0]} entries, got {len(obj)}", where=where)
    for i, sub in enumerate(obj):
        _check_shape(sub, shape[1:], f"{where}[{i}]")


def loads_channel(text: str, check: bool = True) -> AnyChannel:
    """Parse channel text. With ``check`` value-level problems are raised too."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ChannelFormatError(e.msg, where=f"line {e.lineno}, column {e.colno}") from None
    if not isinstance(doc, dict):
        raise ChannelFormatError("top level must be a JSON object", where="line 1")

    version = str(_field(doc, "format_version"))
    try:
        major = int(version.split(".")[0])
    except ValueError:
        raise ChannelFormatError(f"unreadable version {version!r}", where="format_version") from None
    if major != SUPPORTED_MAJOR:
        raise ChannelFormatError(f"unsupported major version {major} (reader supports {SUPPORTED_MAJOR})",
                                 where="format_version")

    kind = _field(doc, "kind", str)
    if kind not in LAYOUTS:
        raise ChannelFormatError(f"unknown channel kind {kind!r}; expected one of {sorted(LAYOUTS)}", where="kind")
    cls, sl_axes, tr_axes = LAYOUTS[kind]

    alph = _field(doc, "alphabets", dict)
    sizes = {}
    for name in dict.fromkeys(sl_axes + tr_axes):
        v = alph.get(name)
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ChannelFormatError(f"alphabet size must be a positive integer, got {v!r}", where=f"alphabets.{name}")
        sizes[name] = v
    for key, expect in (("state_law_axes", sl_axes), ("transition_axes", tr_axes)):
        if key in doc and list(doc[key]) != list(expect):
            raise ChannelFormatError(f"axis order {doc[key]} differs from {list(expect)}", where=key)

    sl_shape = tuple(sizes[a] for a in sl_axes)
    flat = _field(doc, "state_law", list)
    _check_shape(flat, (int(np.prod(sl_shape)),), "state_law")
    tr_shape = tuple(sizes[a] for a in tr_axes)
    tr = _field(doc, "transition", list)
    _check_shape(tr, tr_shape, "transition")

    kw = {"name": str(doc.get("name", ""))}
    if cls is MacChannel:
        flag = doc.get("tx_states_independent", False)
        if not isinstance(flag, bool):
            raise ChannelFormatError("expected true or false", where="tx_states_independent")
        kw["tx_states_independent"] = flag
    c = cls(np.array(flat, dtype=float).reshape(sl_shape), np.array(tr, dtype=float), **kw)
    if check:
        diags = validate(c)
        if diags:
            raise ChannelFormatError("; ".join(d.message for d in diags), where=diags[0].field)
    return c


def read_channel(path, check: bool = True) -> AnyChannel:
    with open(path, encoding="utf-8") as fh:
        return loads_channel(fh.read(), check=check)
