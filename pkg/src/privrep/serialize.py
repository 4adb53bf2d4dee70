"""Plain-text persistence for hypothesis families.

Two forms are supported.  A parametric point family is stored as its
parameters and rebuilt by sampling; an explicit family is stored class by
class, with each hypothesis written either as a truth table (hex mask, bit x
is the value at point x) or as threshold-hash parameters.  Floats are written
with repr so a round trip is exact.
"""
from __future__ import annotations

import math

from .model import TruthTableHypothesis
from .pointhash import ThresholdHashHypothesis, point_family
from .representation import HypothesisClass, HypothesisFamily

__all__ = ["save_family", "load_family"]

TT_D_LIMIT = 16


def _member_line(h) -> str:
    if isinstance(h, ThresholdHashHypothesis):
        return f"th {h.p} {h.a} {h.b} {h.tau}"
    d = h.d
    if d > TT_D_LIMIT:
        raise ValueError(f"cannot tabulate a hypothesis on d={d} bits")
    mask = 0
    for x, v in enumerate(h.values()):
        if v:
            mask |= 1 << x
    digits = max(1, math.ceil((1 << d) / 4))
    return f"tt {mask:0{digits}x}"


def save_family(F: HypothesisFamily, path) -> None:
    lines = []
    meta = F.meta or {}
    if meta.get("kind") == "point":
        lines.append(f"family point d={F.d} size_bound={F.size_bound!r}")
        lines.append(f"params alpha={meta['alpha']!r} beta={meta['beta']!r}")
    elif F.explicit_support is not None:
        lines.append(f"family explicit d={F.d} size_bound={F.size_bound!r}")
        for cls, prob in F.explicit_support:
            members = list(cls)
            lines.append(f"class {prob!r} {len(members)}")
            for h in members:
                lines.append(_member_line(h))
    else:
        raise ValueError("family is not serializable: sampler-only with no parameters")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_kv(tok: str, key: str) -> str:
    prefix = key + "="
    if not tok.startswith(prefix):
        raise ValueError(f"expected {key}=..., got {tok!r}")
    return tok[len(prefix) :]


def load_family(path) -> HypothesisFamily:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError("empty family file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "family":
        raise ValueError(f"bad header {lines[0]!r}")
    kind = head[1]
    d = int(_parse_kv(head[2], "d"))
    size_bound = float(_parse_kv(head[3], "size_bound"))

    if kind == "point":
        if len(lines) != 2:
            raise ValueError("point family file must have exactly two lines")
        toks = lines[1].split()
        if len(toks) != 3 or toks[0] != "params":
            raise ValueError(f"bad params line {lines[1]!r}")
        alpha = float(_parse_kv(toks[1], "alpha"))
        beta = float(_parse_kv(toks[2], "beta"))
        return point_family(d, alpha, beta)

    if kind != "explicit":
        raise ValueError(f"unknown family kind {kind!r}")

    support = []
    i = 1
    while i < len(lines):
        toks = lines[i].split()
        if len(toks) != 3 or toks[0] != "class":
            raise ValueError(f"bad class line {lines[i]!r}")
        prob = float(toks[1])
        count = int(toks[2])
        if i + count >= len(lines):
            raise ValueError(f"class block at line {i + 1} declares {count} members")
        members = []
        for j in range(i + 1, i + 1 + count):
            mtoks = lines[j].split()
            if mtoks[0] == "tt":
                mask = int(mtoks[1], 16)
                table = tuple((mask >> x) & 1 for x in range(1 << d))
                members.append(TruthTableHypothesis(d, table))
            elif mtoks[0] == "th":
                p, a, b, tau = (int(t) for t in mtoks[1:5])
                members.append(ThresholdHashHypothesis(d, p, a, b, tau))
            else:
                raise ValueError(f"unknown member tag {mtoks[0]!r}")
        support.append((HypothesisClass(members), prob))
        i += 1 + count
    return HypothesisFamily(d=d, size_bound=size_bound, explicit_support=tuple(support))
