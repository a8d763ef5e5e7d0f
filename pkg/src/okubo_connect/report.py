"""Check reports shared by the connection, euler and cli modules."""

import hashlib
import json
from dataclasses import asdict, dataclass, field


def fmt_complex(z, digits=12):
    z = complex(z)
    sign = "+" if z.imag >= 0 or z.imag != z.imag else "-"
    return f"{z.real:.{digits}g}{sign}{abs(z.imag):.{digits}g}i"


def _enc(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


@dataclass
class Entry:
    name: str
    value: object = None
    predicted: object = None
    abs_err: float = 0.0
    rel_err: float = 0.0
    passed: bool = True
    note: str = ""

    def to_json(self):
        d = asdict(self)
        d["value"] = _enc(self.value)
        d["predicted"] = _enc(self.predicted)
        return d


@dataclass
class Report:
    command: str
    inputs_digest: str = ""
    seed: object = None
    entries: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def add(self, name, value=None, predicted=None, abs_err=0.0, rel_err=0.0,
            passed=True, note=""):
        self.entries.append(Entry(name, value, predicted, float(abs_err), float(rel_err),
                                  bool(passed), note))
        return self.entries[-1]

    def compare(self, name, value, predicted, tol, scale=None, note=""):
        """Add an entry with relative error |v - p| / max(|p|, 1e-3 scale)."""
        value, predicted = complex(value), complex(predicted)
        ae = abs(value - predicted)
        den = abs(predicted)
        if scale is not None:
            den = max(den, 1e-3 * scale)
        re = ae / den if den > 0 else (0.0 if ae == 0 else float("inf"))
        return self.add(name, value, predicted, ae, re, re <= tol, note)

    def extend(self, other, prefix=""):
        for e in other.entries:
            e.name = prefix + e.name
            self.entries.append(e)
        return self

    @property
    def n_pass(self):
        return sum(e.passed for e in self.entries)

    @property
    def n_fail(self):
        return sum(not e.passed for e in self.entries)

    @property
    def passed(self):
        return self.n_fail == 0

    def max_rel(self):
        return max((e.rel_err for e in self.entries), default=0.0)

    def to_json(self):
        return {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "seed": self.seed,
            "summary": {"entries": len(self.entries), "pass": self.n_pass, "fail": self.n_fail},
            "entries": [e.to_json() for e in self.entries],
            "timing": self.timing,
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, d):
        def dec(v):
            if isinstance(v, list) and len(v) == 2:
                return complex(v[0], v[1])
            return v
        rep = cls(d["command"], d.get("inputs_digest", ""), d.get("seed"),
                  timing=d.get("timing", {}), meta=d.get("meta", {}))
        for e in d.get("entries", []):
            rep.entries.append(Entry(e["name"], dec(e["value"]), dec(e["predicted"]),
                                     e["abs_err"], e["rel_err"], e["passed"], e.get("note", "")))
        return rep


def digest(obj):
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]
