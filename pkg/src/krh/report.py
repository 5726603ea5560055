"""Link homology reports, JSON/text rendering and shift-aligned comparison."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .exactalg import GradedAbelianGroup

SHIFT_CONVENTION = "gr_q = q - n_J with n_J = 2 * (negative letters resolved singularly)"


class WindowTooSmall(RuntimeError):
    pass


@dataclass
class LinkHomologyReport:
    braid: str
    strands: int
    theory: str
    window: dict
    groups: dict                      # (gr_v, gr_h, gr_q[, gr_b]) -> GradedAbelianGroup
    shifts: dict = field(default_factory=lambda: {"convention": SHIFT_CONVENTION,
                                                  "overall": "unresolved"})
    checks: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.groups = {k: g for k, g in sorted(self.groups.items()) if not g.is_zero()}

    @property
    def has_b(self):
        return any(len(k) == 4 for k in self.groups)

    def total_rank(self):
        return sum(g.free_rank for g in self.groups.values())

    def torsion_free(self):
        return all(not g.torsion for g in self.groups.values())

    def ranks(self):
        return {k: g.free_rank for k, g in self.groups.items() if g.free_rank}

    def restrict(self, pred):
        return {k: g for k, g in self.groups.items() if pred(k)}

    # ------------------------------------------------------------ serialization
    def to_dict(self):
        names = ("gr_v", "gr_h", "gr_q", "gr_b")
        rows = []
        for k, g in self.groups.items():
            row = {names[i]: int(v) for i, v in enumerate(k)}
            row["free_rank"] = g.free_rank
            row["torsion"] = sorted(g.torsion)
            rows.append(row)
        return {"braid": self.braid, "strands": self.strands, "theory": self.theory,
                "window": dict(self.window), "shifts": dict(self.shifts), "groups": rows}


def emit_json(report):
    if report is None:
        return json.dumps({"groups": []})
    return json.dumps(report.to_dict(), indent=None, separators=(",", ":"))


def parse_json(text):
    data = json.loads(text)
    groups = {}
    for row in data.get("groups", []):
        key = (row["gr_v"], row["gr_h"], row["gr_q"]) + ((row["gr_b"],) if "gr_b" in row else ())
        groups[key] = GradedAbelianGroup(row["free_rank"], tuple(row["torsion"]))
    return LinkHomologyReport(data.get("braid", ""), data.get("strands", 0), data.get("theory", ""),
                              data.get("window", {}), groups,
                              data.get("shifts", {"convention": SHIFT_CONVENTION, "overall": "unresolved"}))


def emit_text(report):
    lines = [f"theory {report.theory}   braid [{report.braid}] in Br({report.strands})",
             f"window {report.window}",
             f"shifts {report.shifts['convention']}; overall shift {report.shifts['overall']}"]
    if not report.groups:
        lines.append("(no nonzero groups in window)")
    by_v = {}
    for k, g in report.groups.items():
        by_v.setdefault(k[0], []).append((k, g))
    for v in sorted(by_v):
        lines.append(f"gr_v = {v}")
        for k, g in by_v[v]:
            extra = f"  b={k[3]}" if len(k) == 4 else ""
            lines.append(f"  h={k[1]:<3d} q={k[2]:<4d}{extra}  {g}")
    for name, val in report.checks.items():
        lines.append(f"check {name}: {val}")
    return "\n".join(lines) + "\n"


# -------------------------------------------------------------- comparisons

def align_shift(a, b, q_limit_a, q_limit_b):
    """Find one overall shift s with a[k + s] = b[k] on the region where both
    windows are complete.  Returns the shift or None.

    Tables are anchored at their lexicographically least (q, v, h) key."""
    ka = {k: g for k, g in a.items()}
    kb = {k: g for k, g in b.items()}
    if not ka or not kb:
        return (0,) * 3 if not ka and not kb else None
    anchor = lambda t: min(t, key=lambda k: (k[2], k[0], k[1]))
    ma, mb = anchor(ka), anchor(kb)
    s = tuple(x - y for x, y in zip(ma, mb))
    limit = min(q_limit_a, q_limit_b + s[2])
    lhs = {k: g for k, g in ka.items() if k[2] <= limit}
    rhs = {tuple(x + y for x, y in zip(k, s)): g for k, g in kb.items()}
    rhs = {k: g for k, g in rhs.items() if k[2] <= limit}
    return s if lhs == rhs else None
