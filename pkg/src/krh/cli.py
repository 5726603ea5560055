"""krh: compute link homologies of braid closures from the command line."""
from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass

from .braid import ParseError, RangeError, parse_braid
from .cube import IntermediateTorsion, default_jobs
from .equivariant import BetaUnavailable
from .report import WindowTooSmall, emit_json, emit_text

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_WINDOW = 0, 1, 2, 3

_THEORY = re.compile(r"^(homfly|schubert-selftest|(sln-raw|sln|sln-rational|equivariant|krasner):(\d+))$")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class JobConfig:
    braid: str
    strands: int
    theory: str
    q_max: int = 8
    b_cap: int = 4
    coeff: str = "Z"
    fmt: str = "text"
    jobs: int = 1

    @property
    def family(self):
        return self.theory.split(":")[0]

    @property
    def param(self):
        return int(self.theory.split(":")[1]) if ":" in self.theory else None

    def validate(self):
        if not _THEORY.match(self.theory):
            raise ConfigError(f"unknown theory {self.theory!r}")
        fam, p = self.family, self.param
        if fam in ("sln-raw", "sln-rational", "krasner") and p < 1:
            raise ConfigError(f"{fam} needs n >= 1")
        if fam == "equivariant" and p < 1:
            raise ConfigError("equivariant needs k >= 1")
        if self.b_cap < 1:
            raise ConfigError("--bcap must be at least 1")
        if self.coeff not in ("Z", "Q"):
            raise ConfigError("--coeff must be Z or Q")
        if self.strands < 1:
            raise ConfigError("--strands must be at least 1")
        return self


def _rationalize(report):
    from .exactalg import GradedAbelianGroup
    report.groups = {k: GradedAbelianGroup(g.free_rank, ()) for k, g in report.groups.items()
                     if g.free_rank}
    return report


def _selftest(cfg):
    from .schubert import selftest
    if not 2 <= cfg.strands <= 4:
        raise ConfigError("schubert-selftest runs for 2 <= strands <= 4")
    results = selftest(cfg.strands)
    ok = all(p for _, p in results)
    if cfg.fmt == "json":
        text = json.dumps({"theory": cfg.theory, "strands": cfg.strands,
                           "results": [{"name": n, "passed": p} for n, p in results]},
                          separators=(",", ":")) + "\n"
    else:
        text = "".join(f"{'PASS' if p else 'FAIL'}  {n}\n" for n, p in results)
    return (EXIT_OK if ok else EXIT_FAILED), text


def compute(cfg):
    """The LinkHomologyReport for a validated non-selftest config."""
    from . import cube
    from .equivariant import universal_homology
    word = parse_braid(cfg.braid, cfg.strands)
    fam, p, Q = cfg.family, cfg.param, cfg.q_max
    if fam == "homfly":
        rep = cube.homfly_homology(word, Q, cfg.coeff, jobs=cfg.jobs)
    elif fam == "sln-raw":
        rep = cube.sln_unnormalized(word, p, Q, jobs=cfg.jobs)
    elif fam == "sln":
        rep = cube.sln_normalized(word, p, Q, cfg.coeff, jobs=cfg.jobs)
    elif fam == "sln-rational":
        rep = cube.rational_sln(word, p, Q, jobs=cfg.jobs)
    elif fam == "equivariant":
        rep = universal_homology(word, p, cfg.b_cap, Q, cfg.coeff, jobs=cfg.jobs)
    else:
        rep = cube.krasner_report(word, p, Q, jobs=cfg.jobs)
    if cfg.coeff == "Q":
        _rationalize(rep)
    rep.window = dict(rep.window, coeff="Q" if fam == "sln-rational" else cfg.coeff)
    return rep


def run(cfg):
    """(exit code, output text, error text)."""
    try:
        cfg.validate()
        if cfg.theory == "schubert-selftest":
            code, text = _selftest(cfg)
            return code, text, ""
        rep = compute(cfg)
    except (ParseError, RangeError, ConfigError) as exc:
        return EXIT_INVALID, "", f"error: {exc}\n"
    except WindowTooSmall as exc:
        return EXIT_WINDOW, "", f"window too small: {exc}\n"
    except (IntermediateTorsion, BetaUnavailable) as exc:
        return EXIT_FAILED, "", f"computation failed: {exc}\n"
    if cfg.fmt == "json":
        return EXIT_OK, emit_json(rep) + "\n", ""
    return EXIT_OK, emit_text(rep), ""


def build_parser():
    ap = argparse.ArgumentParser(prog="krh", description=__doc__)
    ap.add_argument("--braid", default="", help='braid word, e.g. "1 -2 1" or "[1,1,1]"')
    ap.add_argument("--strands", type=int, required=True)
    ap.add_argument("--theory", default="homfly",
                    help="homfly | sln-raw:n | sln:n | sln-rational:n | equivariant:k | krasner:n | schubert-selftest")
    ap.add_argument("--qmax", type=int, default=8)
    ap.add_argument("--bcap", type=int, default=4, help="b-degree cap for equivariant:k")
    ap.add_argument("--coeff", choices=("Z", "Q"), default="Z")
    ap.add_argument("--format", choices=("text", "json"), default="text")
    ap.add_argument("--jobs", type=int, default=None, help="worker processes (default: $KRH_JOBS or 1)")
    ap.add_argument("--out", default=None, help="write the report here instead of stdout")
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    jobs = args.jobs if args.jobs is not None else default_jobs()
    cfg = JobConfig(args.braid, args.strands, args.theory, args.qmax, args.bcap, args.coeff,
                    args.format, max(1, jobs))
    code, text, err = run(cfg)
    if err:
        sys.stderr.write(err)
    if text:
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
