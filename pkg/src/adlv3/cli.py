"""Command-line interface: classification reports, point tables and the
verification harness that binds the predictors to brute-force oracles.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 precision cap.
"""

from __future__ import annotations

import argparse
import collections
import json
import platform
import random
import sys
from dataclasses import dataclass, field as dc_field
from typing import Optional

from . import __version__
from .adlv import (ADLVError, BasicB, MEntry, anchor_sets, assign_component, cell_points,
                   central_shift_check, classify, compute_M, component_geometry,
                   enumerate_points, enumeration_bound, find_point, in_shell, membership,
                   nonempty, predicted_count, random_k, _rational_anchor_candidates,
                   to_level_zero)
from .building import Chamber, chamber_relpos, first_chamber, predict_inv_set
from .cartan import inv_prime
from .ff import FieldError, field
from .latmat import (Mat3, PrecisionError, Vertex, act, standard_vertex, vertex_of)
from .series import ZeroToPrecision

CHECKS = ("inv-oracle", "decomposition", "counts", "eta-shift", "central-shift", "m-sets")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------------

@dataclass
class RunConfig:
    p: int = 2
    s: int = 1
    m: int = 1
    prec: Optional[int] = None
    N: Optional[int] = None
    eta: int = 0
    seed: int = 0
    samples: int = 200
    shards: int = 1
    fmt: str = "json"
    b: BasicB = dc_field(default_factory=lambda: BasicB("one"))
    lam: Optional[tuple] = None

    def validate(self) -> None:
        if self.N is not None and self.N < 0:
            raise UsageError("--N must be >= 0")
        if self.prec is not None and self.N is not None and self.prec < 2 * self.N + 2:
            raise UsageError(f"--prec {self.prec} is below 2N+2 = {2 * self.N + 2}")
        if self.samples < 0 or self.shards < 1:
            raise UsageError("--samples must be >= 0 and --shards >= 1")
        if (self.p ** self.s) ** self.m > 2 ** 20:
            raise UsageError("q^m exceeds the supported 2^20")

    def ctx(self):
        return field(self.p, self.s, self.m)

    def bound(self) -> int:
        if self.N is not None:
            return self.N
        if self.lam is not None and nonempty(self.lam, self.b):
            return enumeration_bound(self.lam, self.b)
        return 2

    def echo(self) -> dict:
        return {"b": str(self.b), "lambda": list(self.lam) if self.lam else None,
                "q": self.p ** self.s, "p": self.p, "s": self.s, "m": self.m,
                "prec": self.prec, "N": self.N, "eta": self.eta, "seed": self.seed,
                "samples": self.samples, "shards": self.shards, "format": self.fmt}


def _parse_q(s: str) -> tuple[int, int]:
    try:
        if "^" in s:
            p, e = s.split("^")
            return int(p), int(e)
        q = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --q value {s!r}")
    for p in range(2, q + 1):
        if q % p == 0:
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            if r != 1:
                raise argparse.ArgumentTypeError(f"q={q} is not a prime power")
            return p, e
    raise argparse.ArgumentTypeError(f"bad --q value {s!r}")


def _parse_lambda(s: str) -> tuple:
    try:
        lam = tuple(int(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --lambda value {s!r}")
    if len(lam) != 3:
        raise argparse.ArgumentTypeError("--lambda needs three integers m1,m2,m3")
    # K t^lambda K only depends on lambda up to permutation: use the dominant one
    return tuple(sorted(lam, reverse=True))


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--b", choices=["1", "b1", "b2"], default="1", help="basic element")
    c.add_argument("--lambda", dest="lam", type=_parse_lambda, metavar="m1,m2,m3",
                   help="cocharacter (any order; sorted to dominant)")
    c.add_argument("--q", type=_parse_q, default=(2, 1), metavar="P[^S]",
                   help="base field F_q, q = P^S (default 2)")
    c.add_argument("--m", type=int, default=1, metavar="M", help="work over F_{q^m} (default 1)")
    c.add_argument("--prec", type=int, metavar="K", help="t-adic precision for sampled checks")
    c.add_argument("--N", type=int, metavar="B", help="shell radius (default: heuristic bound)")
    c.add_argument("--eta", type=int, default=0, metavar="R", help="eta-level of enumerated points")
    c.add_argument("--seed", type=int, default=0, metavar="S", help="base seed for sampled checks")
    c.add_argument("--samples", type=int, default=200, metavar="T",
                   help="sample count for sampled checks")
    c.add_argument("--shards", type=int, default=1, metavar="J", help="worker processes for enumeration")
    c.add_argument("--format", dest="fmt", choices=["json", "tsv"], default=None,
                   help="output format (default: json, tsv for enumerate)")
    return c


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="adlv3", description=__doc__.split("\n\n")[0].replace("\n", " "))
    ap.add_argument("--version", action="version", version=f"adlv3 {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)
    sub.add_parser("classify", parents=[common], help="classification report for (lambda, b)")
    pe = sub.add_parser("enumerate", parents=[common], help="points of X_lambda(b) in a shell")
    pe.add_argument("--assign", action="store_true", help="add component keys and labels")
    pv = sub.add_parser("verify", parents=[common], help="run an oracle check")
    pv.add_argument("check", choices=CHECKS)
    return ap


def _config(ns, default_fmt: str) -> RunConfig:
    p, s = ns.q
    cfg = RunConfig(p=p, s=s, m=ns.m, prec=ns.prec, N=ns.N, eta=ns.eta, seed=ns.seed,
                    samples=ns.samples, shards=ns.shards, fmt=ns.fmt or default_fmt,
                    b=BasicB.parse(ns.b), lam=ns.lam)
    cfg.validate()
    return cfg


def metadata(cfg: RunConfig) -> dict:
    try:
        F = cfg.ctx()
        mod = F.describe() if hasattr(F, "describe") else str(F.modulus)
    except FieldError as exc:
        raise UsageError(str(exc))
    return {"tool": "adlv3", "version": __version__, "python": platform.python_version(),
            "modulus": mod, "config": cfg.echo()}


def _rng(cfg: RunConfig, stream: str, i: int) -> random.Random:
    # counter-based: every sample gets its own generator keyed by (seed, stream, index)
    return random.Random(f"{cfg.seed}/{stream}/{i}")


# ---------------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------------

def emit_json(meta: dict, body: dict, out) -> None:
    out.write(json.dumps({"meta": meta, "report": body}, ensure_ascii=False, indent=2))
    out.write("\n")


def emit_tsv(meta: dict, header: list, rows: list, out) -> None:
    for k, v in meta.items():
        out.write(f"# {k}: {json.dumps(v, ensure_ascii=False) if isinstance(v, dict) else v}\n")
    out.write("\t".join(header) + "\n")
    for r in rows:
        out.write("\t".join(str(x) for x in r) + "\n")


# ---------------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------------

def _need_lambda(cfg: RunConfig) -> tuple:
    if cfg.lam is None:
        raise UsageError("--lambda is required")
    return cfg.lam


def cmd_classify(cfg: RunConfig, out) -> int:
    lam = _need_lambda(cfg)
    rep = classify(lam, cfg.b, q=cfg.p ** cfg.s)
    meta = metadata(cfg)
    if cfg.fmt == "tsv":
        rows = [[c["anchor_type"], c["mu"], c["branch"] or "-", c["geometry"],
                 json.dumps(c["predicted_counts"])] for c in rep["components"]]
        meta["summary"] = {k: rep[k] for k in ("lambda", "b", "nonempty", "dimension",
                                                "M", "M_prime", "fibration_case")}
        emit_tsv(meta, ["anchor_type", "mu", "branch", "geometry", "predicted_counts"], rows, out)
    else:
        emit_json(meta, rep, out)
    return 0


def cmd_enumerate(cfg: RunConfig, assign: bool, out) -> int:
    lam = _need_lambda(cfg)
    F = cfg.ctx()
    N = cfg.bound()
    pts = list(enumerate_points(lam, cfg.b, F, N, cfg.eta, shards=cfg.shards))
    rows = []
    for P in pts:
        row = [P.to_text(), cfg.eta]
        if assign:
            keys = assign_component(P, lam, cfg.b)
            row.append(json.dumps([{"anchor": k.anchor.to_json(), "mu": str(k.mu),
                                    "branch": k.branch, "label": str(l)} for k, l in keys],
                                  separators=(",", ":")))
        rows.append(row)
    meta = metadata(cfg)
    meta["bound_N"] = N
    header = ["hermite", "eta"] + (["components"] if assign else [])
    if cfg.fmt == "json":
        emit_json(meta, {"count": len(rows), "header": header, "rows": rows}, out)
    else:
        emit_tsv(meta, header, rows, out)
    return 0


@dataclass
class VerifyReport:
    check: str
    samples: int = 0
    passed: bool = True
    counterexamples: list = dc_field(default_factory=list)
    tallies: dict = dc_field(default_factory=dict)

    def fail(self, item: dict) -> None:
        self.passed = False
        if len(self.counterexamples) < 20:
            self.counterexamples.append(item)

    def to_json(self) -> dict:
        return {"check": self.check, "samples": self.samples,
                "result": "pass" if self.passed else "fail",
                "counterexamples": self.counterexamples, "tallies": self.tallies}


_E_CHOICES = [(1, 0, -1), (2, 0, -1), (2, 1, 0), (2, 0, -2), (1, 0, 0), (1, 1, 0),
              (3, 1, 0), (2, 1, -1)]


def inv_oracle_sample(F, rng: random.Random, e=None, f=None, deg: int = 3):
    """One sampled triple (Q, P1, P2): positions at Q and the observed inv'(P1, P2)."""
    g = random_k(F, rng, deg) * Mat3.diag_t(F, [rng.randint(-2, 2) for _ in range(3)]) \
        * random_k(F, rng, deg)
    e = e or rng.choice(_E_CHOICES)
    f = f or rng.choice(_E_CHOICES)
    Q = vertex_of(g)
    P1 = vertex_of(g * random_k(F, rng, deg) * Mat3.diag_t(F, e))
    P2 = vertex_of(g * random_k(F, rng, deg) * Mat3.diag_t(F, f))
    ee, ff = inv_prime(Q, P1), inv_prime(Q, P2)
    C1, C2 = first_chamber(Q, P1) if ee.length else None, first_chamber(Q, P2) if ff.length else None
    if not isinstance(C1, Chamber) or not isinstance(C2, Chamber):
        return None
    pos = chamber_relpos(C1, C2, Q)
    return Q, P1, P2, ee, ff, pos, inv_prime(P1, P2)


def verify_inv_oracle(cfg: RunConfig) -> VerifyReport:
    F = cfg.ctx()
    rep = VerifyReport("inv-oracle")
    tally = collections.Counter()
    deg = max(1, (cfg.prec or 8) // 2)
    for i in range(cfg.samples):
        s = inv_oracle_sample(F, _rng(cfg, "inv", i), deg=deg)
        if s is None:
            tally["wall-skip"] += 1
            continue
        Q, P1, P2, ee, ff, pos, obs = s
        if pos.degenerate:
            tally[f"skip-{pos.tag}"] += 1
            continue
        rep.samples += 1
        pred = predict_inv_set(ee, ff, pos)
        ok = obs in pred
        tally[f"{pos.tag}-{'ok' if ok else 'bad'}"] += 1
        if not ok:
            rep.fail({"index": i, "Q": Q.to_json(), "P1": P1.to_json(), "P2": P2.to_json(),
                      "e": str(ee), "f": str(ff), "position": pos.tag, "observed": str(obs),
                      "predicted": sorted(str(x) for x in pred)})
    rep.tallies = dict(sorted(tally.items()))
    return rep


def verify_decomposition(cfg: RunConfig) -> VerifyReport:
    lam = _need_lambda(cfg)
    b = cfg.b
    F = cfg.ctx()
    rep = VerifyReport("decomposition")
    if not nonempty(lam, b):
        rep.tallies = {"nonempty": False}
        return rep
    N = cfg.bound()
    pts = list(enumerate_points(lam, b, F, N, cfg.eta, shards=cfg.shards))
    strata: dict = collections.OrderedDict()
    exclusive = b.superbasic or lam[1] != 0
    for P in pts:
        rep.samples += 1
        keys = assign_component(P, lam, b)
        if not keys or (exclusive and len(keys) != 1):
            rep.fail({"point": P.to_json(), "keys": [k.to_json() for k, _ in keys]})
        for k, l in keys:
            name = f"{k.anchor.to_text()} {k.mu} {k.branch or '-'}"
            strata.setdefault(name, 0)
            strata[name] += 1
    rep.tallies = {"points": len(pts), "strata": len(strata),
                   "stratum_sizes": dict(sorted(strata.items())),
                   "disjoint_required": exclusive}
    return rep


def verify_counts(cfg: RunConfig) -> VerifyReport:
    lam = _need_lambda(cfg)
    b = cfg.b
    F = cfg.ctx()
    rep = VerifyReport("counts")
    if not nonempty(lam, b):
        rep.tallies = {"nonempty": False}
        return rep
    N = cfg.bound()
    q = cfg.p ** cfg.s
    rows = []
    for e in anchor_sets(lam, b):
        if e.length + 1 > N:
            rows.append({"mu": str(e), "skipped": f"cell needs N >= {e.length + 1}"})
            continue
        Q = standard_vertex(F, e.anchor_type)
        pts = cell_points(lam, b, Q, e)
        if b.superbasic:
            # keep the points whose assigned component is this one
            pts = [P for P in pts
                   if any(k.anchor == Q and k.mu == e.cls for k, _ in assign_component(P, lam, b))]
        g = component_geometry(lam, b, e)
        try:
            pred = predicted_count(g, q, cfg.m)
        except ADLVError:
            pred = None
        rep.samples += 1
        row = {"anchor": f"Λ{e.anchor_type}", "mu": str(e), "geometry": str(g),
               "observed": len(pts), "predicted": pred}
        rows.append(row)
        if pred is not None and pred != len(pts):
            rep.fail(row)
    rep.tallies = {"components": rows}
    return rep


def verify_eta_shift(cfg: RunConfig) -> VerifyReport:
    lam = _need_lambda(cfg)
    b = cfg.b
    F = cfg.ctx()
    rep = VerifyReport("eta-shift")
    if not nonempty(lam, b):
        rep.tallies = {"nonempty": False}
        return rep
    N = cfg.bound()
    a = b.shift_a1(F)
    A = list(enumerate_points(lam, b, F, N, 0, shards=cfg.shards))
    B = set(enumerate_points(lam, b, F, N + 1, 1, shards=cfg.shards))
    images = set()
    for P in A:
        rep.samples += 1
        aP = act(a, P)
        if aP in images or aP not in B or not membership(aP, lam, b):
            rep.fail({"point": P.to_json(), "image": aP.to_json()})
        images.add(aP)
        if act(b.matrix(F), P) != P and not membership(act(b.matrix(F), P), lam, b):
            rep.fail({"point": P.to_json(), "reason": "b P is not a member"})
    Aset = set(A)
    back = 0
    for P in B:
        _, P0 = to_level_zero(P, b)
        if in_shell(P, b, N):
            back += 1
            if P0 not in Aset:
                rep.fail({"point": P.to_json(), "reason": "preimage missing at level 0"})
    rep.tallies = {"level0": len(A), "level1_shell": len(B), "preimages_checked": back}
    return rep


def verify_central_shift(cfg: RunConfig) -> VerifyReport:
    lam = _need_lambda(cfg)
    b = cfg.b
    F = cfg.ctx()
    rep = VerifyReport("central-shift")
    tally = collections.Counter()
    for i in range(cfg.samples):
        rng = _rng(cfg, "central", i)
        if i % 2 == 0 and nonempty(lam, b):
            P = find_point(lam, b, F, rng, samples=50)
            if P is None:
                tally["no-member-found"] += 1
                continue
        else:
            P = vertex_of(random_k(F, rng, 2) * Mat3.diag_t(F, [rng.randint(-2, 2) for _ in range(3)]))
        m = rng.choice([-2, -1, 1, 2, 3])
        rep.samples += 1
        ok = central_shift_check(P, lam, b, m)
        tally["member" if membership(P, lam, b) else "non-member"] += 1
        if not ok:
            rep.fail({"index": i, "point": P.to_json(), "m": m})
    rep.tallies = dict(sorted(tally.items()))
    return rep


def observed_classes(P: Vertex, lam, b: BasicB, maxlen: int) -> set:
    """Classes inv'(Q, P) for the nearest admissible anchors Q of P (level zero)."""
    _, P0 = to_level_zero(P, b)
    F = P.ctx
    if b.superbasic:
        found = [inv_prime(standard_vertex(F, i), P0) for i in range(3)]
        best = min(c.length for c in found)
        return {c for c in found if c.length == best}
    for L in range(maxlen + 1):
        hits = set()
        for a in range(L + 1):
            e = MEntry.of((L, L - a, 0))
            if _rational_anchor_candidates(P0, e):
                hits.add(e.cls)
        if hits:
            return hits
    return set()


def verify_m_sets(cfg: RunConfig) -> VerifyReport:
    lam = _need_lambda(cfg)
    b = cfg.b
    F = cfg.ctx()
    rep = VerifyReport("m-sets")
    if not nonempty(lam, b):
        rep.tallies = {"nonempty": False}
        return rep
    N = cfg.bound()
    M = {e.cls for e in compute_M(lam, b)}
    maxlen = max(c.length for c in M)
    seen = set()
    for P in enumerate_points(lam, b, F, N, cfg.eta, shards=cfg.shards):
        rep.samples += 1
        seen |= observed_classes(P, lam, b, maxlen)
    reachable = {c for c in M if c.length + 1 <= N}
    extra = seen - M
    missing = reachable - seen
    if extra or missing:
        rep.fail({"extra": sorted(str(c) for c in extra),
                  "missing": sorted(str(c) for c in missing)})
    rep.tallies = {"M": sorted(str(c) for c in M), "observed": sorted(str(c) for c in seen),
                   "reachable_within_N": sorted(str(c) for c in reachable)}
    return rep


_VERIFY = {"inv-oracle": verify_inv_oracle, "decomposition": verify_decomposition,
           "counts": verify_counts, "eta-shift": verify_eta_shift,
           "central-shift": verify_central_shift, "m-sets": verify_m_sets}


def cmd_verify(cfg: RunConfig, check: str, out) -> int:
    rep = _VERIFY[check](cfg)
    meta = metadata(cfg)
    if cfg.fmt == "tsv":
        rows = [[k, json.dumps(v, ensure_ascii=False)] for k, v in rep.to_json().items()]
        emit_tsv(meta, ["field", "value"], rows, out)
    else:
        emit_json(meta, rep.to_json(), out)
    return 0 if rep.passed else 1


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if ns.cmd == "classify":
            cfg = _config(ns, "json")
            return cmd_classify(cfg, out)
        if ns.cmd == "enumerate":
            cfg = _config(ns, "tsv")
            return cmd_enumerate(cfg, ns.assign, out)
        cfg = _config(ns, "json")
        return cmd_verify(cfg, ns.check, out)
    except (UsageError, ADLVError, FieldError) as exc:
        sys.stderr.write(f"adlv3: error: {exc}\n")
        return 2
    except (PrecisionError, ZeroToPrecision) as exc:
        sys.stderr.write(f"adlv3: precision cap exceeded: {exc}\n")
        return 3


if __name__ == "__main__":
    sys.exit(main())
