"""Verification suites, reports and the on-disk result cache."""
from __future__ import annotations

import hashlib
import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .constructions import (boolean_poset, bnk, bnk_hat, bnkt, deleted_join, deleted_product,
                            diagram_dn, verify_dlim_dn, verify_quotient_fibers)
from .delta import verify_dnt, verify_main_theorem_internal
from .diagrams import random_diagram, verify_subdivision_invariance
from .homology import HomologyResult, homology_of_poset
from .nakaoka import predicted_homology, sym_homology_dim
from .poset import Poset, reduced_euler
from .shelling import el_label_bnkt, falling_chains, verify_el

DEFAULT_MAX_FACES = 5_000_000
CACHE_ENV = "DELJOIN_CACHE_DIR"


class ResourceLimit(RuntimeError):
    pass


@dataclass
class Check:
    name: str
    status: str                 # "pass", "fail" or "skip"
    expected: Any = None
    computed: Any = None
    note: str = ""


@dataclass
class VerificationReport:
    suite: str
    params: dict
    checks: list[Check] = field(default_factory=list)
    wall: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def counts(self) -> dict[str, int]:
        out = {"pass": 0, "fail": 0, "skip": 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    def add(self, name: str, expected, computed, note: str = "") -> Check:
        c = Check(name, "pass" if expected == computed else "fail", expected, computed, note)
        self.checks.append(c)
        return c

    def skip(self, name: str, note: str) -> None:
        self.checks.append(Check(name, "skip", note=note))

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)

    def to_dict(self, timing: bool = True) -> dict:
        d = {"suite": self.suite, "params": self.params,
             "checks": [asdict(c) for c in self.checks], "ok": self.ok}
        if timing:
            d["wall"] = round(self.wall, 3)
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True, default=str)

    def to_tsv(self) -> str:
        lines = ["name\tstatus\texpected\tcomputed\tnote"]
        for c in self.checks:
            lines.append(f"{c.name}\t{c.status}\t{_fmt(c.expected)}\t{_fmt(c.computed)}\t{c.note}")
        return "\n".join(lines)

    def to_table(self) -> str:
        rows = [(c.status.upper(), c.name, _fmt(c.expected), _fmt(c.computed), c.note) for c in self.checks]
        head = ("STATUS", "CHECK", "EXPECTED", "COMPUTED", "NOTE")
        widths = [max(len(r[i]) for r in rows + [head]) for i in range(5)]
        fmt = lambda r: "  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip()
        c = self.counts()
        out = [f"{self.suite} {self.params}", fmt(head)] + [fmt(r) for r in rows]
        out.append(f"{c['pass']} pass, {c['fail']} fail, {c['skip']} skip ({self.wall:.2f}s)")
        return "\n".join(out)


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


# -- cache -----------------------------------------------------------------------------

class Cache:
    """Content-addressed JSON store keyed by (operation, parameters, version)."""

    def __init__(self, root: str | os.PathLike | None):
        self.root = Path(root) if root else None
        if self.root:
            self.root.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def default_dir() -> str | None:
        return os.environ.get(CACHE_ENV)

    @staticmethod
    def key(op: str, params: dict) -> str:
        blob = json.dumps({"op": op, "params": params, "version": __version__}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def path(self, op: str, params: dict) -> Path:
        return self.root / f"{self.key(op, params)}.json"

    def get(self, op: str, params: dict):
        if not self.root:
            return None
        path = self.path(op, params)
        if not path.exists():
            return None
        return json.loads(path.read_text())["value"]

    def put(self, op: str, params: dict, value) -> None:
        if not self.root:
            return
        entry = {"op": op, "params": params, "version": __version__, "value": value}
        tmp = self.path(op, params).with_suffix(".tmp")
        tmp.write_text(json.dumps(entry, sort_keys=True))
        tmp.replace(self.path(op, params))

    def entries(self) -> list[dict]:
        if not self.root:
            return []
        return [json.loads(p.read_text()) for p in sorted(self.root.glob("*.json"))]

    def audit(self, fraction: float = 0.1, seed: int = 0) -> list[tuple[dict, bool]]:
        """Recompute a random sample of entries and compare with the stored values."""
        entries = [e for e in self.entries() if e["version"] == __version__ and e["op"] in OPS]
        if not entries:
            return []
        rng = random.Random(seed)
        sample = rng.sample(entries, max(1, round(fraction * len(entries))))
        return [(e, OPS[e["op"]](e["params"]) == e["value"]) for e in sample]


CONSTRUCTIONS: dict[str, Callable[..., Poset]] = {
    "bool": lambda n, k=None, t=None: boolean_poset(n),
    "djoin": lambda n, k, t=None: deleted_join(boolean_poset(n), k),
    "dprod": lambda n, k, t=None: deleted_product(boolean_poset(n), k),
    "bnk": lambda n, k, t=None: bnk(n, k),
    "bnkhat": lambda n, k, t=None: bnk_hat(n, k),
    "bnkt": lambda n, k, t: bnkt(n, k, t),
}


def construct(name: str, n: int, k: int | None = None, t: int | None = None) -> Poset:
    if name not in CONSTRUCTIONS:
        raise ValueError(f"unknown construction {name!r}")
    return CONSTRUCTIONS[name](n, k, t)


def face_count(P: Poset) -> int:
    return sum(P.chain_counts())


def guarded_homology(P: Poset, p: int | None, max_faces: int = DEFAULT_MAX_FACES) -> HomologyResult:
    faces = face_count(P)
    if faces > max_faces:
        raise ResourceLimit(f"{faces} faces exceeds the cap of {max_faces}")
    return homology_of_poset(P, p)


def _op_poset_homology(params: dict) -> dict:
    P = construct(params["construction"], params["n"], params.get("k"), params.get("t"))
    P = select_part(P, params.get("part", "nobottom"))
    return guarded_homology(P, params.get("p"), params.get("max_faces", DEFAULT_MAX_FACES)).to_dict()


def select_part(P: Poset, part: str) -> Poset:
    """``whole``, ``nobottom`` (drop a unique minimum) or ``proper`` (drop both bounds)."""
    if part == "whole":
        return P
    if part == "nobottom":
        return P.without(P.bottom) if P.bottom is not None else P
    if part == "proper":
        return P.proper_part()
    raise ValueError(f"unknown part {part!r}")


OPS: dict[str, Callable[[dict], Any]] = {"poset_homology": _op_poset_homology}


def cached_poset_homology(cache: Cache | None, construction: str, n: int, k=None, t=None,
                          p: int | None = None, part: str = "nobottom",
                          max_faces: int = DEFAULT_MAX_FACES) -> HomologyResult:
    params = {"construction": construction, "n": n, "k": k, "t": t, "p": p, "part": part}
    if cache is not None:
        hit = cache.get("poset_homology", params)
        if hit is not None:
            return HomologyResult.from_dict(hit)
    value = _op_poset_homology(dict(params, max_faces=max_faces))
    if cache is not None:
        cache.put("poset_homology", params, value)
    return HomologyResult.from_dict(value)


# -- suites ------------------------------------------------------------------------------

def _concentration(h: HomologyResult, degree: int) -> dict:
    return {"degrees": sorted(h.concentrated_in()), "free": h.is_free(), "expected_degree": degree}


def _concentrated_ok(h: HomologyResult, degree: int) -> bool:
    return h.is_free() and h.concentrated_in() <= {degree}


def cmd_verify_pmain(p: int, k: int, n: int, cache: Cache | None = None,
                     max_faces: int = DEFAULT_MAX_FACES, parts: str = "abcde") -> VerificationReport:
    """Finite-n checks of the homology of B_{n,k} and its relatives."""
    rep = VerificationReport("pmain", {"p": p, "k": k, "n": n})
    t0 = time.perf_counter()
    try:
        if "b" in parts or "c" in parts:
            h = cached_poset_homology(cache, "bnk", n, k, p=p, max_faces=max_faces)
            for q in range(0, n - 1):
                rep.add(f"H_{q}(B_{n},{k} minus bottom; F_{p})", predicted_homology(p, k, q), h.rank(q))
        if "a" in parts:
            h = cached_poset_homology(cache, "djoin", n, k, max_faces=max_faces)
            rep.add(f"B_{n}^[{k}] minus bottom: free, degree {n - 1}", True, _concentrated_ok(h, n - 1),
                    h.describe())
        if "d" in parts:
            h = cached_poset_homology(cache, "dprod", n, k, part="whole", max_faces=max_faces)
            d = max(n - k, -1)
            rep.add(f"hat B_{n}^[{k}]: free, degree {d}", True, _concentrated_ok(h, d), h.describe())
        if "e" in parts:
            h = cached_poset_homology(cache, "bnkhat", n, k, p=p, part="whole", max_faces=max_faces)
            for q in range(0, n - k):
                expected = sym_homology_dim(p, k, q) - (1 if q == 0 else 0)
                rep.add(f"H_{q}(hat B_{n},{k}; F_{p})", expected, h.rank(q))
    except ResourceLimit as exc:
        rep.skip("resource guard", str(exc))
    rep.wall = time.perf_counter() - t0
    return rep


def cmd_verify_stability(k: int, n: int, cache: Cache | None = None,
                         max_faces: int = DEFAULT_MAX_FACES) -> VerificationReport:
    """Integral homology of B_{n,k} agrees with B_{n+1,k} below degree n-1, and
    the degree n-1 group is free of rank fixed by the Euler characteristic."""
    rep = VerificationReport("stability", {"k": k, "n": n})
    t0 = time.perf_counter()
    try:
        a = cached_poset_homology(cache, "bnk", n, k, max_faces=max_faces)
        b = cached_poset_homology(cache, "bnk", n + 1, k, max_faces=max_faces)
        for i in range(0, n - 1):
            rep.add(f"H_{i}: n={n} vs n={n + 1}", (b.rank(i), b.torsion_at(i)), (a.rank(i), a.torsion_at(i)))
        P = select_part(bnk(n, k), "nobottom")
        chi = reduced_euler(P)
        lower = sum((-1) ** i * a.rank(i) for i in range(0, n - 1))
        mu = (-1) ** (n - 1) * (chi - lower)
        rep.add(f"H_{n - 1} free of rank from Euler characteristic", (mu, []), (a.rank(n - 1), a.torsion_at(n - 1)))
        rep.add("nothing above degree n-1", [], sorted(q for q in a.concentrated_in() if q > n - 1))
    except ResourceLimit as exc:
        rep.skip("resource guard", str(exc))
    rep.wall = time.perf_counter() - t0
    return rep


def suite_dnt(n_max: int = 4) -> VerificationReport:
    rep = VerificationReport("dnt", {"n_max": n_max})
    t0 = time.perf_counter()
    for c in verify_dnt(n_max, None):
        rep.add(f"shape {c.spec}", c.expected.to_dict(), c.result.to_dict())
    rep.wall = time.perf_counter() - t0
    return rep


def suite_main(p: int, n: int, q_max: int = 6) -> VerificationReport:
    rep = VerificationReport("main-internal", {"p": p, "n": n, "q_max": q_max})
    t0 = time.perf_counter()
    for c in verify_main_theorem_internal(p, n, q_max):
        rep.add(f"H_{c.q}(Delta_{n}; F_{p})", c.predicted, c.computed)
    rep.wall = time.perf_counter() - t0
    return rep


def suite_el(n: int, k: int, t: int) -> VerificationReport:
    rep = VerificationReport("shelling", {"n": n, "k": k, "t": t})
    t0 = time.perf_counter()
    lab = el_label_bnkt(n, k, t)
    r = verify_el(lab)
    rep.add("EL labeling", [], [list(map(str, v)) for v in r.violations], f"{r.intervals} intervals")
    falls = sum(falling_chains(lab).values())
    P = select_part(bnkt(n, k, t), "nobottom")
    rep.add("falling chains = |reduced Euler|", abs(reduced_euler(P)), falls)
    h = homology_of_poset(P)
    top = max(h.concentrated_in(), default=None)
    rep.add("falling chains = top Betti", falls, h.rank(top) if top is not None else 0)
    rep.wall = time.perf_counter() - t0
    return rep


def suite_subdivision(m: int, n: int) -> VerificationReport:
    rep = VerificationReport("subdivision", {"m": m, "n": n})
    t0 = time.perf_counter()
    r = verify_subdivision_invariance(diagram_dn(boolean_poset(m), n))
    rep.add("dlim D vs dlim Bd D", r.direct.to_dict(), r.subdivided.to_dict())
    rep.wall = time.perf_counter() - t0
    return rep


def suite_random_diagrams(seeds: int = 50) -> VerificationReport:
    rep = VerificationReport("random-diagrams", {"seeds": seeds})
    t0 = time.perf_counter()
    for s in range(seeds):
        r = verify_subdivision_invariance(random_diagram(s))
        rep.add(f"seed {s}", r.direct.to_dict(), r.subdivided.to_dict())
    rep.wall = time.perf_counter() - t0
    return rep


def suite_dlim(m: int, n: int) -> VerificationReport:
    rep = VerificationReport("dlim", {"m": m, "n": n})
    t0 = time.perf_counter()
    P = boolean_poset(m)
    d = verify_dlim_dn(P, n)
    rep.add("dlim D_n = P^[n] minus bottom", True, d.ok, f"{d.size_limit} elements")
    for c in verify_quotient_fibers(P, n):
        rep.add(f"quotient fibre {c.sizes}", True, c.ok)
    rep.wall = time.perf_counter() - t0
    return rep


def default_items() -> list[tuple[str, tuple]]:
    items: list[tuple[str, tuple]] = [("dnt", (4,))]
    items += [("main", (p, n, 6)) for p in (2, 3) for n in range(1, 5)]
    items += [("pmain", (p, k, n)) for p in (2, 3) for k in (1, 2, 3) for n in range(k + 1, 6)]
    items += [("el", (n, k, t)) for n in range(1, 5) for k in range(1, 4) for t in range(1, k + 1)]
    items += [("subdivision", (m, n)) for m in range(1, 4) for n in range(1, 4)]
    items += [("random", (50,))]
    items += [("dlim", (m, n)) for m in range(1, 4) for n in range(1, 4)]
    return items


SUITES: dict[str, Callable[..., VerificationReport]] = {
    "dnt": suite_dnt,
    "main": suite_main,
    "pmain": cmd_verify_pmain,
    "el": suite_el,
    "subdivision": suite_subdivision,
    "random": suite_random_diagrams,
    "dlim": suite_dlim,
}


def _run_item(item: tuple[str, tuple], deadline: float | None, fault: bool) -> VerificationReport:
    name, args = item
    if deadline is not None and time.time() >= deadline:
        rep = VerificationReport(name, {"args": list(args)})
        rep.skip(name, "over budget")
    else:
        rep = SUITES[name](*args)
        rep.params = {"args": list(args)}
    if fault:
        rep.add("injected fault", 0, 1)
    return rep


def cmd_verify_all(budget: float | None = None, threads: int = 1, inject_fault: bool = False,
                   items: list[tuple[str, tuple]] | None = None) -> VerificationReport:
    """Run every suite in a fixed order, skipping whatever starts past the budget."""
    items = default_items() if items is None else items
    t0 = time.perf_counter()
    deadline = None if budget is None else time.time() + budget
    faults = [inject_fault and i == 0 for i in range(len(items))]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(_run_item, items, [deadline] * len(items), faults))
    else:
        reports = [_run_item(it, deadline, f) for it, f in zip(items, faults)]
    out = VerificationReport("all", {"budget": budget})
    for (name, args), r in zip(items, reports):
        for c in r.checks:
            c.name = f"{name}{tuple(args)}: {c.name}"
        out.extend(r)
    out.wall = time.perf_counter() - t0
    return out
