"""Generators and oracles for empirical verification.

The centerpiece is a type-directed generator of closed boolean programs:
every emitted term is pushed through the checker at ``bool`` in the empty
contexts, so the checker itself is the well-formedness oracle.  Generation
is template-based rather than generate-and-filter, because well-typed
cubical terms are vanishingly rare under blind generation; each template
is built so its seams (tube faces, abstraction boundaries) hold by
construction.  Off-face tubes are deliberately filled with arbitrary
subterms now and then: their face constraint is absurd, so anything
scope-correct must be accepted there.

``closure_oracle`` is an independent fixed-point implementation of the
dimension equality judgment (reflexivity, symmetry, transitivity, and the
assumption rule), used to cross-check the union-find solver exhaustively
on small cubes.

``run_canonicity`` normalizes a corpus and demands every normal form be
literally ``tt`` or ``ff``; any other outcome is a kernel bug and the
report prints the culprit verbatim.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import surface as S
from .diagnostics import Span, XttError
from .domain import VBool
from .naive import NaiveStuck, whnf_bool
from .semantics import normalize
from .surface import print_term
from .syntax import (
    Bool, Cube, CubeDim, CubeEq, Dim, DimConst, DimVar, FF, Telescope, Term,
    TT, alpha_eq,
)
from .typecheck import Checker

__all__ = [
    "GenConfig", "gen_closed_bool", "closure_oracle", "ClosureRelation",
    "run_canonicity", "CanonicityReport", "differential_check",
    "save_corpus", "all_small_cubes", "gen_proof_pairs",
]

_SP = Span("<gen>", 1, 1, 1, 1)

DEFAULT_WEIGHTS: Dict[str, float] = {
    "lit": 1.0,
    "ifte": 2.0,
    "beta": 2.0,
    "proj": 2.0,
    "papp": 2.0,
    "coe_bool": 1.5,
    "coe_line": 1.0,
    "hcom_const": 2.0,
    "hcom_open": 2.0,
    "hcom_univ": 1.0,
    "sym": 1.0,
    "trans": 1.0,
    "jreg": 1.0,
}


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 4
    weights: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    count: int = 100


class GenerationError(Exception):
    pass


# ---------------------------------------------------------------------------
# Surface-building helpers (all spans are synthetic)
# ---------------------------------------------------------------------------

def _v(n):
    return S.SVar(n, _SP)


def _tt():
    return S.STrue(_SP)


def _ff():
    return S.SFalse(_SP)


def _bool():
    return S.SBool(_SP)


def _d(e):
    return S.SDim(None, e, _SP) if isinstance(e, int) else S.SDim(e, None, _SP)


def _ifte(c, a, b):
    return S.SIf("m", _bool(), c, a, b, _SP)


def _dlam(i, body):
    return S.SDimLam(i, body, _SP)


def _papp(f, d):
    return S.SPApp(f, _d(d), _SP)


def _hcom(ty, r, s, cap, sys, j0, t0, j1, t1):
    return S.SHCom(ty, _d(r), _d(s), cap, _d(sys), j0, t0, j1, t1, _SP)


# ---------------------------------------------------------------------------
# The closed-boolean program generator
# ---------------------------------------------------------------------------

class _Gen:
    def __init__(self, rng: random.Random, weights: Dict[str, float]):
        self.rng = rng
        self.items = [(k, w) for k, w in weights.items() if w > 0]
        if not self.items:
            raise GenerationError("all generator weights are zero")

    def pick(self, depth: int) -> str:
        if depth <= 0:
            return "lit"
        keys = [k for k, _ in self.items]
        ws = [w for _, w in self.items]
        return self.rng.choices(keys, weights=ws, k=1)[0]

    def boolean(self, depth: int) -> S.SurfaceTerm:
        kind = self.pick(depth)
        return getattr(self, "t_" + kind)(depth - 1)

    # -- leaf and control templates -----------------------------------------

    def t_lit(self, depth: int):
        return _tt() if self.rng.random() < 0.5 else _ff()

    def t_ifte(self, depth: int):
        return _ifte(self.boolean(depth), self.boolean(depth),
                     self.boolean(depth))

    def t_beta(self, depth: int):
        # app (x : bool . bool) (fun x => ...) arg, keeping a real redex
        body_kind = self.rng.randrange(3)
        if body_kind == 0:
            body = _v("x")
        elif body_kind == 1:
            body = self.boolean(depth)
        else:
            body = _ifte(_v("x"), self.boolean(depth), _v("x"))
        return S.SAnnApp("x", _bool(), _bool(), S.SLam("x", body, _SP),
                         self.boolean(depth), _SP)

    def t_proj(self, depth: int):
        p = S.SPair(self.boolean(depth), self.boolean(depth), _SP)
        if self.rng.random() < 0.5:
            return S.SFst(p, _SP)
        return S.SSnd(p, _SP)

    # -- dimension application ------------------------------------------------

    def t_papp(self, depth: int):
        return _papp(_dlam("i", self.boolean(depth)), self.rng.randrange(2))

    # -- Kan operation templates ----------------------------------------------

    def t_coe_bool(self, depth: int):
        r = self.rng.randrange(2)
        s = self.rng.randrange(2)
        return S.SCoe("i", _bool(), _d(r), _d(s), self.boolean(depth), _SP)

    def t_coe_line(self, depth: int):
        # Coerce an equality proof along a line of equality types whose
        # endpoints are beta-disguised copies, then apply it.
        b = self.boolean(depth)
        end = _papp(_dlam("k", b), "i")  # reduces to b; mentions i
        line = S.SEq("_", _bool(), end, end, _SP)
        proof = _dlam("_", b)
        out = S.SCoe("i", line, _d(0), _d(1), proof, _SP)
        return _papp(out, self.rng.randrange(2))

    def t_hcom_const(self, depth: int):
        cap = self.boolean(depth)
        sys = self.rng.randrange(2)
        r, s = self.rng.choice([(0, 1), (1, 0), (0, 0), (1, 1)])
        on_face = _papp(_dlam("_", cap), "j") if self.rng.random() < 0.5 \
            else cap
        junk = self.boolean(depth)  # face is absurd: must be accepted anyway
        t0, t1 = (on_face, junk) if sys == 0 else (junk, on_face)
        return _hcom(_bool(), r, s, cap, sys, "j", t0, "j", t1)

    def t_hcom_open(self, depth: int):
        cap = self.boolean(depth)
        tube = _papp(_dlam("_", cap), "j") if self.rng.random() < 0.5 else cap
        inner = _hcom(_bool(), 0, 1, cap, "i", "j", tube, "j", tube)
        return _papp(_dlam("i", inner), self.rng.randrange(2))

    def t_hcom_univ(self, depth: int):
        # A composite type with boolean cap and tubes; checking the body
        # forces the type-level composition down to bool.
        hu = _hcom(S.SUniv(0, _SP), 0, 1, _bool(), "i", "j", _bool(),
                   "j", _bool())
        fn = S.SAnnApp("x", hu, _bool(), S.SLam("x", _v("x"), _SP),
                       self.boolean(depth), _SP)
        return _papp(_dlam("i", fn), self.rng.randrange(2))

    def t_sym(self, depth: int):
        b = self.boolean(depth)
        p = _dlam("_", b)
        body = _hcom(_bool(), 0, 1, _papp(p, 0), "i",
                     "j", _papp(p, "j"), "j", _papp(p, 0))
        return _papp(_dlam("i", body), self.rng.randrange(2))

    def t_trans(self, depth: int):
        b = self.boolean(depth)
        p = _dlam("_", b)
        body = _hcom(_bool(), 0, 1, _papp(p, "i"), "i",
                     "j", _papp(p, 0), "j", _papp(p, "j"))
        return _papp(_dlam("i", body), self.rng.randrange(2))

    def t_jreg(self, depth: int):
        # The shape that makes J compute on reflexivity: a coercion whose
        # line only looks dimension-dependent until its composite reduces.
        scrut = _hcom(_bool(), 0, 1, _tt(), "i", "j", _tt(), "j", _tt())
        line = S.SIf("m", S.SUniv(1, _SP), scrut, _bool(), _bool(), _SP)
        return S.SCoe("i", line, _d(0), _d(1), self.boolean(depth), _SP)


def gen_closed_bool(cfg: GenConfig,
                    checker: Optional[Checker] = None) -> List[Term]:
    """Generate ``cfg.count`` core terms, each checked at bool in (. | .)."""
    rng = random.Random(cfg.seed)
    gen = _Gen(rng, cfg.weights)
    checker = checker or Checker()
    sc = checker.empty_scope()
    out: List[Term] = []
    for index in range(cfg.count):
        for attempt in range(20):
            candidate = gen.boolean(cfg.max_depth)
            try:
                core = checker.check(candidate, VBool(), sc)
            except (XttError, RecursionError):
                continue
            out.append(core)
            break
        else:
            raise GenerationError(
                f"no well-typed candidate after 20 attempts at index {index}")
    return out


# ---------------------------------------------------------------------------
# Brute-force dimension closure
# ---------------------------------------------------------------------------

def _node(d: Dim):
    if isinstance(d, DimConst):
        return ("c", d.eps)
    return ("v", d.level)


@dataclass(frozen=True)
class ClosureRelation:
    pairs: frozenset

    def related(self, r: Dim, s: Dim) -> bool:
        if self.inconsistent():
            return True
        return (_node(r), _node(s)) in self.pairs

    def inconsistent(self) -> bool:
        return (("c", 0), ("c", 1)) in self.pairs


def closure_oracle(psi: Cube) -> ClosureRelation:
    """Least equivalence relation containing the cube's constraints,
    computed by naive fixed-point iteration of the four rules."""
    nodes = [("c", 0), ("c", 1)] + [("v", k) for k in range(psi.num_dims)]
    rel = {(a, a) for a in nodes}  # reflexivity
    for c in psi.constraints():
        rel.add((_node(c.lhs), _node(c.rhs)))  # hypothesis
    changed = True
    while changed:
        changed = False
        for (a, b) in list(rel):
            if (b, a) not in rel:  # symmetry
                rel.add((b, a))
                changed = True
        for (a, b) in list(rel):
            for (b2, c) in list(rel):
                if b == b2 and (a, c) not in rel:  # transitivity
                    rel.add((a, c))
                    changed = True
    return ClosureRelation(frozenset(rel))


def all_small_cubes(max_dims: int = 3, max_constraints: int = 4):
    """Every cube with at most ``max_dims`` binders and constraint sets of
    size at most ``max_constraints`` drawn from the dimension pairs in
    scope (binders first, then constraints)."""
    for n in range(max_dims + 1):
        dims = [DimConst(0), DimConst(1)] + [DimVar(k) for k in range(n)]
        pairs = [(a, b) for a in dims for b in dims]
        base = tuple(CubeDim() for _ in range(n))
        for size in range(max_constraints + 1):
            for combo in itertools.combinations(range(len(pairs)), size):
                entries = base + tuple(CubeEq(*pairs[i]) for i in combo)
                yield Cube(entries)


# ---------------------------------------------------------------------------
# Canonicity and differential runs
# ---------------------------------------------------------------------------

@dataclass
class CanonicityReport:
    total: int
    checked: int
    passed: int
    failures: List[dict]
    elapsed: float
    partial: bool

    @property
    def ok(self) -> bool:
        return not self.failures and not self.partial \
            and self.checked == self.total

    def to_json(self) -> dict:
        return {"v": 1, "total": self.total, "checked": self.checked,
                "passed": self.passed, "failures": self.failures,
                "elapsedSeconds": round(self.elapsed, 3),
                "partial": self.partial, "ok": self.ok}

    def to_text(self) -> str:
        lines = [f"canonicity: {self.passed}/{self.checked} canonical "
                 f"(of {self.total} terms) in {self.elapsed:.2f}s"]
        if self.partial:
            lines.append("WARNING: budget exceeded; partial run")
        for f in self.failures:
            lines.append(f"NON-CANONICAL #{f['index']}: {f['term']}")
            lines.append(f"  normal form: {f['normal_form']}")
        lines.append("PASS" if self.ok else "FAIL")
        return "\n".join(lines)


def run_canonicity(corpus: List[Term], budget: Optional[float] = None,
                   defs: Optional[dict] = None) -> CanonicityReport:
    """Normalize each closed boolean term; every result must be tt or ff."""
    start = time.monotonic()
    failures: List[dict] = []
    passed = 0
    checked = 0
    for index, t in enumerate(corpus):
        if budget is not None and time.monotonic() - start > budget:
            return CanonicityReport(len(corpus), checked, passed, failures,
                                    time.monotonic() - start, True)
        nf = normalize(t, Cube(), Telescope(), Bool(), defs=defs)
        checked += 1
        if isinstance(nf, (TT, FF)):
            passed += 1
        else:
            failures.append({
                "index": index,
                "term": print_term(t),
                "normal_form": print_term(nf),
            })
    return CanonicityReport(len(corpus), checked, passed, failures,
                            time.monotonic() - start, False)


def differential_check(corpus: List[Term],
                       defs: Optional[dict] = None) -> List[dict]:
    """Disagreements between NbE and the naive closed-cube evaluator."""
    bad = []
    naive_defs = {k: v for k, v in (defs or {}).items()}
    for index, t in enumerate(corpus):
        nf = normalize(t, Cube(), Telescope(), Bool(), defs=defs)
        try:
            ref = whnf_bool(t, naive_defs)
        except NaiveStuck as e:
            bad.append({"index": index, "term": print_term(t),
                        "error": f"naive evaluator stuck: {e}"})
            continue
        if not alpha_eq(nf, ref):
            bad.append({"index": index, "term": print_term(t),
                        "nbe": print_term(nf), "naive": print_term(ref)})
    return bad


# ---------------------------------------------------------------------------
# Proof pairs for the unicity property
# ---------------------------------------------------------------------------

def gen_proof_pairs(count: int = 100, seed: int = 7):
    """Pairs of distinct closed proofs of one equality type, with the type.

    Shapes: plain reflexivity, symmetry and transitivity composites,
    coercion fillers, and constant-tube composites.  Returns a list of
    (surface P, surface Q, surface Eq-type) triples.
    """
    rng = random.Random(seed)
    triples = []

    def shapes(b):
        p = _dlam("_", b)
        sym = _dlam("i", _hcom(_bool(), 0, 1, _papp(p, 0), "i",
                               "j", _papp(p, "j"), "j", _papp(p, 0)))
        trans = _dlam("i", _hcom(_bool(), 0, 1, _papp(p, "i"), "i",
                                 "j", _papp(p, 0), "j", _papp(p, "j")))
        filler = _dlam("j", S.SCoe("k", _bool(), _d(0), _d("j"), b, _SP))
        const_comp = _dlam("i", _hcom(_bool(), 0, 1, b, "i",
                                      "j", b, "j", b))
        return [p, sym, trans, filler, const_comp]

    while len(triples) < count:
        b = _tt() if rng.random() < 0.5 else _ff()
        ty = S.SEq("_", _bool(), b, b, _SP)
        pool = shapes(b)
        i = rng.randrange(len(pool))
        j = rng.randrange(len(pool))
        if i == j:
            continue
        triples.append((pool[i], pool[j], ty))
    return triples


# ---------------------------------------------------------------------------
# Corpus serialization
# ---------------------------------------------------------------------------

def save_corpus(directory, corpus: List[Term], cfg: GenConfig) -> None:
    """One .xtt definition file per term plus a JSON-lines manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "manifest.jsonl", "w", encoding="utf-8") as mf:
        for index, t in enumerate(corpus):
            name = f"{index:04d}.xtt"
            text = f"def t{index} : bool = {print_term(t)}\n"
            (directory / name).write_text(text, encoding="utf-8")
            mf.write(json.dumps({
                "v": 1, "seed": cfg.seed, "index": index,
                "depth": cfg.max_depth, "file": name, "check": "ok",
            }) + "\n")
