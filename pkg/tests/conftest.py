"""Shared fixtures: the equality-combinator prelude and scope builders."""

from __future__ import annotations

import random

import pytest

from xtt.semantics import RbEnv
from xtt.surface import parse, parse_term
from xtt.syntax import (
    App, Bool, Coe, DimConst, DimLam, DimVar, Eq, FF, HCom, If, Lam, PApp,
    Pair, Pi, Sg, TT, Univ, Var,
)
from xtt.typecheck import Checker

PRELUDE = """
def funext (A : U 0) (B : A -> U 0)
           (f : (x : A) -> B x) (g : (x : A) -> B x)
           (h : (x : A) -> Eq (_ . B x) (f x) (g x))
  : Eq (_ . (x : A) -> B x) f g
  = <i> fun x => h x @ i

def sym (A : U 0) (M : A) (N : A) (P : Eq (_ . A) M N) : Eq (_ . A) N M
  = <i> hcom A 0 1 (P @ 0) [ i=0 => j . P @ j | i=1 => j . P @ 0 ]

def trans (A : U 0) (M : A) (N : A) (O : A)
          (P : Eq (_ . A) M N) (Q : Eq (_ . A) N O) : Eq (_ . A) M O
  = <i> hcom A 0 1 (P @ i) [ i=0 => j . P @ 0 | i=1 => j . Q @ j ]

def Id (A : U 0) (M : A) (N : A) : U 0 = Eq (_ . A) M N

def refl (A : U 0) (M : A) : Id A M M = <_> M

def J (A : U 0) (C : (x : A) -> (y : A) -> Id A x y -> U 0)
      (M : A) (N : A) (P : Id A M N)
      (Q : (x : A) -> C x x (refl A x))
  : C M N P
  = coe i . (C (P @ 0) (P @ i)
             (<j> hcom A 0 j (P @ 0) [ i=0 => k . P @ 0 | i=1 => k . P @ k ]))
        0 1 (Q (P @ 0))

def notb (b : bool) : bool = if (m . bool) b ff tt
"""


@pytest.fixture(scope="session")
def prelude() -> Checker:
    checker = Checker()
    checker.check_program(parse(PRELUDE, "prelude.xtt"))
    return checker


def make_scope(checker: Checker, dims=(), hyps=()):
    """Build an open scope: dims is a tuple of names, hyps of (name, src)."""
    sc = checker.empty_scope()
    for d in dims:
        sc = sc.bind_dim(d)
    for name, src in hyps:
        ty_core, _ = checker.check_type(parse_term(src), sc)
        sc = sc.bind_var(name, ty_core, checker._eval(ty_core, sc))
    return sc


def elab(checker: Checker, sc, src: str):
    """Infer a surface expression: (core term, type value)."""
    return checker.infer(parse_term(src), sc)


def elab_at(checker: Checker, sc, src: str, ty_src: str):
    """Check a surface expression at a surface type: (core, type value)."""
    ty_core, _ = checker.check_type(parse_term(ty_src), sc)
    ty_v = checker._eval(ty_core, sc)
    return checker.check(parse_term(src), ty_v, sc), ty_v


def conv_terms(checker: Checker, sc, a_src: str, b_src: str,
               ty_src: str) -> bool:
    """Elaborate both sides at the given type and compare values."""
    from xtt.conversion import conv_tm
    a_core, ty_v = elab_at(checker, sc, a_src, ty_src)
    b_core, _ = elab_at(checker, sc, b_src, ty_src)
    ctx = checker.ctx_for(sc.classes)
    return conv_tm(checker._eval(a_core, sc), checker._eval(b_core, sc),
                   ty_v, ctx, RbEnv(sc.n_dims, sc.n_vars), checker.cfg)


def conv_types(checker: Checker, sc, a_src: str, b_src: str) -> bool:
    from xtt.conversion import conv_ty
    a_core, _ = checker.check_type(parse_term(a_src), sc)
    b_core, _ = checker.check_type(parse_term(b_src), sc)
    ctx = checker.ctx_for(sc.classes)
    return conv_ty(checker._eval(a_core, sc), checker._eval(b_core, sc),
                   ctx, RbEnv(sc.n_dims, sc.n_vars), checker.cfg)


def normalize_src(checker: Checker, sc, src: str, ty_src=None) -> str:
    from xtt.surface import print_term
    if ty_src is None:
        core, ty_v = elab(checker, sc, src)
    else:
        core, ty_v = elab_at(checker, sc, src, ty_src)
    return print_term(checker.normalize_value(core, ty_v, sc),
                      sc.var_names, sc.dim_names, annotated=False)


def random_scoped_term(rng: random.Random, n_dims: int, n_vars: int,
                       depth: int):
    """A random well-scoped (not necessarily well-typed) core term.

    Used by the substitution-calculus property tests, which only require
    scope correctness.
    """
    def dim():
        pool = [DimConst(0), DimConst(1)]
        pool += [DimVar(k) for k in range(n_dims)]
        return rng.choice(pool)

    def go(nd, nv, d):
        leaves = [lambda: TT(), lambda: FF(), lambda: Bool(),
                  lambda: Univ(rng.randrange(2))]
        if nv:
            leaves.append(lambda: Var(rng.randrange(nv)))
        if d <= 0:
            return rng.choice(leaves)()
        def dim_in(ndd):
            pool = [DimConst(0), DimConst(1)]
            pool += [DimVar(k) for k in range(ndd)]
            return rng.choice(pool)
        branches = [
            lambda: Lam(go(nd, nv + 1, d - 1)),
            lambda: DimLam(go(nd + 1, nv, d - 1)),
            lambda: Pi(go(nd, nv, d - 1), go(nd, nv + 1, d - 1)),
            lambda: Sg(go(nd, nv, d - 1), go(nd, nv + 1, d - 1)),
            lambda: Eq(go(nd + 1, nv, d - 1), go(nd, nv, d - 1),
                       go(nd, nv, d - 1)),
            lambda: Pair(go(nd, nv, d - 1), go(nd, nv, d - 1)),
            lambda: App(go(nd, nv, d - 1), go(nd, nv + 1, d - 1),
                        go(nd, nv, d - 1), go(nd, nv, d - 1)),
            lambda: PApp(go(nd + 1, nv, d - 1), go(nd, nv, d - 1),
                         dim_in(nd)),
            lambda: If(go(nd, nv + 1, d - 1), go(nd, nv, d - 1),
                       go(nd, nv, d - 1), go(nd, nv, d - 1)),
            lambda: Coe(go(nd + 1, nv, d - 1), dim_in(nd), dim_in(nd),
                        go(nd, nv, d - 1)),
            lambda: HCom(go(nd, nv, d - 1), dim_in(nd), dim_in(nd),
                         go(nd, nv, d - 1), dim_in(nd),
                         go(nd + 1, nv, d - 1), go(nd + 1, nv, d - 1)),
            lambda: rng.choice(leaves)(),
        ]
        return rng.choice(branches)()

    return go(n_dims, n_vars, depth)
