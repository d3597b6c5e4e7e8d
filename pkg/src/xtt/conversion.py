"""Typed definitional equality.

Three features distinguish this checker from a vanilla NbE conversion:

* Proof unicity: any two values compared at an equality type are equal,
  immediately.  (Splitting on the line's dimension would rediscover this
  every time; accepting at the type is the derived rule, made primitive
  in the algorithm.)

* Collapse: under an inconsistent constraint set every query is true.

* Boundary separation: when structural comparison fails and a free
  dimension occurs in either normal form, the checker retries under the
  two endpoint constraints of that dimension, succeeding if both succeed.
  The number of nested splits is bounded by ``split_depth``; completeness
  of any bound is an open question, so failures that might succeed at a
  higher depth are *reported* by the bound, never silently ignored.

Comparison is type-directed; untyped comparison would be unsound here
because the endpoint law and proof unicity are not syntax-directed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .dims import decide_eq
from .domain import (
    DimCloFn, NApp, NCoe, NFst, NHCom, NIf, NPApp, NSnd, NTypeCase, NVar,
    TmCloFn, Value, VBool, VEq, VFalse, VNeutral, VPi, VSg, VTrue, VUniv,
)
from .semantics import (
    Ctx, RbEnv, apply_dim, apply_n, apply_tm, do_app, do_fst, do_papp,
    do_snd, force, fresh_var, readback_tm, readback_ty, _fresh_probe,
)
from .syntax import DIM0, DIM1, DimConst, DimVar, free_dim_levels

__all__ = ["ConvConfig", "conv_ty", "conv_tm", "conv_neutral",
           "regularity_by_conversion"]


@dataclass(frozen=True)
class ConvConfig:
    split_depth: int = 2
    full_regularity: bool = False


# ---------------------------------------------------------------------------
# Boundary-separation fallback
# ---------------------------------------------------------------------------

def _split(retry, witnesses, ctx: Ctx, rb: RbEnv, budget: int) -> bool:
    """Retry the query under i=0 and i=1 for each free dimension i."""
    if budget <= 0:
        return False
    levels: set = set()
    for t in witnesses:
        levels |= free_dim_levels(t, below=rb.dims)
    for lvl in sorted(levels):
        ok = True
        for eps in (0, 1):
            classes = ctx.classes.extended(DimVar(lvl), DimConst(eps))
            if not retry(ctx.with_classes(classes), budget - 1):
                ok = False
                break
        if ok:
            return True
    return False


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

def conv_ty(a: Value, b: Value, ctx: Ctx, rb: RbEnv, cfg: ConvConfig,
            budget: Optional[int] = None) -> bool:
    if budget is None:
        budget = cfg.split_depth
    if ctx.classes.inconsistent:
        return True
    a = force(a, ctx)
    b = force(b, ctx)
    if _conv_ty_structural(a, b, ctx, rb, cfg, budget):
        return True
    if budget > 0:
        wa = readback_ty(a, ctx, rb)
        wb = readback_ty(b, ctx, rb)
        return _split(lambda c, d: conv_ty(a, b, c, rb, cfg, d),
                      (wa, wb), ctx, rb, budget)
    return False


def _conv_ty_structural(a: Value, b: Value, ctx: Ctx, rb: RbEnv,
                        cfg: ConvConfig, budget: int) -> bool:
    if isinstance(a, VPi) and isinstance(b, VPi) or \
            isinstance(a, VSg) and isinstance(b, VSg):
        if not conv_ty(a.dom, b.dom, ctx, rb, cfg, budget):
            return False
        x = fresh_var(a.dom, rb.vars, ctx)
        return conv_ty(apply_tm(a.cod, x, ctx), apply_tm(b.cod, x, ctx),
                       ctx, rb.bind_var(), cfg, budget)
    if isinstance(a, VEq) and isinstance(b, VEq):
        d = DimVar(rb.dims)
        if not conv_ty(apply_dim(a.line, d, ctx), apply_dim(b.line, d, ctx),
                       ctx, rb.bind_dim(), cfg, budget):
            return False
        return (conv_tm(a.lhs, b.lhs, apply_dim(a.line, DIM0, ctx), ctx, rb,
                        cfg, budget)
                and conv_tm(a.rhs, b.rhs, apply_dim(a.line, DIM1, ctx), ctx,
                            rb, cfg, budget))
    if isinstance(a, VBool) and isinstance(b, VBool):
        return True
    if isinstance(a, VUniv) and isinstance(b, VUniv):
        return a.level == b.level
    if isinstance(a, VNeutral) and isinstance(b, VNeutral):
        return conv_neutral(a, b, ctx, rb, cfg, budget) is not None
    return False


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

def conv_tm(m: Value, n: Value, ty: Value, ctx: Ctx, rb: RbEnv,
            cfg: ConvConfig, budget: Optional[int] = None) -> bool:
    if budget is None:
        budget = cfg.split_depth
    if ctx.classes.inconsistent:
        return True
    ty = force(ty, ctx)
    if isinstance(ty, VEq):
        return True  # unicity of equality proofs
    if isinstance(ty, VPi):
        x = fresh_var(ty.dom, rb.vars, ctx)
        return conv_tm(do_app(m, x, ctx), do_app(n, x, ctx),
                       apply_tm(ty.cod, x, ctx), ctx, rb.bind_var(), cfg,
                       budget)
    if isinstance(ty, VSg):
        ma = do_fst(m, ctx)
        na = do_fst(n, ctx)
        if not conv_tm(ma, na, ty.dom, ctx, rb, cfg, budget):
            return False
        return conv_tm(do_snd(m, ctx), do_snd(n, ctx),
                       apply_tm(ty.cod, ma, ctx), ctx, rb, cfg, budget)
    if isinstance(ty, VUniv):
        return conv_ty(m, n, ctx, rb, cfg, budget)

    # Base or neutral type: weak-head compare, then the splitting fallback.
    m = force(m, ctx)
    n = force(n, ctx)
    if isinstance(m, VTrue) and isinstance(n, VTrue):
        return True
    if isinstance(m, VFalse) and isinstance(n, VFalse):
        return True
    if isinstance(m, VNeutral) and isinstance(n, VNeutral) \
            and conv_neutral(m, n, ctx, rb, cfg, budget) is not None:
        return True
    if budget > 0:
        wm = readback_tm(m, ty, ctx, rb)
        wn = readback_tm(n, ty, ctx, rb)
        return _split(lambda c, d: conv_tm(m, n, ty, c, rb, cfg, d),
                      (wm, wn), ctx, rb, budget)
    return False


# ---------------------------------------------------------------------------
# Neutrals
# ---------------------------------------------------------------------------

def conv_neutral(m: VNeutral, n: VNeutral, ctx: Ctx, rb: RbEnv,
                 cfg: ConvConfig, budget: int) -> Optional[Value]:
    """Compare heads and spines; on success return the common type."""
    a, b = m.ne, n.ne
    if type(a) is not type(b):
        return None

    if isinstance(a, NVar):
        return force(m.ty, ctx) if a.level == b.level else None

    if isinstance(a, NApp):
        t = conv_neutral(a.fn, b.fn, ctx, rb, cfg, budget)
        if t is None:
            return None
        t = force(t, ctx)
        if not conv_tm(a.arg, b.arg, t.dom, ctx, rb, cfg, budget):
            return None
        return apply_tm(t.cod, a.arg, ctx)

    if isinstance(a, (NFst, NSnd)):
        t = conv_neutral(a.pair, b.pair, ctx, rb, cfg, budget)
        if t is None:
            return None
        t = force(t, ctx)
        if isinstance(a, NFst):
            return t.dom
        return apply_tm(t.cod, do_fst(a.pair, ctx), ctx)

    if isinstance(a, NPApp):
        t = conv_neutral(a.fn, b.fn, ctx, rb, cfg, budget)
        if t is None:
            return None
        t = force(t, ctx)
        if not decide_eq(ctx.classes, a.dim, b.dim):
            return None
        return apply_dim(t.line, a.dim, ctx)

    if isinstance(a, NIf):
        if conv_neutral(a.scrut, b.scrut, ctx, rb, cfg, budget) is None:
            return None
        x = fresh_var(VBool(), rb.vars, ctx)
        if not conv_ty(apply_tm(a.motive, x, ctx), apply_tm(b.motive, x, ctx),
                       ctx, rb.bind_var(), cfg, budget):
            return None
        if not conv_tm(a.on_true, b.on_true, apply_tm(a.motive, VTrue(), ctx),
                       ctx, rb, cfg, budget):
            return None
        if not conv_tm(a.on_false, b.on_false,
                       apply_tm(a.motive, VFalse(), ctx), ctx, rb, cfg,
                       budget):
            return None
        return apply_tm(a.motive, a.scrut, ctx)

    if isinstance(a, NCoe):
        d = DimVar(rb.dims)
        if not conv_ty(apply_dim(a.line, d, ctx), apply_dim(b.line, d, ctx),
                       ctx, rb.bind_dim(), cfg, budget):
            return None
        if not (decide_eq(ctx.classes, a.src, b.src)
                and decide_eq(ctx.classes, a.dst, b.dst)):
            return None
        if not conv_tm(a.arg, b.arg, apply_dim(a.line, a.src, ctx), ctx, rb,
                       cfg, budget):
            return None
        return apply_dim(a.line, a.dst, ctx)

    if isinstance(a, NHCom):
        if not conv_ty(a.ty, b.ty, ctx, rb, cfg, budget):
            return None
        if not (decide_eq(ctx.classes, a.src, b.src)
                and decide_eq(ctx.classes, a.dst, b.dst)
                and decide_eq(ctx.classes, a.sys, b.sys)):
            return None
        if not conv_tm(a.cap, b.cap, a.ty, ctx, rb, cfg, budget):
            return None
        d = DimVar(rb.dims)
        for ta, tb in ((a.tube0, b.tube0), (a.tube1, b.tube1)):
            if not conv_tm(apply_dim(ta, d, ctx), apply_dim(tb, d, ctx),
                           a.ty, ctx, rb.bind_dim(), cfg, budget):
                return None
        return a.ty

    if isinstance(a, NTypeCase):
        if a.level != b.level:
            return None
        if not conv_ty(a.motive, b.motive, ctx, rb, cfg, budget):
            return None
        if conv_neutral(a.scrut, b.scrut, ctx, rb, cfg, budget) is None:
            return None
        u = VUniv(a.level)
        x = fresh_var(u, rb.vars, ctx)
        y = fresh_var(VPi(x, TmCloFn(lambda _v, _c: u)), rb.vars + 1, ctx)
        rb2 = rb.bind_var().bind_var()
        for ba, bb in ((a.on_pi, b.on_pi), (a.on_sg, b.on_sg)):
            if not conv_tm(apply_n(ba, [x, y], ctx), apply_n(bb, [x, y], ctx),
                           a.motive, ctx, rb2, cfg, budget):
                return None
        x0 = fresh_var(u, rb.vars, ctx)
        x1 = fresh_var(u, rb.vars + 1, ctx)
        xe = fresh_var(VEq(DimCloFn(lambda _d, _c: u), x0, x1), rb.vars + 2,
                       ctx)
        y0 = fresh_var(x0, rb.vars + 3, ctx)
        y1 = fresh_var(x1, rb.vars + 4, ctx)
        rb5 = rb
        for _ in range(5):
            rb5 = rb5.bind_var()
        args = [x0, x1, xe, y0, y1]
        if not conv_tm(apply_n(a.on_eq, args, ctx), apply_n(b.on_eq, args, ctx),
                       a.motive, ctx, rb5, cfg, budget):
            return None
        for ba, bb in ((a.on_bool, b.on_bool), (a.on_univ, b.on_univ)):
            if not conv_tm(apply_n(ba, [], ctx), apply_n(bb, [], ctx),
                           a.motive, ctx, rb, cfg, budget):
                return None
        return a.motive

    return None


# ---------------------------------------------------------------------------
# Conversion-based regularity (behind the --full-regularity flag)
# ---------------------------------------------------------------------------

def regularity_by_conversion(cfg: ConvConfig):
    """Line-constancy by comparing two fresh instantiations for equality.

    This implements the declarative premise of coercion regularity (the
    line agrees with itself at two fresh dimensions); inner probes fall
    back to the occurrence check to keep the search well-founded.
    """

    def hook(line, ctx: Ctx) -> bool:
        p = _fresh_probe()
        q = _fresh_probe()
        a = apply_dim(line, DimVar(p), ctx)
        b = apply_dim(line, DimVar(q), ctx)
        inner = Ctx(ctx.classes, ctx.defs, ctx.trace, None)
        base = max(p, q) + 1
        return conv_ty(a, b, inner, RbEnv(base, base), cfg)

    return hook
