"""Normalization by evaluation: evaluator, Kan operations, readback.

Reduction priority for coercion is adjacency, then regularity, then
dispatch on the head of the line's interior at a fresh dimension; for
composition it is adjacency, then the tube face, then tube-constancy
(the derived regularity of composites), then dispatch on the type.  The
equations all agree on well-typed terms, so the order is a cost choice.

The regularity test instantiates the line at a probe dimension, reads the
interior back, and checks the probe does not occur.  Probe levels come
from a global counter far above any real binder depth; probe results are
always discarded, so they never leak into output and determinism is
preserved.

``force`` re-normalizes a neutral whose cached constraint token is stale.
This only happens after conversion strengthens the constraint set while
case-splitting on a dimension boundary; under a fixed cube it is a no-op.

Tracing: when the context carries a trace list, each computation rule
appends its name as it fires.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

from .dims import DimClasses, build_classes, decide_eq
from .domain import (
    DimClo, DimCloFn, Env, KernelBug, NApp, NCoe, NFst, NHCom, NIf, NPApp,
    NSnd, NTypeCase, NVar, TmClo, TmCloFn, TmCloN, Value, VBool, VDimLam,
    VEq, VFalse, VLam, VNeutral, VPair, VPi, VSg, VTrue, VUniv,
)
from .syntax import (
    App, Bool, Coe, Cube, Def, Dim, DimConst, DimLam, DimVar, DIM0, DIM1,
    Eq, FF, Fst, HCom, If, Lam, Lift, Pair, PApp, Pi, Sg, Snd, Telescope,
    Term, TT, TypeCase, Univ, Var, occurs_dim,
)

__all__ = [
    "Ctx", "RbEnv", "eval_term", "eval_dim", "apply_tm", "apply_dim",
    "apply_n", "force", "do_app", "do_fst", "do_snd", "do_papp", "do_if",
    "do_coe", "do_hcom", "do_com", "do_typecase",
    "readback_tm", "readback_ty", "readback_ne", "normalize",
    "fresh_var", "identity_env",
]

# Probe dimensions/variables for under-binder inspection; far above any
# depth reachable by real binders.
_PROBE_BASE = 1 << 40
_probes = itertools.count(_PROBE_BASE)


def _fresh_probe() -> int:
    return next(_probes)


class Ctx:
    """Evaluation context: constraint classes, globals, optional tracing."""

    __slots__ = ("classes", "defs", "trace", "regularity_hook")

    def __init__(self, classes: DimClasses, defs: Optional[dict] = None,
                 trace: Optional[list] = None,
                 regularity_hook: Optional[Callable] = None):
        self.classes = classes
        self.defs = defs or {}
        self.trace = trace
        # When set, decides line-constancy by conversion under two fresh
        # dimensions instead of the readback occurrence check.
        self.regularity_hook = regularity_hook

    def emit(self, rule: str) -> None:
        if self.trace is not None:
            self.trace.append(rule)

    def with_classes(self, classes: DimClasses) -> "Ctx":
        return Ctx(classes, self.defs, self.trace, self.regularity_hook)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def eval_dim(d: Dim, env: Env) -> Dim:
    if isinstance(d, DimVar):
        return env.dim(d.level)
    return d


def eval_term(t: Term, env: Env, ctx: Ctx) -> Value:
    match t:
        case Var(index=i):
            return env.tm(i)
        case Def(name=name):
            return ctx.defs[name]
        case Pi(dom=dom, cod=cod):
            return VPi(eval_term(dom, env, ctx), TmClo(cod, env))
        case Sg(dom=dom, cod=cod):
            return VSg(eval_term(dom, env, ctx), TmClo(cod, env))
        case Eq(line=line, lhs=lhs, rhs=rhs):
            return VEq(DimClo(line, env), eval_term(lhs, env, ctx),
                       eval_term(rhs, env, ctx))
        case Bool():
            return VBool()
        case Univ(level=k):
            return VUniv(k)
        case Lift(body=body):
            return eval_term(body, env, ctx)  # lifts are erased
        case Lam(body=body):
            return VLam(TmClo(body, env))
        case App(fn=fn, arg=arg):
            return do_app(eval_term(fn, env, ctx), eval_term(arg, env, ctx), ctx)
        case Pair(fst=a, snd=b):
            return VPair(eval_term(a, env, ctx), eval_term(b, env, ctx))
        case Fst(pair=p):
            return do_fst(eval_term(p, env, ctx), ctx)
        case Snd(pair=p):
            return do_snd(eval_term(p, env, ctx), ctx)
        case DimLam(body=body):
            return VDimLam(DimClo(body, env))
        case PApp(fn=fn, dim=d):
            return do_papp(eval_term(fn, env, ctx), eval_dim(d, env), ctx)
        case TT():
            return VTrue()
        case FF():
            return VFalse()
        case If(motive=mot, scrut=sc, on_true=a, on_false=b):
            return do_if(TmClo(mot, env), eval_term(sc, env, ctx),
                         eval_term(a, env, ctx), eval_term(b, env, ctx), ctx)
        case Coe(line=line, src=r, dst=s, arg=m):
            return do_coe(DimClo(line, env), eval_dim(r, env), eval_dim(s, env),
                          eval_term(m, env, ctx), ctx)
        case HCom(ty=ty, src=r, dst=s, cap=cap, sys=sys, tube0=t0, tube1=t1):
            return do_hcom(eval_term(ty, env, ctx), eval_dim(r, env),
                           eval_dim(s, env), eval_term(cap, env, ctx),
                           eval_dim(sys, env), DimClo(t0, env), DimClo(t1, env),
                           ctx)
        case TypeCase(level=k, motive=mot, scrut=sc, on_pi=bpi, on_sg=bsg,
                      on_eq=beq, on_bool=bb, on_univ=bu):
            return do_typecase(k, eval_term(mot, env, ctx),
                               eval_term(sc, env, ctx),
                               TmCloN(bpi, env, 2), TmCloN(bsg, env, 2),
                               TmCloN(beq, env, 5), TmCloN(bb, env, 0),
                               TmCloN(bu, env, 0), ctx)
    raise KernelBug(f"eval: unhandled term {t!r}")


def apply_tm(clo, v: Value, ctx: Ctx) -> Value:
    if isinstance(clo, TmClo):
        return eval_term(clo.body, clo.env.bind_tm(v), ctx)
    if isinstance(clo, TmCloFn):
        return clo.fn(v, ctx)
    raise KernelBug(f"apply_tm: not a term closure: {clo!r}")


def apply_dim(clo, d: Dim, ctx: Ctx) -> Value:
    if isinstance(clo, DimClo):
        return eval_term(clo.body, clo.env.bind_dim(d), ctx)
    if isinstance(clo, DimCloFn):
        return clo.fn(d, ctx)
    raise KernelBug(f"apply_dim: not a dimension closure: {clo!r}")


def apply_n(clo: TmCloN, vs, ctx: Ctx) -> Value:
    if len(vs) != clo.arity:
        raise KernelBug(f"apply_n: arity {clo.arity} vs {len(vs)} args")
    env = clo.env
    for v in vs:
        env = env.bind_tm(v)
    return eval_term(clo.body, env, ctx)


# ---------------------------------------------------------------------------
# Forcing stale neutrals
# ---------------------------------------------------------------------------

def force(v: Value, ctx: Ctx) -> Value:
    """Re-normalize ``v``'s head against the current constraint classes."""
    while isinstance(v, VNeutral) and v.token != ctx.classes.token:
        ne = v.ne
        if isinstance(ne, NVar):
            return VNeutral(ne, v.ty, ctx.classes.token)
        v = _renormalize(ne, ctx)
    return v


def _renormalize(ne, ctx: Ctx) -> Value:
    if isinstance(ne, NApp):
        return do_app(ne.fn, ne.arg, ctx)
    if isinstance(ne, NFst):
        return do_fst(ne.pair, ctx)
    if isinstance(ne, NSnd):
        return do_snd(ne.pair, ctx)
    if isinstance(ne, NPApp):
        return do_papp(ne.fn, ne.dim, ctx)
    if isinstance(ne, NIf):
        return do_if(ne.motive, ne.scrut, ne.on_true, ne.on_false, ctx)
    if isinstance(ne, NCoe):
        return do_coe(ne.line, ne.src, ne.dst, ne.arg, ctx)
    if isinstance(ne, NHCom):
        return do_hcom(ne.ty, ne.src, ne.dst, ne.cap, ne.sys, ne.tube0,
                       ne.tube1, ctx)
    if isinstance(ne, NTypeCase):
        return do_typecase(ne.level, ne.motive, ne.scrut, ne.on_pi, ne.on_sg,
                           ne.on_eq, ne.on_bool, ne.on_univ, ctx)
    raise KernelBug(f"force: unknown neutral {ne!r}")


# ---------------------------------------------------------------------------
# Eliminators
# ---------------------------------------------------------------------------

def do_app(f: Value, a: Value, ctx: Ctx) -> Value:
    f = force(f, ctx)
    if isinstance(f, VLam):
        return apply_tm(f.clo, a, ctx)
    if isinstance(f, VNeutral):
        ty = force(f.ty, ctx)
        if not isinstance(ty, VPi):
            raise KernelBug("application head is not a function")
        return VNeutral(NApp(f, a), apply_tm(ty.cod, a, ctx), ctx.classes.token)
    raise KernelBug(f"do_app: not a function value: {f!r}")


def do_fst(p: Value, ctx: Ctx) -> Value:
    p = force(p, ctx)
    if isinstance(p, VPair):
        return p.fst
    if isinstance(p, VNeutral):
        ty = force(p.ty, ctx)
        if not isinstance(ty, VSg):
            raise KernelBug("projection from a non-pair")
        return VNeutral(NFst(p), ty.dom, ctx.classes.token)
    raise KernelBug(f"do_fst: not a pair value: {p!r}")


def do_snd(p: Value, ctx: Ctx) -> Value:
    p = force(p, ctx)
    if isinstance(p, VPair):
        return p.snd
    if isinstance(p, VNeutral):
        ty = force(p.ty, ctx)
        if not isinstance(ty, VSg):
            raise KernelBug("projection from a non-pair")
        return VNeutral(NSnd(p), apply_tm(ty.cod, do_fst(p, ctx), ctx),
                        ctx.classes.token)
    raise KernelBug(f"do_snd: not a pair value: {p!r}")


def do_papp(p: Value, r: Dim, ctx: Ctx) -> Value:
    p = force(p, ctx)
    if isinstance(p, VDimLam):
        ctx.emit("equality computation")
        return apply_dim(p.clo, r, ctx)
    if isinstance(p, VNeutral):
        ty = force(p.ty, ctx)
        if not isinstance(ty, VEq):
            raise KernelBug("dimension application at a non-equality type")
        eps = ctx.classes.const_of(r)
        if eps is not None:
            ctx.emit("equality boundary")
            return ty.lhs if eps == 0 else ty.rhs
        return VNeutral(NPApp(p, r), apply_dim(ty.line, r, ctx),
                        ctx.classes.token)
    raise KernelBug(f"do_papp: not an equality proof: {p!r}")


def do_if(motive, scrut: Value, on_true: Value, on_false: Value,
          ctx: Ctx) -> Value:
    scrut = force(scrut, ctx)
    if isinstance(scrut, VTrue):
        ctx.emit("boolean computation")
        return on_true
    if isinstance(scrut, VFalse):
        ctx.emit("boolean computation")
        return on_false
    if isinstance(scrut, VNeutral):
        return VNeutral(NIf(motive, scrut, on_true, on_false),
                        apply_tm(motive, scrut, ctx), ctx.classes.token)
    raise KernelBug(f"do_if: not a boolean value: {scrut!r}")


# ---------------------------------------------------------------------------
# Kan operations
# ---------------------------------------------------------------------------

def _line_constant(line, ctx: Ctx) -> bool:
    if ctx.regularity_hook is not None:
        return ctx.regularity_hook(line, ctx)
    p = _fresh_probe()
    interior = apply_dim(line, DimVar(p), ctx)
    t = readback_ty(interior, ctx, RbEnv(p + 1, p + 1))
    return not occurs_dim(t, p)


def _tube_constant(tube, ty: Value, ctx: Ctx) -> bool:
    p = _fresh_probe()
    face = apply_dim(tube, DimVar(p), ctx)
    t = readback_tm(face, ty, ctx, RbEnv(p + 1, p + 1))
    return not occurs_dim(t, p)


def do_coe(line, src: Dim, dst: Dim, arg: Value, ctx: Ctx) -> Value:
    if decide_eq(ctx.classes, src, dst):
        ctx.emit("coercion boundary")
        return arg
    if _line_constant(line, ctx):
        ctx.emit("coercion regularity")
        return arg
    interior = force(apply_dim(line, DimVar(_fresh_probe()), ctx), ctx)

    if isinstance(interior, VPi):
        ctx.emit("function coercion computation")

        def lam_body(x, c):
            dom_line = DimCloFn(
                lambda i, c2: force(apply_dim(line, i, c2), c2).dom)

            def xfill(j, c2):
                return do_coe(dom_line, dst, j, x, c2)

            cod_line = DimCloFn(lambda i, c2: apply_tm(
                force(apply_dim(line, i, c2), c2).cod, xfill(i, c2), c2))
            return do_coe(cod_line, src, dst,
                          do_app(arg, xfill(src, c), c), c)

        return VLam(TmCloFn(lam_body))

    if isinstance(interior, VSg):
        ctx.emit("pair coercion computation")
        dom_line = DimCloFn(lambda i, c: force(apply_dim(line, i, c), c).dom)

        def fill(j, c):
            return do_coe(dom_line, src, j, do_fst(arg, c), c)

        cod_line = DimCloFn(lambda i, c: apply_tm(
            force(apply_dim(line, i, c), c).cod, fill(i, c), c))
        return VPair(fill(dst, ctx),
                     do_coe(cod_line, src, dst, do_snd(arg, ctx), ctx))

    if isinstance(interior, VEq):
        ctx.emit("equality coercion computation")

        def dimlam_body(t, c):
            inner_line = DimCloFn(lambda i, c2: apply_dim(
                force(apply_dim(line, i, c2), c2).line, t, c2))
            tube_l = DimCloFn(
                lambda i, c2: force(apply_dim(line, i, c2), c2).lhs)
            tube_r = DimCloFn(
                lambda i, c2: force(apply_dim(line, i, c2), c2).rhs)
            return do_com(inner_line, src, dst, do_papp(arg, t, c), t,
                          tube_l, tube_r, c)

        return VDimLam(DimCloFn(dimlam_body))

    if isinstance(interior, (VBool, VUniv)):
        # Dimension-invariant head; only reachable when the constancy test
        # was weaker than head inspection.
        ctx.emit("coercion regularity")
        return arg

    if isinstance(interior, VNeutral):
        return VNeutral(NCoe(line, src, dst, arg),
                        apply_dim(line, dst, ctx), ctx.classes.token)

    raise KernelBug(f"do_coe: line interior is not a type: {interior!r}")


def do_hcom(ty: Value, src: Dim, dst: Dim, cap: Value, sys: Dim,
            tube0, tube1, ctx: Ctx) -> Value:
    if decide_eq(ctx.classes, src, dst):
        ctx.emit("composition boundary")
        return cap
    eps = ctx.classes.const_of(sys)
    if eps is not None:
        ctx.emit("composition boundary")
        return apply_dim(tube0 if eps == 0 else tube1, dst, ctx)
    ty = force(ty, ctx)
    if _tube_constant(tube0, ty, ctx) and _tube_constant(tube1, ty, ctx):
        ctx.emit("composition regularity")
        return cap

    if isinstance(ty, VPi):
        ctx.emit("function composition computation")

        def lam_body(x, c):
            return do_hcom(
                apply_tm(ty.cod, x, c), src, dst, do_app(cap, x, c), sys,
                DimCloFn(lambda j, c2: do_app(apply_dim(tube0, j, c2), x, c2)),
                DimCloFn(lambda j, c2: do_app(apply_dim(tube1, j, c2), x, c2)),
                c)

        return VLam(TmCloFn(lam_body))

    if isinstance(ty, VSg):
        ctx.emit("pair composition computation")
        fst0 = DimCloFn(lambda j, c: do_fst(apply_dim(tube0, j, c), c))
        fst1 = DimCloFn(lambda j, c: do_fst(apply_dim(tube1, j, c), c))

        def fill(k, c):
            return do_hcom(ty.dom, src, k, do_fst(cap, c), sys, fst0, fst1, c)

        cod_line = DimCloFn(lambda k, c: apply_tm(ty.cod, fill(k, c), c))
        snd_out = do_com(
            cod_line, src, dst, do_snd(cap, ctx), sys,
            DimCloFn(lambda j, c: do_snd(apply_dim(tube0, j, c), c)),
            DimCloFn(lambda j, c: do_snd(apply_dim(tube1, j, c), c)), ctx)
        return VPair(fill(dst, ctx), snd_out)

    if isinstance(ty, VEq):
        ctx.emit("equality composition computation")

        def dimlam_body(t, c):
            return do_hcom(
                apply_dim(ty.line, t, c), src, dst, do_papp(cap, t, c), sys,
                DimCloFn(lambda j, c2: do_papp(apply_dim(tube0, j, c2), t, c2)),
                DimCloFn(lambda j, c2: do_papp(apply_dim(tube1, j, c2), t, c2)),
                c)

        return VDimLam(DimCloFn(dimlam_body))

    if isinstance(ty, VUniv):
        out = _hcom_univ(ty, src, dst, cap, sys, tube0, tube1, ctx)
        if out is not None:
            return out

    if isinstance(ty, (VBool, VUniv, VNeutral)):
        return VNeutral(NHCom(ty, src, dst, cap, sys, tube0, tube1), ty,
                        ctx.classes.token)

    raise KernelBug(f"do_hcom: not a composable type: {ty!r}")


def _hcom_univ(uni: VUniv, src: Dim, dst: Dim, cap: Value, sys: Dim,
               tube0, tube1, ctx: Ctx) -> Optional[Value]:
    """Type-level composition: reduce when cap and tubes share a head former."""
    cap = force(cap, ctx)
    probe = DimVar(_fresh_probe())
    h0 = force(apply_dim(tube0, probe, ctx), ctx)
    h1 = force(apply_dim(tube1, probe, ctx), ctx)

    if isinstance(cap, VBool) and isinstance(h0, VBool) and isinstance(h1, VBool):
        ctx.emit("boolean type composition")
        return VBool()

    if (isinstance(cap, VUniv) and isinstance(h0, VUniv)
            and isinstance(h1, VUniv) and cap.level == h0.level == h1.level):
        ctx.emit("universe type composition")
        return cap

    if ((isinstance(cap, VPi) and isinstance(h0, VPi) and isinstance(h1, VPi))
            or (isinstance(cap, VSg) and isinstance(h0, VSg)
                and isinstance(h1, VSg))):
        is_pi = isinstance(cap, VPi)
        ctx.emit("function type composition" if is_pi
                 else "pair type composition")
        dom0 = DimCloFn(lambda j, c: force(apply_dim(tube0, j, c), c).dom)
        dom1 = DimCloFn(lambda j, c: force(apply_dim(tube1, j, c), c).dom)

        def dom_fill(k, c):
            return do_hcom(uni, src, k, cap.dom, sys, dom0, dom1, c)

        def cod_body(x, c):
            fill_line = DimCloFn(dom_fill)

            def xfill(j, c2):
                return do_coe(fill_line, dst, j, x, c2)

            return do_hcom(
                uni, src, dst, apply_tm(cap.cod, xfill(src, c), c), sys,
                DimCloFn(lambda j, c2: apply_tm(
                    force(apply_dim(tube0, j, c2), c2).cod, xfill(j, c2), c2)),
                DimCloFn(lambda j, c2: apply_tm(
                    force(apply_dim(tube1, j, c2), c2).cod, xfill(j, c2), c2)),
                c)

        make = VPi if is_pi else VSg
        return make(dom_fill(dst, ctx), TmCloFn(cod_body))

    if isinstance(cap, VEq) and isinstance(h0, VEq) and isinstance(h1, VEq):
        ctx.emit("equality type composition")

        def line_at(i):
            return (DimCloFn(lambda j, c: apply_dim(
                        force(apply_dim(tube0, j, c), c).line, i, c)),
                    DimCloFn(lambda j, c: apply_dim(
                        force(apply_dim(tube1, j, c), c).line, i, c)))

        def fill(k, i, c):
            t0, t1 = line_at(i)
            return do_hcom(uni, src, k, apply_dim(cap.line, i, c), sys,
                           t0, t1, c)

        line_out = DimCloFn(lambda i, c: fill(dst, i, c))
        lhs_out = do_com(
            DimCloFn(lambda k, c: fill(k, DIM0, c)), src, dst, cap.lhs, sys,
            DimCloFn(lambda j, c: force(apply_dim(tube0, j, c), c).lhs),
            DimCloFn(lambda j, c: force(apply_dim(tube1, j, c), c).lhs), ctx)
        rhs_out = do_com(
            DimCloFn(lambda k, c: fill(k, DIM1, c)), src, dst, cap.rhs, sys,
            DimCloFn(lambda j, c: force(apply_dim(tube0, j, c), c).rhs),
            DimCloFn(lambda j, c: force(apply_dim(tube1, j, c), c).rhs), ctx)
        return VEq(line_out, lhs_out, rhs_out)

    return None  # mixed heads: unreachable when well-typed, left stuck


def do_com(line, src: Dim, dst: Dim, cap: Value, sys: Dim, tube0, tube1,
           ctx: Ctx) -> Value:
    """Composition along a type line, by its defining expansion."""
    ctx.emit("heterogeneous composition")
    return do_hcom(
        apply_dim(line, dst, ctx), src, dst,
        do_coe(line, src, dst, cap, ctx), sys,
        DimCloFn(lambda j, c: do_coe(line, j, dst,
                                     apply_dim(tube0, j, c), c)),
        DimCloFn(lambda j, c: do_coe(line, j, dst,
                                     apply_dim(tube1, j, c), c)),
        ctx)


def do_typecase(level: int, motive: Value, scrut: Value, on_pi: TmCloN,
                on_sg: TmCloN, on_eq: TmCloN, on_bool: TmCloN,
                on_univ: TmCloN, ctx: Ctx) -> Value:
    scrut = force(scrut, ctx)
    if isinstance(scrut, VPi):
        ctx.emit("type-case computation")
        return apply_n(on_pi, [scrut.dom, VLam(scrut.cod)], ctx)
    if isinstance(scrut, VSg):
        ctx.emit("type-case computation")
        return apply_n(on_sg, [scrut.dom, VLam(scrut.cod)], ctx)
    if isinstance(scrut, VEq):
        ctx.emit("type-case computation")
        return apply_n(on_eq, [apply_dim(scrut.line, DIM0, ctx),
                               apply_dim(scrut.line, DIM1, ctx),
                               VDimLam(scrut.line), scrut.lhs, scrut.rhs], ctx)
    if isinstance(scrut, VBool):
        ctx.emit("type-case computation")
        return apply_n(on_bool, [], ctx)
    if isinstance(scrut, VUniv):
        ctx.emit("type-case computation")
        return apply_n(on_univ, [], ctx)
    if isinstance(scrut, VNeutral):
        return VNeutral(NTypeCase(level, motive, scrut, on_pi, on_sg, on_eq,
                                  on_bool, on_univ), motive,
                        ctx.classes.token)
    raise KernelBug(f"do_typecase: scrutinee is not a type code: {scrut!r}")


# ---------------------------------------------------------------------------
# Readback
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RbEnv:
    """Current binder depths during quotation."""
    dims: int
    vars: int

    def bind_dim(self) -> "RbEnv":
        return RbEnv(self.dims + 1, self.vars)

    def bind_var(self) -> "RbEnv":
        return RbEnv(self.dims, self.vars + 1)


def fresh_var(ty: Value, level: int, ctx: Ctx) -> Value:
    return VNeutral(NVar(level), ty, ctx.classes.token)


def readback_tm(v: Value, ty: Value, ctx: Ctx, rb: RbEnv) -> Term:
    """Type-directed quotation; produces beta-normal, eta-long syntax."""
    ty = force(ty, ctx)
    if isinstance(ty, VPi):
        x = fresh_var(ty.dom, rb.vars, ctx)
        body = readback_tm(do_app(v, x, ctx), apply_tm(ty.cod, x, ctx), ctx,
                           rb.bind_var())
        return Lam(body)
    if isinstance(ty, VSg):
        a = do_fst(v, ctx)
        return Pair(readback_tm(a, ty.dom, ctx, rb),
                    readback_tm(do_snd(v, ctx), apply_tm(ty.cod, a, ctx),
                                ctx, rb))
    if isinstance(ty, VEq):
        d = DimVar(rb.dims)
        body = readback_tm(do_papp(v, d, ctx), apply_dim(ty.line, d, ctx),
                           ctx, rb.bind_dim())
        return DimLam(body)
    if isinstance(ty, VBool):
        v = force(v, ctx)
        if isinstance(v, VTrue):
            return TT()
        if isinstance(v, VFalse):
            return FF()
        if isinstance(v, VNeutral):
            return readback_ne(v, ctx, rb)
        raise KernelBug(f"readback: not a boolean: {v!r}")
    if isinstance(ty, VUniv):
        return readback_ty(v, ctx, rb)
    if isinstance(ty, VNeutral):
        v = force(v, ctx)
        if isinstance(v, VNeutral):
            return readback_ne(v, ctx, rb)
        raise KernelBug("readback: canonical value at a neutral type")
    raise KernelBug(f"readback: not a type value: {ty!r}")


def readback_ty(v: Value, ctx: Ctx, rb: RbEnv) -> Term:
    v = force(v, ctx)
    if isinstance(v, VPi) or isinstance(v, VSg):
        x = fresh_var(v.dom, rb.vars, ctx)
        dom = readback_ty(v.dom, ctx, rb)
        cod = readback_ty(apply_tm(v.cod, x, ctx), ctx, rb.bind_var())
        return Pi(dom, cod) if isinstance(v, VPi) else Sg(dom, cod)
    if isinstance(v, VEq):
        d = DimVar(rb.dims)
        line = readback_ty(apply_dim(v.line, d, ctx), ctx, rb.bind_dim())
        lhs = readback_tm(v.lhs, apply_dim(v.line, DIM0, ctx), ctx, rb)
        rhs = readback_tm(v.rhs, apply_dim(v.line, DIM1, ctx), ctx, rb)
        return Eq(line, lhs, rhs)
    if isinstance(v, VBool):
        return Bool()
    if isinstance(v, VUniv):
        return Univ(v.level)
    if isinstance(v, VNeutral):
        return readback_ne(v, ctx, rb)
    raise KernelBug(f"readback_ty: not a type value: {v!r}")


def _readback_fam(dom: Value, cod, ctx: Ctx, rb: RbEnv):
    """Quote an x:A.B annotation from a domain value and codomain closure."""
    dom_t = readback_ty(dom, ctx, rb)
    x = fresh_var(dom, rb.vars, ctx)
    cod_t = readback_ty(apply_tm(cod, x, ctx), ctx, rb.bind_var())
    return dom_t, cod_t


def readback_ne(n: VNeutral, ctx: Ctx, rb: RbEnv) -> Term:
    ne = n.ne
    if isinstance(ne, NVar):
        return Var(rb.vars - 1 - ne.level)
    if isinstance(ne, NApp):
        fty = force(ne.fn.ty, ctx)
        dom_t, cod_t = _readback_fam(fty.dom, fty.cod, ctx, rb)
        return App(dom_t, cod_t, readback_ne(ne.fn, ctx, rb),
                   readback_tm(ne.arg, fty.dom, ctx, rb))
    if isinstance(ne, (NFst, NSnd)):
        pty = force(ne.pair.ty, ctx)
        dom_t, cod_t = _readback_fam(pty.dom, pty.cod, ctx, rb)
        head = Fst if isinstance(ne, NFst) else Snd
        return head(dom_t, cod_t, readback_ne(ne.pair, ctx, rb))
    if isinstance(ne, NPApp):
        pty = force(ne.fn.ty, ctx)
        line_t = readback_ty(apply_dim(pty.line, DimVar(rb.dims), ctx), ctx,
                             rb.bind_dim())
        return PApp(line_t, readback_ne(ne.fn, ctx, rb), ne.dim)
    if isinstance(ne, NIf):
        x = fresh_var(VBool(), rb.vars, ctx)
        mot_t = readback_ty(apply_tm(ne.motive, x, ctx), ctx, rb.bind_var())
        return If(mot_t, readback_ne(ne.scrut, ctx, rb),
                  readback_tm(ne.on_true, apply_tm(ne.motive, VTrue(), ctx),
                              ctx, rb),
                  readback_tm(ne.on_false, apply_tm(ne.motive, VFalse(), ctx),
                              ctx, rb))
    if isinstance(ne, NCoe):
        d = DimVar(rb.dims)
        line_t = readback_ty(apply_dim(ne.line, d, ctx), ctx, rb.bind_dim())
        arg_t = readback_tm(ne.arg, apply_dim(ne.line, ne.src, ctx), ctx, rb)
        return Coe(line_t, ne.src, ne.dst, arg_t)
    if isinstance(ne, NHCom):
        d = DimVar(rb.dims)
        return HCom(readback_ty(ne.ty, ctx, rb), ne.src, ne.dst,
                    readback_tm(ne.cap, ne.ty, ctx, rb), ne.sys,
                    readback_tm(apply_dim(ne.tube0, d, ctx), ne.ty, ctx,
                                rb.bind_dim()),
                    readback_tm(apply_dim(ne.tube1, d, ctx), ne.ty, ctx,
                                rb.bind_dim()))
    if isinstance(ne, NTypeCase):
        u = VUniv(ne.level)
        mot_t = readback_ty(ne.motive, ctx, rb)
        x = fresh_var(u, rb.vars, ctx)
        y = fresh_var(VPi(x, TmCloFn(lambda _v, _c: u)), rb.vars + 1, ctx)
        pi_t = readback_tm(apply_n(ne.on_pi, [x, y], ctx), ne.motive, ctx,
                           rb.bind_var().bind_var())
        sg_t = readback_tm(apply_n(ne.on_sg, [x, y], ctx), ne.motive, ctx,
                           rb.bind_var().bind_var())
        x0 = fresh_var(u, rb.vars, ctx)
        x1 = fresh_var(u, rb.vars + 1, ctx)
        xe = fresh_var(VEq(DimCloFn(lambda _d, _c: u), x0, x1),
                       rb.vars + 2, ctx)
        y0 = fresh_var(x0, rb.vars + 3, ctx)
        y1 = fresh_var(x1, rb.vars + 4, ctx)
        rb5 = rb
        for _ in range(5):
            rb5 = rb5.bind_var()
        eq_t = readback_tm(apply_n(ne.on_eq, [x0, x1, xe, y0, y1], ctx),
                           ne.motive, ctx, rb5)
        bool_t = readback_tm(apply_n(ne.on_bool, [], ctx), ne.motive, ctx, rb)
        univ_t = readback_tm(apply_n(ne.on_univ, [], ctx), ne.motive, ctx, rb)
        return TypeCase(ne.level, mot_t, readback_ne(ne.scrut, ctx, rb),
                        pi_t, sg_t, eq_t, bool_t, univ_t)
    raise KernelBug(f"readback_ne: unknown neutral {ne!r}")


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def identity_env(cube: Cube, tele: Telescope, ctx: Ctx) -> Env:
    """The environment sending each binder to itself (as a semantic value)."""
    env = Env(tuple(DimVar(k) for k in range(cube.num_dims)), ())
    for k, ty in enumerate(tele.types):
        ty_v = eval_term(ty, env, ctx)
        env = env.bind_tm(fresh_var(ty_v, k, ctx))
    return env


def normalize(t: Term, cube: Cube, tele: Telescope, ty: Term,
              defs: Optional[dict] = None, trace: Optional[list] = None,
              regularity_hook=None) -> Term:
    """Normal form of ``t`` at type ``ty`` in the given contexts."""
    ctx = Ctx(build_classes(cube), defs, trace, regularity_hook)
    env = identity_env(cube, tele, ctx)
    ty_v = eval_term(ty, env, ctx)
    v = eval_term(t, env, ctx)
    return readback_tm(v, ty_v, ctx, RbEnv(cube.num_dims, len(tele)))
