"""Deliberately naive weak-head evaluator over raw syntax.

This is the differential oracle for the NbE normalizer: an independent,
substitution-based machine that shares no code with the semantic domain.
It implements only the rules a *closed* boolean computation can need —
beta for every connective, coercion by adjacency/regularity/connective
dispatch, composition by adjacency and the tube face, tube-constancy
regularity, lift erasure, and boolean/universe type composition.  Open
composites (neutral heads, mixed universe heads, dependent type
composition) raise :class:`NaiveStuck` instead of guessing.

Because evaluation is outside-in and substitutes dimensions at every
application, the system dimension of any composition reached in weak-head
position of a closed term is a constant, which is why the face equations
suffice here.
"""

from __future__ import annotations

from .syntax import (
    App, Bool, Coe, Def, Dim, DimConst, DimLam, DimVar, DIM0, DIM1, Eq, FF,
    Fst, HCom, If, Lam, Lift, Pair, PApp, Pi, Sg, Snd, Term, TT, TypeCase,
    Univ, Var, occurs_dim, shift_dim_from, subst_dim, subst_tm,
)

__all__ = ["NaiveStuck", "whnf", "whnf_bool"]


class NaiveStuck(Exception):
    """The term left the closed-computation fragment this machine covers."""


def _const(d: Dim):
    return d.eps if isinstance(d, DimConst) else None


def whnf_bool(t: Term, defs=None) -> Term:
    """Weak-head normal form of a closed boolean term: ``tt`` or ``ff``."""
    out = whnf(t, 0, defs or {})
    if not isinstance(out, (TT, FF)):
        raise NaiveStuck(f"boolean term stuck at {type(out).__name__}")
    return out


def whnf(t: Term, d: int, defs) -> Term:
    """Weak head reduction at dimension depth ``d``."""
    while True:
        match t:
            case Def(name=nm):
                t = defs[nm]
            case Lift(body=b):
                t = b
            case App(fn=f, arg=a):
                t = _app(whnf(f, d, defs), a, d, defs)
            case Fst(pair=p):
                t = _fst(whnf(p, d, defs), d, defs)
            case Snd(pair=p):
                t = _snd(whnf(p, d, defs), d, defs)
            case PApp(fn=f, dim=r):
                t = _papp(whnf(f, d, defs), r, d, defs)
            case If(scrut=s, on_true=a, on_false=b):
                s = whnf(s, d, defs)
                if isinstance(s, TT):
                    t = a
                elif isinstance(s, FF):
                    t = b
                else:
                    raise NaiveStuck("if on a non-literal boolean")
            case TypeCase():
                t = _typecase(t, d, defs)
            case Coe(line=line, src=r, dst=s, arg=m):
                out = _coe(line, r, s, m, d, defs)
                if out is None:
                    return t  # canonical-for-elimination: line is Pi/Sg/Eq
                t = out
            case HCom():
                out = _hcom(t, d, defs)
                if out is None:
                    return t
                t = out
            case Var():
                raise NaiveStuck("free variable in a closed computation")
            case _:
                return t


def _line_whnf(line: Term, d: int, defs) -> Term:
    """Weak-head the interior of a dimension binder (depth ``d``+1)."""
    return whnf(line, d + 1, defs)


def _coe(line: Term, r: Dim, s: Dim, m: Term, d: int, defs):
    """Reduce a coercion, or return None when it is Pi/Sg/Eq-headed
    (those reduce at their elimination sites)."""
    if r == s:
        return m
    if not occurs_dim(line, d):
        return m
    interior = _line_whnf(line, d, defs)
    if isinstance(interior, (Bool, Univ)):
        return m
    if not occurs_dim(interior, d):
        return m
    if isinstance(interior, (Pi, Sg, Eq)):
        return None
    raise NaiveStuck(f"coe along a {type(interior).__name__} line")


def _coe_head(t: Term, d: int, defs):
    """For a whnf Coe, the reduced line interior (Pi/Sg/Eq)."""
    return _line_whnf(t.line, d, defs)


def _hcom(t: HCom, d: int, defs):
    if t.src == t.dst:
        return t.cap
    eps = _const(t.sys)
    if eps is not None:
        tube = t.tube0 if eps == 0 else t.tube1
        return subst_dim(tube, t.dst, d)
    if not occurs_dim(t.tube0, d) and not occurs_dim(t.tube1, d):
        return t.cap  # tube-constancy regularity
    ty = whnf(t.ty, d, defs)
    if isinstance(ty, (Pi, Sg, Eq)):
        return None
    if isinstance(ty, Univ):
        heads = [whnf(t.cap, d, defs),
                 _line_whnf(t.tube0, d, defs),
                 _line_whnf(t.tube1, d, defs)]
        if all(isinstance(h, Bool) for h in heads):
            return Bool()
        if all(isinstance(h, Univ) for h in heads) \
                and len({h.level for h in heads}) == 1:
            return heads[0]
        raise NaiveStuck("universe composition beyond the closed fragment")
    raise NaiveStuck(f"hcom at a {type(ty).__name__} type")


def _expand_com(line: Term, r: Dim, s: Dim, cap: Term, sys: Dim,
                tube0: Term, tube1: Term, d: int) -> Term:
    """com{j.A}{r}{s}{M}[sys=e -> j.N] as its defining hcom-of-coercions."""
    cap2 = Coe(line, r, s, cap)
    shifted = shift_dim_from(line, d, 1)
    t0 = Coe(shifted, DimVar(d), s, tube0)
    t1 = Coe(shifted, DimVar(d), s, tube1)
    return HCom(subst_dim(line, s, d), r, s, cap2, sys, t0, t1)


def _app(f: Term, a: Term, d: int, defs) -> Term:
    if isinstance(f, Lam):
        return subst_tm(f.body, a, 0)
    if isinstance(f, Coe):
        pi = _coe_head(f, d, defs)
        if isinstance(pi, Pi):
            dom, cod, r, s = pi.dom, pi.cod, f.src, f.dst
            # x~(j) = coe j.A s j a ; result coe i.B[x~(i)/x] r s (f.arg x~(r))
            fill_at_binder = Coe(shift_dim_from(dom, d, 1), s, DimVar(d), a)
            line2 = subst_tm(cod, fill_at_binder, 0, dim_depth=d + 1)
            inner = App(subst_dim(dom, r, d), subst_dim(cod, r, d), f.arg,
                        Coe(dom, s, r, a))
            return Coe(line2, r, s, inner)
        raise NaiveStuck("application of a non-function coercion")
    if isinstance(f, HCom):
        pi = whnf(f.ty, d, defs)
        if isinstance(pi, Pi):
            ty2 = subst_tm(pi.cod, a, 0, dim_depth=d)
            cap2 = App(pi.dom, pi.cod, f.cap, a)
            t0 = App(pi.dom, pi.cod, f.tube0, a)
            t1 = App(pi.dom, pi.cod, f.tube1, a)
            return HCom(ty2, f.src, f.dst, cap2, f.sys, t0, t1)
        raise NaiveStuck("application of a non-function composite")
    raise NaiveStuck("application of a non-function")


def _fst(p: Term, d: int, defs) -> Term:
    if isinstance(p, Pair):
        return p.fst
    if isinstance(p, Coe):
        sg = _coe_head(p, d, defs)
        if isinstance(sg, Sg):
            fst_arg = Fst(subst_dim(sg.dom, p.src, d),
                          subst_dim(sg.cod, p.src, d), p.arg)
            return Coe(sg.dom, p.src, p.dst, fst_arg)
        raise NaiveStuck("projection from a non-pair coercion")
    if isinstance(p, HCom):
        sg = whnf(p.ty, d, defs)
        if isinstance(sg, Sg):
            return HCom(sg.dom, p.src, p.dst,
                        Fst(sg.dom, sg.cod, p.cap), p.sys,
                        Fst(sg.dom, sg.cod, p.tube0),
                        Fst(sg.dom, sg.cod, p.tube1))
        raise NaiveStuck("projection from a non-pair composite")
    raise NaiveStuck("projection from a non-pair")


def _snd(p: Term, d: int, defs) -> Term:
    if isinstance(p, Pair):
        return p.snd
    if isinstance(p, Coe):
        sg = _coe_head(p, d, defs)
        if isinstance(sg, Sg):
            fst_at = Fst(subst_dim(sg.dom, p.src, d),
                         subst_dim(sg.cod, p.src, d), p.arg)
            line2 = subst_tm(sg.cod,
                             Coe(shift_dim_from(sg.dom, d, 1), p.src,
                                 DimVar(d), fst_at), 0, dim_depth=d + 1)
            return Coe(line2, p.src, p.dst,
                       Snd(subst_dim(sg.dom, p.src, d),
                           subst_dim(sg.cod, p.src, d), p.arg))
        raise NaiveStuck("projection from a non-pair coercion")
    if isinstance(p, HCom):
        sg = whnf(p.ty, d, defs)
        if isinstance(sg, Sg):
            # M~1(k) = hcom A r k (fst M) [sys=e -> j.fst N]
            fst_cap = Fst(sg.dom, sg.cod, p.cap)
            fill = HCom(shift_dim_from(sg.dom, d, 1), p.src, DimVar(d),
                        shift_dim_from(fst_cap, d, 1), p.sys,
                        shift_dim_from(Fst(sg.dom, sg.cod, p.tube0), d, 1),
                        shift_dim_from(Fst(sg.dom, sg.cod, p.tube1), d, 1))
            line2 = subst_tm(sg.cod, fill, 0, dim_depth=d + 1)
            return _expand_com(line2, p.src, p.dst,
                               Snd(sg.dom, sg.cod, p.cap), p.sys,
                               Snd(sg.dom, sg.cod, p.tube0),
                               Snd(sg.dom, sg.cod, p.tube1), d)
        raise NaiveStuck("projection from a non-pair composite")
    raise NaiveStuck("projection from a non-pair")


def _papp(p: Term, r: Dim, d: int, defs) -> Term:
    if isinstance(p, DimLam):
        return subst_dim(p.body, r, d)
    if isinstance(p, Coe):
        eq = _coe_head(p, d, defs)
        if isinstance(eq, Eq):
            # line binder at level d, equality binder at level d+1
            com_line = subst_dim(eq.line, r, d + 1)
            cap = PApp(subst_dim(eq.line, p.src, d), p.arg, r)
            return _expand_com(com_line, p.src, p.dst, cap, r,
                               eq.lhs, eq.rhs, d)
        raise NaiveStuck("dimension application of a non-equality coercion")
    if isinstance(p, HCom):
        eq = whnf(p.ty, d, defs)
        if isinstance(eq, Eq):
            ty2 = subst_dim(eq.line, r, d)
            shifted_line = shift_dim_from(eq.line, d, 1)
            return HCom(ty2, p.src, p.dst, PApp(eq.line, p.cap, r), p.sys,
                        PApp(shifted_line, p.tube0, r),
                        PApp(shifted_line, p.tube1, r))
        raise NaiveStuck("dimension application of a non-equality composite")
    raise NaiveStuck("dimension application of a non-equality")


def _typecase(t: TypeCase, d: int, defs) -> Term:
    scrut = whnf(t.scrut, d, defs)
    if isinstance(scrut, Pi) or isinstance(scrut, Sg):
        body = t.on_pi if isinstance(scrut, Pi) else t.on_sg
        body = subst_tm(body, Lam(scrut.cod), 0, dim_depth=d)
        return subst_tm(body, scrut.dom, 0, dim_depth=d)
    if isinstance(scrut, Eq):
        body = t.on_eq
        for v in (scrut.rhs, scrut.lhs, DimLam(scrut.line),
                  subst_dim(scrut.line, DIM1, d),
                  subst_dim(scrut.line, DIM0, d)):
            body = subst_tm(body, v, 0, dim_depth=d)
        return body
    if isinstance(scrut, Bool):
        return t.on_bool
    if isinstance(scrut, Univ):
        return t.on_univ
    raise NaiveStuck("type-case on a non-canonical type")