"""Bidirectional elaboration: surface syntax to annotated core terms.

Introductions check, eliminations infer; conversion is invoked exactly at
the switch between the two modes.  Cumulativity is algebraic: when a term
of a smaller universe is used at a larger one, the elaborator wraps it in
an explicit lift instead of subtyping.

Two judgmental peculiarities surface here:

* A dimension abstraction checked at an equality type must *prove* its
  declared boundary: the elaborated body is instantiated at each endpoint
  and compared against the stated side; failure is the E-BOUNDARY error.

* Under an inconsistent cube (a false constraint such as 0 = 1) every
  scope-correct term checks at every type; elaboration short-circuits to
  a dummy, implementing the judgment collapse.

Compositions enforce their seam: each tube is checked on its own face and
compared against the cap where the tube meets it (E-FACE on failure).
Heterogeneous composition is surface sugar and elaborates to its defining
expansion (a homogeneous composition of coerced pieces).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from . import surface as S
from .conversion import ConvConfig, conv_tm, conv_ty, regularity_by_conversion
from .diagnostics import Diagnostic, Span, XttError
from .dims import DimClasses, build_classes, consistent
from .domain import (
    DimClo, Env, NVar, TmClo, Value, VBool, VEq, VFalse, VNeutral, VPi,
    VSg, VTrue, VUniv,
)
from .semantics import (
    Ctx, RbEnv, apply_dim, apply_tm, do_fst, eval_term, force, fresh_var,
    readback_tm, readback_ty,
)
from .surface import SurfaceTerm, print_term
from .syntax import (
    App, Bool, Coe, Cube, Def, Dim, DimConst, DimVar, Eq, FF, Fst, HCom, If,
    Lam, Lift, Pair, PApp, Pi, Sg, Snd, Telescope, Term, TT, TypeCase, Univ,
    Var, DimLam, shift_dim_from, shift_tm, subst_dim, subst_tm,
)

__all__ = ["Checker", "Definition", "Scope", "CheckState"]


@dataclass(frozen=True)
class Definition:
    name: str
    ty_term: Term
    ty_value: Value
    body_term: Term
    value: Value


@dataclass(frozen=True)
class Scope:
    """One checking context: cube, telescope, and the matching environment."""

    cube: Cube
    classes: DimClasses
    tele: Tuple[Term, ...]
    types: Tuple[Value, ...]
    env: Env
    dim_names: Tuple[str, ...]
    var_names: Tuple[str, ...]

    @property
    def n_dims(self) -> int:
        return self.cube.num_dims

    @property
    def n_vars(self) -> int:
        return len(self.var_names)

    def telescope(self) -> Telescope:
        return Telescope(self.tele, self.cube)

    def bind_dim(self, name: str) -> "Scope":
        cube = self.cube.bind_dim()
        return Scope(cube, build_classes(cube), self.tele, self.types,
                     self.env.bind_dim(DimVar(self.n_dims)),
                     self.dim_names + (name,), self.var_names)

    def constrain(self, lhs: Dim, rhs: Dim) -> "Scope":
        cube = self.cube.constrain(lhs, rhs)
        return Scope(cube, build_classes(cube), self.tele, self.types,
                     self.env, self.dim_names, self.var_names)

    def bind_var(self, name: str, ty_term: Term, ty_value: Value,
                 value: Optional[Value] = None) -> "Scope":
        if value is None:
            value = VNeutral(NVar(self.n_vars), ty_value, self.classes.token)
        return Scope(self.cube, self.classes, self.tele + (ty_term,),
                     self.types + (ty_value,), self.env.bind_tm(value),
                     self.dim_names, self.var_names + (name,))


# Nodes that head a type former and may be checked against a universe.
_TYPE_FORMERS = (S.SPi, S.SSg, S.SEq, S.SBool, S.SUniv, S.SLift)


class CheckState:
    """Alias kept for the public surface; see :class:`Checker`."""


class Checker:
    """Elaborator with a global definition table and conversion settings."""

    def __init__(self, cfg: ConvConfig = ConvConfig(),
                 trace: Optional[list] = None):
        self.cfg = cfg
        self.defs: Dict[str, Definition] = {}
        self._def_values: Dict[str, Value] = {}
        self.trace = trace

    # -- plumbing ------------------------------------------------------------

    def empty_scope(self) -> Scope:
        cube = Cube()
        return Scope(cube, build_classes(cube), (), (), Env(), (), ())

    def ctx_for(self, classes: DimClasses) -> Ctx:
        hook = (regularity_by_conversion(self.cfg)
                if self.cfg.full_regularity else None)
        return Ctx(classes, self._def_values, self.trace, hook)

    def _rb(self, sc: Scope) -> RbEnv:
        return RbEnv(sc.n_dims, sc.n_vars)

    def _eval(self, t: Term, sc: Scope) -> Value:
        return eval_term(t, sc.env, self.ctx_for(sc.classes))

    def _show_ty(self, v: Value, sc: Scope) -> str:
        ctx = self.ctx_for(sc.classes)
        t = readback_ty(force(v, ctx), ctx, self._rb(sc))
        return print_term(t, sc.var_names, sc.dim_names, annotated=False)

    def _conv_tm(self, m: Value, n: Value, ty: Value, sc: Scope) -> bool:
        return conv_tm(m, n, ty, self.ctx_for(sc.classes), self._rb(sc),
                       self.cfg)

    def _conv_ty(self, a: Value, b: Value, sc: Scope) -> bool:
        return conv_ty(a, b, self.ctx_for(sc.classes), self._rb(sc), self.cfg)

    def _fail(self, span: Span, code: str, msg: str, expected=None,
              actual=None):
        raise XttError(Diagnostic(span, code, msg, expected, actual))

    def _resolve_dim(self, d: S.SDim, sc: Scope) -> Dim:
        if d.const is not None:
            return DimConst(d.const)
        for lvl in range(sc.n_dims - 1, -1, -1):
            if sc.dim_names[lvl] == d.name:
                return DimVar(lvl)
        self._fail(d.span, "E-SCOPE", f"unbound dimension {d.name!r}")

    def _ann_fam(self, dom: Value, cod, sc: Scope) -> Tuple[Term, Term]:
        """Read back an x:A.B annotation from semantic data."""
        ctx = self.ctx_for(sc.classes)
        rb = self._rb(sc)
        dom_t = readback_ty(dom, ctx, rb)
        x = fresh_var(dom, sc.n_vars, ctx)
        cod_t = readback_ty(apply_tm(cod, x, ctx), ctx, rb.bind_var())
        return dom_t, cod_t

    # -- checking ------------------------------------------------------------

    def check(self, t: SurfaceTerm, ty: Value, sc: Scope) -> Term:
        ctx = self.ctx_for(sc.classes)
        if not consistent(sc.classes):
            self._scope_check(t, sc)
            return TT()
        ty = force(ty, ctx)

        if isinstance(t, S.SLam):
            if not isinstance(ty, VPi):
                self._fail(t.span, "E-TYPE-MISMATCH",
                           "function literal at a non-function type",
                           expected=self._show_ty(ty, sc))
            dom_t = readback_ty(ty.dom, ctx, self._rb(sc))
            sc2 = sc.bind_var(t.var, dom_t, ty.dom)
            body = self.check(t.body, apply_tm(ty.cod, sc2.env.tm(0), ctx),
                              sc2)
            return Lam(body)

        if isinstance(t, S.SDimLam):
            if not isinstance(ty, VEq):
                self._fail(t.span, "E-TYPE-MISMATCH",
                           "dimension abstraction at a non-equality type",
                           expected=self._show_ty(ty, sc))
            sc2 = sc.bind_dim(t.dvar)
            interior = apply_dim(ty.line, DimVar(sc.n_dims), ctx)
            body = self.check(t.body, interior, sc2)
            for eps, side in ((0, ty.lhs), (1, ty.rhs)):
                got = eval_term(body, sc.env.bind_dim(DimConst(eps)), ctx)
                at = apply_dim(ty.line, DimConst(eps), ctx)
                if not self._conv_tm(got, side, at, sc):
                    self._fail(
                        t.span, "E-BOUNDARY",
                        f"abstraction body disagrees with the declared "
                        f"endpoint at {t.dvar}={eps}",
                        expected=self._show(side, at, sc),
                        actual=self._show(got, at, sc))
            return DimLam(body)

        if isinstance(t, S.SPair):
            if not isinstance(ty, VSg):
                self._fail(t.span, "E-TYPE-MISMATCH",
                           "pair literal at a non-pair type",
                           expected=self._show_ty(ty, sc))
            a = self.check(t.fst, ty.dom, sc)
            av = self._eval(a, sc)
            b = self.check(t.snd, apply_tm(ty.cod, av, ctx), sc)
            return Pair(a, b)

        if isinstance(t, S.STrue) and isinstance(ty, VBool):
            return TT()
        if isinstance(t, S.SFalse) and isinstance(ty, VBool):
            return FF()

        if isinstance(t, S.SIf) and t.motive is None:
            scrut = self.check(t.scrut, VBool(), sc)
            on_t = self.check(t.on_true, ty, sc)
            on_f = self.check(t.on_false, ty, sc)
            motive = shift_tm(readback_ty(ty, ctx, self._rb(sc)), 1)
            return If(motive, scrut, on_t, on_f)

        if isinstance(t, S.SLet):
            val_core, val_ty, sc2 = self._elab_let(t, sc)
            body = self.check(t.body, ty, sc2)
            return subst_tm(body, val_core, 0, dim_depth=sc.n_dims)

        if isinstance(t, _TYPE_FORMERS) and isinstance(ty, VUniv):
            core, lvl = self.check_type(t, sc)
            if lvl > ty.level:
                self._fail(t.span, "E-LEVEL",
                           f"type lives at level {lvl}, used at universe "
                           f"level {ty.level}")
            return core if lvl == ty.level else Lift(lvl, ty.level, core)

        core, got = self.infer(t, sc)
        return self._subsume(core, got, ty, sc, t.span)

    def _show(self, v: Value, ty: Value, sc: Scope) -> str:
        ctx = self.ctx_for(sc.classes)
        t = readback_tm(v, ty, ctx, self._rb(sc))
        return print_term(t, sc.var_names, sc.dim_names, annotated=False)

    def _subsume(self, core: Term, got: Value, want: Value, sc: Scope,
                 span: Span) -> Term:
        ctx = self.ctx_for(sc.classes)
        got = force(got, ctx)
        want = force(want, ctx)
        if isinstance(got, VUniv) and isinstance(want, VUniv) \
                and got.level < want.level:
            return Lift(got.level, want.level, core)
        if self._conv_ty(got, want, sc):
            return core
        self._fail(span, "E-TYPE-MISMATCH", "type mismatch",
                   expected=self._show_ty(want, sc),
                   actual=self._show_ty(got, sc))

    def _elab_let(self, t: S.SLet, sc: Scope):
        if t.ann is not None:
            ann_core, _ = self.check_type(t.ann, sc)
            val_ty = self._eval(ann_core, sc)
            val_core = self.check(t.val, val_ty, sc)
        else:
            val_core, val_ty = self.infer(t.val, sc)
        ctx = self.ctx_for(sc.classes)
        ty_term = readback_ty(val_ty, ctx, self._rb(sc))
        sc2 = sc.bind_var(t.var, ty_term, val_ty,
                          value=self._eval(val_core, sc))
        return val_core, val_ty, sc2

    # -- inference -----------------------------------------------------------

    def infer(self, t: SurfaceTerm, sc: Scope) -> Tuple[Term, Value]:
        ctx = self.ctx_for(sc.classes)
        if not consistent(sc.classes):
            self._scope_check(t, sc)
            return TT(), VBool()

        match t:
            case S.SVar(name=nm, span=sp):
                for i, entry in enumerate(reversed(sc.var_names)):
                    if entry == nm:
                        return Var(i), sc.types[sc.n_vars - 1 - i]
                if nm in self.defs:
                    d = self.defs[nm]
                    return Def(nm), d.ty_value
                import difflib
                pool = list(sc.var_names) + list(self.defs)
                hint = difflib.get_close_matches(nm, pool, n=1)
                extra = f"; did you mean {hint[0]!r}?" if hint else ""
                if nm in sc.dim_names:
                    extra = "; it is a dimension, not a term"
                self._fail(sp, "E-SCOPE", f"unbound name {nm!r}{extra}")

            case S.STrue():
                return TT(), VBool()
            case S.SFalse():
                return FF(), VBool()
            case S.SBool() | S.SPi() | S.SSg() | S.SEq() | S.SUniv() | S.SLift():
                core, lvl = self.check_type(t, sc)
                return core, VUniv(lvl)

            case S.SLam(span=sp):
                self._fail(sp, "E-TYPE-MISMATCH",
                           "cannot infer the type of an unannotated function")

            case S.SDimLam(dvar=dv, body=body):
                sc2 = sc.bind_dim(dv)
                body_core, body_ty = self.infer(body, sc2)
                ctx2 = self.ctx_for(sc2.classes)
                line_t = readback_ty(force(body_ty, ctx2), ctx2,
                                     RbEnv(sc2.n_dims, sc2.n_vars))
                lhs = eval_term(body_core, sc.env.bind_dim(DimConst(0)), ctx)
                rhs = eval_term(body_core, sc.env.bind_dim(DimConst(1)), ctx)
                return (DimLam(body_core),
                        VEq(DimClo(line_t, sc.env), lhs, rhs))

            case S.SApp(fn=f, arg=a, span=sp):
                f_core, f_ty = self.infer(f, sc)
                f_ty = force(f_ty, ctx)
                if not isinstance(f_ty, VPi):
                    self._fail(sp, "E-TYPE-MISMATCH",
                               "application of a non-function",
                               actual=self._show_ty(f_ty, sc))
                a_core = self.check(a, f_ty.dom, sc)
                dom_t, cod_t = self._ann_fam(f_ty.dom, f_ty.cod, sc)
                return (App(dom_t, cod_t, f_core, a_core),
                        apply_tm(f_ty.cod, self._eval(a_core, sc), ctx))

            case S.SAnnApp(var=x, dom=dom, cod=cod, fn=f, arg=a):
                dom_core, _ = self.check_type(dom, sc)
                dom_v = self._eval(dom_core, sc)
                sc2 = sc.bind_var(x, dom_core, dom_v)
                cod_core, _ = self.check_type(cod, sc2)
                pi_v = VPi(dom_v, TmClo(cod_core, sc.env))
                f_core = self.check(f, pi_v, sc)
                a_core = self.check(a, dom_v, sc)
                return (App(dom_core, cod_core, f_core, a_core),
                        apply_tm(pi_v.cod, self._eval(a_core, sc), ctx))

            case S.SPair(fst=a, snd=b):
                a_core, a_ty = self.infer(a, sc)
                b_core, b_ty = self.infer(b, sc)
                b_t = readback_ty(force(b_ty, ctx), ctx, self._rb(sc))
                return (Pair(a_core, b_core),
                        VSg(a_ty, TmClo(shift_tm(b_t, 1), sc.env)))

            case S.SFst(pair=p, span=sp) | S.SSnd(pair=p, span=sp):
                p_core, p_ty = self.infer(p, sc)
                p_ty = force(p_ty, ctx)
                if not isinstance(p_ty, VSg):
                    self._fail(sp, "E-TYPE-MISMATCH",
                               "projection from a non-pair",
                               actual=self._show_ty(p_ty, sc))
                dom_t, cod_t = self._ann_fam(p_ty.dom, p_ty.cod, sc)
                if isinstance(t, S.SFst):
                    return Fst(dom_t, cod_t, p_core), p_ty.dom
                p_v = self._eval(p_core, sc)
                return (Snd(dom_t, cod_t, p_core),
                        apply_tm(p_ty.cod, do_fst(p_v, ctx), ctx))

            case S.SAnnFst(var=x, dom=dom, cod=cod, pair=p) | \
                    S.SAnnSnd(var=x, dom=dom, cod=cod, pair=p):
                dom_core, _ = self.check_type(dom, sc)
                dom_v = self._eval(dom_core, sc)
                sc2 = sc.bind_var(x, dom_core, dom_v)
                cod_core, _ = self.check_type(cod, sc2)
                sg_v = VSg(dom_v, TmClo(cod_core, sc.env))
                p_core = self.check(p, sg_v, sc)
                if isinstance(t, S.SAnnFst):
                    return Fst(dom_core, cod_core, p_core), dom_v
                p_v = self._eval(p_core, sc)
                return (Snd(dom_core, cod_core, p_core),
                        apply_tm(sg_v.cod, do_fst(p_v, ctx), ctx))

            case S.SPApp(fn=f, dim=d, span=sp):
                r = self._resolve_dim(d, sc)
                f_core, f_ty = self.infer(f, sc)
                f_ty = force(f_ty, ctx)
                if not isinstance(f_ty, VEq):
                    self._fail(sp, "E-TYPE-MISMATCH",
                               "dimension application of a non-equality",
                               actual=self._show_ty(f_ty, sc))
                line_t = readback_ty(
                    apply_dim(f_ty.line, DimVar(sc.n_dims), ctx), ctx,
                    self._rb(sc).bind_dim())
                return (PApp(line_t, f_core, r),
                        apply_dim(f_ty.line, r, ctx))

            case S.SAnnPApp(dvar=dv, line=line, fn=f, dim=d, span=sp):
                r = self._resolve_dim(d, sc)
                sc2 = sc.bind_dim(dv)
                line_core, _ = self.check_type(line, sc2)
                f_core, f_ty = self.infer(f, sc)
                f_ty = force(f_ty, ctx)
                if not isinstance(f_ty, VEq):
                    self._fail(sp, "E-TYPE-MISMATCH",
                               "dimension application of a non-equality",
                               actual=self._show_ty(f_ty, sc))
                ann_clo = DimClo(line_core, sc.env)
                probe = DimVar(sc.n_dims)
                if not conv_ty(apply_dim(ann_clo, probe, ctx),
                               apply_dim(f_ty.line, probe, ctx), ctx,
                               self._rb(sc).bind_dim(), self.cfg):
                    self._fail(sp, "E-TYPE-MISMATCH",
                               "annotation disagrees with the equality line")
                return (PApp(line_core, f_core, r),
                        apply_dim(f_ty.line, r, ctx))

            case S.SIf(mvar=mv, motive=mot, scrut=scrut, on_true=a,
                       on_false=b, span=sp):
                if mot is None:
                    self._fail(sp, "E-TYPE-MISMATCH",
                               "cannot infer an if without a motive")
                sc2 = sc.bind_var(mv, Bool(), VBool())
                mot_core, _ = self.check_type(mot, sc2)
                scrut_core = self.check(scrut, VBool(), sc)
                clo = TmClo(mot_core, sc.env)
                a_core = self.check(a, apply_tm(clo, VTrue(), ctx), sc)
                b_core = self.check(b, apply_tm(clo, VFalse(), ctx), sc)
                return (If(mot_core, scrut_core, a_core, b_core),
                        apply_tm(clo, self._eval(scrut_core, sc), ctx))

            case S.SCoe(dvar=dv, line=line, src=r, dst=s, arg=m):
                r_d = self._resolve_dim(r, sc)
                s_d = self._resolve_dim(s, sc)
                sc2 = sc.bind_dim(dv)
                line_core, _ = self.check_type(line, sc2)
                clo = DimClo(line_core, sc.env)
                m_core = self.check(m, apply_dim(clo, r_d, ctx), sc)
                return (Coe(line_core, r_d, s_d, m_core),
                        apply_dim(clo, s_d, ctx))

            case S.SHCom():
                return self._elab_hcom(t, sc)

            case S.SCom():
                return self._elab_com(t, sc)

            case S.STyCase():
                return self._elab_tycase(t, sc)

            case S.SLet():
                val_core, _, sc2 = self._elab_let(t, sc)
                body_core, body_ty = self.infer(t.body, sc2)
                return (subst_tm(body_core, val_core, 0,
                                 dim_depth=sc.n_dims), body_ty)

        raise XttError(Diagnostic(t.span, "E-TYPE-MISMATCH",
                                  f"cannot infer {type(t).__name__}"))

    # -- composite eliminators -------------------------------------------------

    def _elab_hcom(self, t: S.SHCom, sc: Scope) -> Tuple[Term, Value]:
        ctx = self.ctx_for(sc.classes)
        ty_core, _ = self.check_type(t.ty, sc)
        ty_v = self._eval(ty_core, sc)
        r = self._resolve_dim(t.src, sc)
        s = self._resolve_dim(t.dst, sc)
        sys = self._resolve_dim(t.sys, sc)
        cap_core = self.check(t.cap, ty_v, sc)
        tubes = []
        for eps, tv, tube in ((0, t.tvar0, t.tube0), (1, t.tvar1, t.tube1)):
            sc_t = sc.bind_dim(tv).constrain(sys, DimConst(eps))
            tube_core = self.check(tube, ty_v, sc_t)
            self._check_face(tube_core, cap_core, ty_v, r, sys, eps, sc,
                             t.span)
            tubes.append(tube_core)
        return (HCom(ty_core, r, s, cap_core, sys, tubes[0], tubes[1]), ty_v)

    def _check_face(self, tube_core: Term, cap_core: Term, ty_v: Value,
                    src: Dim, sys: Dim, eps: int, sc: Scope,
                    span: Span) -> None:
        """The tube must agree with the cap where it meets it (seam j=src)."""
        sc_f = sc.constrain(sys, DimConst(eps))
        if not consistent(sc_f.classes):
            return
        ctx_f = self.ctx_for(sc_f.classes)
        tube_at = eval_term(tube_core, sc.env.bind_dim(src), ctx_f)
        cap_v = eval_term(cap_core, sc.env, ctx_f)
        if not conv_tm(tube_at, cap_v, ty_v, ctx_f, self._rb(sc_f), self.cfg):
            self._fail(span, "E-FACE",
                       f"tube at face {eps} disagrees with the cap",
                       expected=self._show(cap_v, ty_v, sc_f),
                       actual=self._show(tube_at, ty_v, sc_f))

    def _elab_com(self, t: S.SCom, sc: Scope) -> Tuple[Term, Value]:
        ctx = self.ctx_for(sc.classes)
        n = sc.n_dims
        r = self._resolve_dim(t.src, sc)
        s = self._resolve_dim(t.dst, sc)
        sys = self._resolve_dim(t.sys, sc)
        sc_line = sc.bind_dim(t.dvar)
        line_core, _ = self.check_type(t.line, sc_line)
        clo = DimClo(line_core, sc.env)
        cap_core = self.check(t.cap, apply_dim(clo, r, ctx), sc)
        tube_cores: List[Term] = []
        for eps, tv, tube in ((0, t.tvar0, t.tube0), (1, t.tvar1, t.tube1)):
            sc_t = sc.bind_dim(tv).constrain(sys, DimConst(eps))
            tube_core = self.check(tube, apply_dim(clo, DimVar(n), ctx), sc_t)
            sc_f = sc.constrain(sys, DimConst(eps))
            if consistent(sc_f.classes):
                ctx_f = self.ctx_for(sc_f.classes)
                tube_at = eval_term(tube_core, sc.env.bind_dim(r), ctx_f)
                cap_v = eval_term(cap_core, sc.env, ctx_f)
                if not conv_tm(tube_at, cap_v, apply_dim(clo, r, ctx_f),
                               ctx_f, self._rb(sc_f), self.cfg):
                    self._fail(t.span, "E-FACE",
                               f"tube at face {eps} disagrees with the cap")
            tube_cores.append(tube_core)
        # Defining expansion: homogeneous composition of coerced pieces.
        cap2 = Coe(line_core, r, s, cap_core)
        tube2 = [Coe(shift_dim_from(line_core, n, 1), DimVar(n), s, tc)
                 for tc in tube_cores]
        hcom_ty = subst_dim(line_core, s, n)
        return (HCom(hcom_ty, r, s, cap2, sys, tube2[0], tube2[1]),
                apply_dim(clo, s, ctx))

    def _elab_tycase(self, t: S.STyCase, sc: Scope) -> Tuple[Term, Value]:
        ctx = self.ctx_for(sc.classes)
        scrut_core, scrut_ty = self.infer(t.scrut, sc)
        scrut_ty = force(scrut_ty, ctx)
        if not isinstance(scrut_ty, VUniv):
            self._fail(t.span, "E-TYPE-MISMATCH",
                       "type-case scrutinee is not a universe element",
                       actual=self._show_ty(scrut_ty, sc))
        k = scrut_ty.level
        if t.level is not None and t.level != k:
            self._fail(t.span, "E-LEVEL",
                       f"type-case annotated at level {t.level}, scrutinee "
                       f"lives in U {k}")
        mot_core, _ = self.check_type(t.motive, sc)
        mot_v = self._eval(mot_core, sc)

        def branch2(names, body):
            x, y = names
            sc2 = sc.bind_var(x, Univ(k), VUniv(k))
            y_ty_term = Pi(Var(0), Univ(k))
            sc3 = sc2.bind_var(y, y_ty_term, self._eval(y_ty_term, sc2))
            return self.check(body, mot_v, sc3)

        on_pi = branch2(t.pi_vars, t.on_pi)
        on_sg = branch2(t.sg_vars, t.on_sg)

        x0, x1, xe, y0, y1 = t.eq_vars
        sc_e = sc.bind_var(x0, Univ(k), VUniv(k))
        sc_e = sc_e.bind_var(x1, Univ(k), VUniv(k))
        eq_ty_term = Eq(Univ(k), Var(1), Var(0))
        sc_e = sc_e.bind_var(xe, eq_ty_term, self._eval(eq_ty_term, sc_e))
        sc_e = sc_e.bind_var(y0, Var(2), self._eval(Var(2), sc_e))
        sc_e = sc_e.bind_var(y1, Var(2), self._eval(Var(2), sc_e))
        on_eq = self.check(t.on_eq, mot_v, sc_e)

        on_bool = self.check(t.on_bool, mot_v, sc)
        on_univ = self.check(t.on_univ, mot_v, sc)
        return (TypeCase(k, mot_core, scrut_core, on_pi, on_sg, on_eq,
                         on_bool, on_univ), mot_v)

    # -- type formation --------------------------------------------------------

    def check_type(self, t: SurfaceTerm, sc: Scope) -> Tuple[Term, int]:
        if not consistent(sc.classes):
            self._scope_check(t, sc)
            return Bool(), 0
        match t:
            case S.SPi(var=x, dom=dom, cod=cod) | \
                    S.SSg(var=x, dom=dom, cod=cod):
                dom_core, k1 = self.check_type(dom, sc)
                sc2 = sc.bind_var(x, dom_core, self._eval(dom_core, sc))
                cod_core, k2 = self.check_type(cod, sc2)
                cls = Pi if isinstance(t, S.SPi) else Sg
                return cls(dom_core, cod_core), max(k1, k2)
            case S.SEq(dvar=i, line=line, lhs=lhs, rhs=rhs):
                sc2 = sc.bind_dim(i)
                line_core, k = self.check_type(line, sc2)
                ctx = self.ctx_for(sc.classes)
                clo = DimClo(line_core, sc.env)
                lhs_core = self.check(lhs, apply_dim(clo, DimConst(0), ctx), sc)
                rhs_core = self.check(rhs, apply_dim(clo, DimConst(1), ctx), sc)
                return Eq(line_core, lhs_core, rhs_core), k
            case S.SBool():
                return Bool(), 0
            case S.SUniv(level=k):
                return Univ(k), k + 1
            case S.SLift(lo=lo, hi=hi, body=body, span=sp):
                body_core, k = self.check_type(body, sc)
                if not (k <= lo <= hi):
                    self._fail(sp, "E-LEVEL",
                               f"cannot lift a level-{k} type from {lo} to {hi}")
                if k == hi:
                    return body_core, hi
                return Lift(k, hi, body_core), hi
        core, ty = self.infer(t, sc)
        ty = force(ty, self.ctx_for(sc.classes))
        if isinstance(ty, VUniv):
            return core, ty.level
        self._fail(t.span, "E-TYPE-MISMATCH", "expected a type",
                   actual=self._show_ty(ty, sc))

    # -- collapse-mode scope check ---------------------------------------------

    def _scope_check(self, t: SurfaceTerm, sc: Scope) -> None:
        """Under a false constraint only well-scopedness is enforced."""
        names = set(sc.var_names) | set(self.defs)
        dims = set(sc.dim_names)

        def dim_ok(d: S.SDim):
            if d.const is None and d.name not in dims:
                self._fail(d.span, "E-SCOPE", f"unbound dimension {d.name!r}")

        def go(u: SurfaceTerm, extra_tm: frozenset, extra_dim: frozenset):
            tm = names | extra_tm
            dm = dims | extra_dim

            def sub(v, new_tm=(), new_dim=()):
                go(v, extra_tm | frozenset(new_tm),
                   extra_dim | frozenset(new_dim))

            match u:
                case S.SVar(name=nm, span=sp):
                    if nm not in tm:
                        self._fail(sp, "E-SCOPE", f"unbound name {nm!r}")
                case S.SPi(var=x, dom=d, cod=c) | S.SSg(var=x, dom=d, cod=c):
                    sub(d); sub(c, new_tm=(x,))
                case S.SEq(dvar=i, line=a, lhs=l, rhs=r):
                    sub(a, new_dim=(i,)); sub(l); sub(r)
                case S.SLift(body=b):
                    sub(b)
                case S.SLam(var=x, body=b):
                    sub(b, new_tm=(x,))
                case S.SDimLam(dvar=i, body=b):
                    sub(b, new_dim=(i,))
                case S.SApp(fn=f, arg=a):
                    sub(f); sub(a)
                case S.SAnnApp(var=x, dom=d, cod=c, fn=f, arg=a):
                    sub(d); sub(c, new_tm=(x,)); sub(f); sub(a)
                case S.SPair(fst=a, snd=b):
                    sub(a); sub(b)
                case S.SFst(pair=p) | S.SSnd(pair=p):
                    sub(p)
                case S.SAnnFst(var=x, dom=d, cod=c, pair=p) | \
                        S.SAnnSnd(var=x, dom=d, cod=c, pair=p):
                    sub(d); sub(c, new_tm=(x,)); sub(p)
                case S.SPApp(fn=f, dim=d):
                    sub(f)
                    if d.const is None and d.name not in dm:
                        self._fail(d.span, "E-SCOPE",
                                   f"unbound dimension {d.name!r}")
                case S.SAnnPApp(dvar=i, line=a, fn=f, dim=d):
                    sub(a, new_dim=(i,)); sub(f)
                    if d.const is None and d.name not in dm:
                        self._fail(d.span, "E-SCOPE",
                                   f"unbound dimension {d.name!r}")
                case S.SIf(mvar=mv, motive=m, scrut=s, on_true=a, on_false=b):
                    if m is not None:
                        sub(m, new_tm=(mv,))
                    sub(s); sub(a); sub(b)
                case S.SCoe(dvar=i, line=a, src=r, dst=s2, arg=m):
                    sub(a, new_dim=(i,)); sub(m)
                    for d in (r, s2):
                        if d.const is None and d.name not in dm:
                            self._fail(d.span, "E-SCOPE",
                                       f"unbound dimension {d.name!r}")
                case S.SHCom(ty=ty, src=r, dst=s2, sys=sy, cap=cap,
                             tvar0=j0, tube0=t0, tvar1=j1, tube1=t1):
                    sub(ty); sub(cap)
                    sub(t0, new_dim=(j0,)); sub(t1, new_dim=(j1,))
                    for d in (r, s2, sy):
                        if d.const is None and d.name not in dm:
                            self._fail(d.span, "E-SCOPE",
                                       f"unbound dimension {d.name!r}")
                case S.SCom(dvar=i, line=a, src=r, dst=s2, sys=sy, cap=cap,
                            tvar0=j0, tube0=t0, tvar1=j1, tube1=t1):
                    sub(a, new_dim=(i,)); sub(cap)
                    sub(t0, new_dim=(j0,)); sub(t1, new_dim=(j1,))
                    for d in (r, s2, sy):
                        if d.const is None and d.name not in dm:
                            self._fail(d.span, "E-SCOPE",
                                       f"unbound dimension {d.name!r}")
                case S.STyCase(scrut=s, motive=m, pi_vars=pv, on_pi=bp,
                               sg_vars=sv, on_sg=bs, eq_vars=ev, on_eq=be,
                               on_bool=bb, on_univ=bu):
                    sub(s); sub(m)
                    sub(bp, new_tm=pv); sub(bs, new_tm=sv)
                    sub(be, new_tm=ev); sub(bb); sub(bu)
                case S.SLet(var=x, ann=an, val=v, body=b):
                    if an is not None:
                        sub(an)
                    sub(v); sub(b, new_tm=(x,))

        go(t, frozenset(), frozenset())

    # -- programs ---------------------------------------------------------------

    def check_program(self, sdefs) -> Dict[str, Definition]:
        for d in sdefs:
            if d.name in self.defs:
                raise XttError(Diagnostic(
                    d.span, "E-DUPLICATE",
                    f"duplicate definition of {d.name!r}"))
            ty_s: SurfaceTerm = d.ret
            body_s: SurfaceTerm = d.body
            for nm, dom in reversed(d.params):
                ty_s = S.SPi(nm, dom, ty_s, d.span)
                body_s = S.SLam(nm, body_s, d.span)
            sc = self.empty_scope()
            try:
                ty_core, _ = self.check_type(ty_s, sc)
                ty_v = self._eval(ty_core, sc)
                body_core = self.check(body_s, ty_v, sc)
            except XttError as e:
                raise XttError(Diagnostic(
                    e.diagnostic.span, e.diagnostic.code,
                    f"in definition {d.name!r}: {e.diagnostic.message}",
                    e.diagnostic.expected, e.diagnostic.actual)) from None
            body_v = self._eval(body_core, sc)
            self.defs[d.name] = Definition(d.name, ty_core, ty_v, body_core,
                                           body_v)
            self._def_values[d.name] = body_v
        return self.defs

    # -- normalization façade -----------------------------------------------------

    def normalize_value(self, core: Term, ty_v: Value, sc: Scope) -> Term:
        ctx = self.ctx_for(sc.classes)
        return readback_tm(self._eval(core, sc), force(ty_v, ctx), ctx,
                           self._rb(sc))
