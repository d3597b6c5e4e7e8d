"""Core abstract syntax: dimensions, cubes, terms, and the substitution calculus.

Binding discipline
------------------

Two sorts of variables exist and they use different de Bruijn styles:

* Dimension variables are *levels*: ``DimVar(k)`` names the k-th dimension
  binder of the enclosing cube, counting from the outside.  Levels are
  absolute, so weakening (appending a new binder) never renumbers a term,
  and a term never needs adjustment when pushed under a dimension binder.
  Instantiating binder ``k`` removes it and decrements every level above it.

* Term variables are *indices*: ``Var(0)`` is the innermost binder.
  ``subst_tm`` follows the usual index discipline (shift the substituted
  term when crossing binders).

Types are terms (Russell-style universes), so there is a single ``Term``
grammar covering both.  Eliminators carry the typing annotations needed to
rebuild their types without re-inference: ``App``/``Fst``/``Snd`` carry the
``x:A.B`` telescope, ``PApp`` carries the line ``i.A``, ``If`` carries its
motive.  Surface syntax may omit these; elaboration fills them in.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Iterator, Union

__all__ = [
    "Dim", "DimConst", "DimVar", "DIM0", "DIM1",
    "Cube", "CubeDim", "CubeEq", "Level", "Telescope",
    "Term", "Var", "Def", "Pi", "Sg", "Eq", "Bool", "Univ", "Lift",
    "Lam", "App", "Pair", "Fst", "Snd", "DimLam", "PApp",
    "TT", "FF", "If", "Coe", "HCom", "TypeCase",
    "subst_dim", "subst_tm", "shift_tm", "shift_dim_from",
    "occurs_dim", "alpha_eq", "free_dim_levels",
    "ScopeError",
]


class ScopeError(Exception):
    """An index or level fell outside the scope it was used in."""


# ---------------------------------------------------------------------------
# Dimensions and cubes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DimConst:
    eps: int  # 0 or 1

    def __repr__(self):
        return f"Dim{self.eps}"


@dataclass(frozen=True)
class DimVar:
    level: int

    def __repr__(self):
        return f"DimVar({self.level})"


Dim = Union[DimConst, DimVar]

DIM0 = DimConst(0)
DIM1 = DimConst(1)

# Universe levels are plain naturals; lifting is only allowed upward.
Level = int


@dataclass(frozen=True)
class CubeDim:
    """A dimension binder entry of a cube."""


@dataclass(frozen=True)
class CubeEq:
    """A constraint entry ``lhs = rhs``; both sides scoped in the prefix."""
    lhs: Dim
    rhs: Dim


@dataclass(frozen=True)
class Cube:
    """Ordered dimension context: binders interleaved with constraints."""

    entries: tuple = ()

    @property
    def num_dims(self) -> int:
        return sum(1 for e in self.entries if isinstance(e, CubeDim))

    def constraints(self) -> Iterator[CubeEq]:
        return (e for e in self.entries if isinstance(e, CubeEq))

    def bind_dim(self) -> "Cube":
        return Cube(self.entries + (CubeDim(),))

    def constrain(self, lhs: Dim, rhs: Dim) -> "Cube":
        n = self.num_dims
        for d in (lhs, rhs):
            if isinstance(d, DimVar) and not (0 <= d.level < n):
                raise ScopeError(f"constraint mentions unbound dimension {d}")
        return Cube(self.entries + (CubeEq(lhs, rhs),))


@dataclass(frozen=True)
class Telescope:
    """Term context over a cube; entry n is scoped in the first n entries."""

    types: tuple = ()
    over: Cube = Cube()

    def __len__(self) -> int:
        return len(self.types)

    def extend(self, ty: "Term") -> "Telescope":
        return Telescope(self.types + (ty,), self.over)


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    index: int


@dataclass(frozen=True)
class Def(Term):
    """Reference to a checked top-level definition (always closed)."""
    name: str


@dataclass(frozen=True)
class Pi(Term):
    dom: Term
    cod: Term  # binds one term variable


@dataclass(frozen=True)
class Sg(Term):
    dom: Term
    cod: Term  # binds one term variable


@dataclass(frozen=True)
class Eq(Term):
    line: Term  # binds one dimension
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Bool(Term):
    pass


@dataclass(frozen=True)
class Univ(Term):
    level: Level


@dataclass(frozen=True)
class Lift(Term):
    """Cumulativity witness: a level-``lo`` type used at level ``hi``."""
    lo: Level
    hi: Level
    body: Term


@dataclass(frozen=True)
class Lam(Term):
    body: Term  # binds one term variable


@dataclass(frozen=True)
class App(Term):
    dom: Term
    cod: Term  # binds one term variable (the x:A.B annotation)
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term


@dataclass(frozen=True)
class Fst(Term):
    dom: Term
    cod: Term  # binds one term variable
    pair: Term


@dataclass(frozen=True)
class Snd(Term):
    dom: Term
    cod: Term  # binds one term variable
    pair: Term


@dataclass(frozen=True)
class DimLam(Term):
    body: Term  # binds one dimension


@dataclass(frozen=True)
class PApp(Term):
    line: Term  # binds one dimension (the i.A annotation)
    fn: Term
    dim: Dim


@dataclass(frozen=True)
class TT(Term):
    pass


@dataclass(frozen=True)
class FF(Term):
    pass


@dataclass(frozen=True)
class If(Term):
    motive: Term  # binds one term variable
    scrut: Term
    on_true: Term
    on_false: Term


@dataclass(frozen=True)
class Coe(Term):
    line: Term  # binds one dimension
    src: Dim
    dst: Dim
    arg: Term


@dataclass(frozen=True)
class HCom(Term):
    ty: Term
    src: Dim
    dst: Dim
    cap: Term
    sys: Dim
    tube0: Term  # binds one dimension; the sys=0 tube
    tube1: Term  # binds one dimension; the sys=1 tube


@dataclass(frozen=True)
class TypeCase(Term):
    """Intensional case split on the head former of a type code in U(level).

    Binder counts: ``on_pi``/``on_sg`` bind the domain and codomain-family
    (2 vars), ``on_eq`` binds both endpoints' types, the line, and the two
    endpoints (5 vars), ``on_bool``/``on_univ`` bind nothing.  The motive
    does not depend on the scrutinee.
    """
    level: Level
    motive: Term
    scrut: Term
    on_pi: Term
    on_sg: Term
    on_eq: Term
    on_bool: Term
    on_univ: Term


# For each constructor: (field name, term binders, dim binders) per subterm.
_CHILDREN = {
    Var: (),
    Def: (),
    Pi: (("dom", 0, 0), ("cod", 1, 0)),
    Sg: (("dom", 0, 0), ("cod", 1, 0)),
    Eq: (("line", 0, 1), ("lhs", 0, 0), ("rhs", 0, 0)),
    Bool: (),
    Univ: (),
    Lift: (("body", 0, 0),),
    Lam: (("body", 1, 0),),
    App: (("dom", 0, 0), ("cod", 1, 0), ("fn", 0, 0), ("arg", 0, 0)),
    Pair: (("fst", 0, 0), ("snd", 0, 0)),
    Fst: (("dom", 0, 0), ("cod", 1, 0), ("pair", 0, 0)),
    Snd: (("dom", 0, 0), ("cod", 1, 0), ("pair", 0, 0)),
    DimLam: (("body", 0, 1),),
    PApp: (("line", 0, 1), ("fn", 0, 0)),
    TT: (),
    FF: (),
    If: (("motive", 1, 0), ("scrut", 0, 0), ("on_true", 0, 0), ("on_false", 0, 0)),
    Coe: (("line", 0, 1), ("arg", 0, 0)),
    HCom: (("ty", 0, 0), ("cap", 0, 0), ("tube0", 0, 1), ("tube1", 0, 1)),
    TypeCase: (("motive", 0, 0), ("scrut", 0, 0), ("on_pi", 2, 0), ("on_sg", 2, 0),
               ("on_eq", 5, 0), ("on_bool", 0, 0), ("on_univ", 0, 0)),
}

# Fields holding a raw dimension (not a subterm).
_DIM_FIELDS = {
    PApp: ("dim",),
    Coe: ("src", "dst"),
    HCom: ("src", "dst", "sys"),
}


def _rebuild(t: Term, term_map, dim_map) -> Term:
    """Rebuild ``t`` applying ``term_map(sub, tb, db)`` to each subterm and
    ``dim_map`` to each raw dimension field.  Shares nodes when unchanged."""
    cls = type(t)
    changed = False
    kwargs = {}
    child_info = {name: (tb, db) for name, tb, db in _CHILDREN[cls]}
    dim_fields = _DIM_FIELDS.get(cls, ())
    for f in fields(t):
        old = getattr(t, f.name)
        if f.name in child_info:
            tb, db = child_info[f.name]
            new = term_map(old, tb, db)
        elif f.name in dim_fields:
            new = dim_map(old)
        else:
            new = old
        kwargs[f.name] = new
        changed = changed or new is not old
    return cls(**kwargs) if changed else t


# ---------------------------------------------------------------------------
# Dimension substitution
# ---------------------------------------------------------------------------

def _map_dim_levels(t: Term, f) -> Term:
    """Apply ``f`` to every dimension occurring in ``t``.

    Levels are absolute, so the map is uniform: crossing binders requires
    no adjustment (bound levels are strictly above every free level).
    """
    def on_term(sub, _tb, _db):
        return _map_dim_levels(sub, f)
    return _rebuild(t, on_term, f)


def subst_dim(t: Term, r: Dim, target: int) -> Term:
    """Instantiate dimension binder ``target`` with ``r``.

    The binder is removed: levels above ``target`` shift down by one, and
    the result is scoped in the shrunken cube (where ``r`` must live).
    """
    if target < 0:
        raise ScopeError(f"dimension level {target} out of scope")

    def f(d: Dim) -> Dim:
        if isinstance(d, DimVar):
            if d.level == target:
                return r
            if d.level > target:
                return DimVar(d.level - 1)
        return d

    return _map_dim_levels(t, f)


def shift_dim_from(t: Term, cutoff: int, by: int = 1) -> Term:
    """Shift every dimension level >= ``cutoff`` by ``by`` (binder insertion)."""
    def f(d: Dim) -> Dim:
        if isinstance(d, DimVar) and d.level >= cutoff:
            return DimVar(d.level + by)
        return d
    return _map_dim_levels(t, f)


def occurs_dim(t: Term, level: int) -> bool:
    """True iff the free dimension ``level`` occurs anywhere in ``t``."""
    found = False

    def f(d: Dim) -> Dim:
        nonlocal found
        if isinstance(d, DimVar) and d.level == level:
            found = True
        return d

    _map_dim_levels(t, f)
    return found


def free_dim_levels(t: Term, below: int | None = None) -> set:
    """Collect dimension levels occurring in ``t`` (optionally only < below)."""
    out: set = set()

    def f(d: Dim) -> Dim:
        if isinstance(d, DimVar) and (below is None or d.level < below):
            out.add(d.level)
        return d

    _map_dim_levels(t, f)
    return out


# ---------------------------------------------------------------------------
# Term substitution
# ---------------------------------------------------------------------------

def shift_tm(t: Term, by: int, cutoff: int = 0) -> Term:
    """Shift free term indices >= ``cutoff`` by ``by``."""
    if by == 0:
        return t
    if isinstance(t, Var):
        if t.index >= cutoff:
            if t.index + by < 0:
                raise ScopeError("negative index after shift")
            return Var(t.index + by)
        return t

    def on_term(sub, tb, _db):
        return shift_tm(sub, by, cutoff + tb)

    return _rebuild(t, on_term, lambda d: d)


def subst_tm(t: Term, v: Term, target: int = 0, dim_depth: int = 0) -> Term:
    """Substitute ``v`` for term index ``target``; indices above shift down.

    ``dim_depth`` is the ambient dimension depth ``t`` and ``v`` share.
    Dimension levels of ``v`` below it are free and stay put; levels at or
    above it belong to ``v``'s own binders and are bumped by the number of
    dimension binders crossed on the way to each occurrence, keeping the
    level discipline capture-free.  Term indices of ``v`` shift by the
    number of term binders crossed, as usual.
    """
    if target < 0:
        raise ScopeError(f"term index {target} out of scope")

    def go(u: Term, k: int, db: int) -> Term:
        if isinstance(u, Var):
            if u.index == k:
                out = shift_tm(v, k)
                return shift_dim_from(out, dim_depth, db) if db else out
            if u.index > k:
                return Var(u.index - 1)
            return u

        def on_term(sub, tb, dbn):
            return go(sub, k + tb, db + dbn)

        return _rebuild(u, on_term, lambda d: d)

    return go(t, target, 0)


def alpha_eq(a: Term, b: Term) -> bool:
    """Structural equality of de Bruijn representations, annotations included."""
    return a == b
