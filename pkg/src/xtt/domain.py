"""Semantic domain for normalization by evaluation.

Values are weak-head normal: canonical type formers, canonical terms, and
typed neutrals.  Dimensions inside values reuse the syntactic ``Dim``
representation (levels are absolute, so no quoting step is needed).

Closures come in two flavors: syntactic ``(body, env)`` pairs produced by
the evaluator, and host-function closures used by the Kan operations to
build composite values (fillers, tube reindexings) without synthesizing
de Bruijn syntax.  Both are applied through ``semantics.apply_tm`` /
``apply_dim``, which thread the evaluation context.

Every neutral carries its type, because two reduction rules are not
syntax-directed: dimension application at an endpoint returns the endpoint
stored in the Eq type, and eta laws need the type during readback.  The
``token`` field records which constraint set the neutral was normalized
against; ``semantics.force`` re-normalizes stale neutrals when conversion
strengthens the constraints (boundary-separation splitting).

Universe lifts have no value-level presence: evaluation erases them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

from .syntax import Dim, Term

__all__ = [
    "Env", "TmClo", "TmCloFn", "DimClo", "DimCloFn", "TmCloN",
    "Value", "VPi", "VSg", "VEq", "VBool", "VUniv",
    "VLam", "VPair", "VDimLam", "VTrue", "VFalse", "VNeutral",
    "Neutral", "NVar", "NApp", "NFst", "NSnd", "NPApp", "NIf",
    "NCoe", "NHCom", "NTypeCase", "KernelBug",
]


class KernelBug(Exception):
    """An evaluator invariant failed; only reachable from ill-typed input."""


@dataclass(frozen=True)
class Env:
    """Assignments for the cube (by level) and the telescope (by index)."""

    dims: Tuple[Dim, ...] = ()
    tms: Tuple["Value", ...] = ()

    def bind_dim(self, d: Dim) -> "Env":
        return Env(self.dims + (d,), self.tms)

    def bind_tm(self, v: "Value") -> "Env":
        return Env(self.dims, self.tms + (v,))

    def dim(self, level: int) -> Dim:
        return self.dims[level]

    def tm(self, index: int) -> "Value":
        return self.tms[-1 - index]


@dataclass(frozen=True)
class TmClo:
    body: Term  # one term variable beyond env's scope
    env: Env


@dataclass(frozen=True)
class TmCloFn:
    fn: Callable  # (Value, Ctx) -> Value


@dataclass(frozen=True)
class DimClo:
    body: Term  # one dimension beyond env's scope
    env: Env


@dataclass(frozen=True)
class DimCloFn:
    fn: Callable  # (Dim, Ctx) -> Value


@dataclass(frozen=True)
class TmCloN:
    body: Term
    env: Env
    arity: int


class Value:
    __slots__ = ()


@dataclass(frozen=True)
class VPi(Value):
    dom: Value
    cod: object  # TmClo | TmCloFn


@dataclass(frozen=True)
class VSg(Value):
    dom: Value
    cod: object


@dataclass(frozen=True)
class VEq(Value):
    line: object  # DimClo | DimCloFn
    lhs: Value
    rhs: Value


@dataclass(frozen=True)
class VBool(Value):
    pass


@dataclass(frozen=True)
class VUniv(Value):
    level: int


@dataclass(frozen=True)
class VLam(Value):
    clo: object


@dataclass(frozen=True)
class VPair(Value):
    fst: Value
    snd: Value


@dataclass(frozen=True)
class VDimLam(Value):
    clo: object


@dataclass(frozen=True)
class VTrue(Value):
    pass


@dataclass(frozen=True)
class VFalse(Value):
    pass


class Neutral:
    __slots__ = ()


@dataclass(frozen=True)
class VNeutral(Value):
    ne: Neutral
    ty: Value
    token: int  # constraint-set token this head was normalized under


@dataclass(frozen=True)
class NVar(Neutral):
    level: int


@dataclass(frozen=True)
class NApp(Neutral):
    fn: VNeutral
    arg: Value


@dataclass(frozen=True)
class NFst(Neutral):
    pair: VNeutral


@dataclass(frozen=True)
class NSnd(Neutral):
    pair: VNeutral


@dataclass(frozen=True)
class NPApp(Neutral):
    fn: VNeutral
    dim: Dim  # never endpoint-equal under the token's constraints


@dataclass(frozen=True)
class NIf(Neutral):
    motive: object  # TmClo | TmCloFn
    scrut: VNeutral
    on_true: Value
    on_false: Value


@dataclass(frozen=True)
class NCoe(Neutral):
    """Stuck coercion: the line's interior is neutral at a fresh dimension."""
    line: object
    src: Dim
    dst: Dim
    arg: Value


@dataclass(frozen=True)
class NHCom(Neutral):
    """Stuck composition: neutral type, base type, or mixed universe heads."""
    ty: Value
    src: Dim
    dst: Dim
    cap: Value
    sys: Dim
    tube0: object
    tube1: object


@dataclass(frozen=True)
class NTypeCase(Neutral):
    level: int
    motive: Value
    scrut: VNeutral
    on_pi: TmCloN
    on_sg: TmCloN
    on_eq: TmCloN
    on_bool: TmCloN
    on_univ: TmCloN
