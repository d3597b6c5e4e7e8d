"""Decision procedure for the dimension theory of a cube.

Equality of dimensions under a cube's constraints is the least equivalence
relation containing the constraints; there are no function symbols, so a
plain union-find closure is complete.  An inconsistent cube (one whose
closure merges 0 and 1) is a *state*, not an error: every judgment holds
under a false constraint, and downstream checks consult :func:`consistent`
to short-circuit.

Instances are frozen after construction; queries never mutate, so a
``DimClasses`` may be shared freely across threads.  Levels outside the
cube (fresh dimensions introduced while going under binders) are singleton
classes, equal only to themselves.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Optional

from .syntax import Cube, CubeEq, Dim, DimConst, DimVar

__all__ = ["DimClasses", "build_classes", "decide_eq", "consistent"]

_tokens = itertools.count(1)

_C0 = -1  # union-find node for the constant 0
_C1 = -2  # union-find node for the constant 1


def _node(d: Dim) -> int:
    if isinstance(d, DimConst):
        return _C0 if d.eps == 0 else _C1
    return d.level


class DimClasses:
    """Frozen union-find over {0, 1} and the dimension binders of a cube.

    ``token`` identifies the constraint set; semantic values cache it to
    detect when they must be re-normalized under stronger constraints.
    """

    __slots__ = ("_root", "_const", "inconsistent", "num_dims", "token")

    def __init__(self, num_dims: int, pairs: Iterable[tuple] = ()):
        parent: dict = {_C0: _C0, _C1: _C1}
        for k in range(num_dims):
            parent[k] = k

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in pairs:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        self._root = {x: find(x) for x in parent}
        # Per root: the constant its class contains, if any.
        const: dict = {}
        for c, eps in ((_C0, 0), (_C1, 1)):
            r = self._root[c]
            const[r] = eps if r not in const else None  # None: both, i.e. 0=1
        self._const = const
        self.inconsistent = self._root[_C0] == self._root[_C1]
        self.num_dims = num_dims
        self.token = next(_tokens)

    def _find(self, d: Dim) -> int:
        n = _node(d)
        return self._root.get(n, n)

    def same_class(self, r: Dim, s: Dim) -> bool:
        if self.inconsistent:
            return True
        return self._find(r) == self._find(s)

    def const_of(self, r: Dim) -> Optional[int]:
        """The endpoint 0/1 that ``r`` is forced to equal, if any."""
        if isinstance(r, DimConst):
            return r.eps
        root = self._find(r)
        eps = self._const.get(root)
        if eps is None and root in self._const:
            return 0  # 0 = 1 here; either endpoint serves
        return eps

    def pairs(self) -> Iterable[tuple]:
        """The merges recorded in this structure (for extension)."""
        return [(x, r) for x, r in self._root.items() if x != r]

    def extended(self, r: Dim, s: Dim) -> "DimClasses":
        """A new structure with the extra constraint ``r = s``.

        The level space grows as needed, so constraints may mention fresh
        dimensions beyond the original cube.
        """
        hi = max([self.num_dims]
                 + [d.level + 1 for d in (r, s) if isinstance(d, DimVar)])
        return DimClasses(hi, list(self.pairs()) + [(_node(r), _node(s))])


def build_classes(cube: Cube) -> DimClasses:
    """Close a cube's constraints into equivalence classes (idempotent)."""
    pairs = [(_node(c.lhs), _node(c.rhs)) for c in cube.constraints()]
    return DimClasses(cube.num_dims, pairs)


def decide_eq(classes: DimClasses, r: Dim, s: Dim) -> bool:
    """True iff ``r`` and ``s`` are equal dimensions under the constraints.

    Under an inconsistent cube every equation holds.
    """
    return classes.same_class(r, s)


def consistent(classes: DimClasses) -> bool:
    """False iff the constraints force 0 = 1."""
    return not classes.inconsistent
