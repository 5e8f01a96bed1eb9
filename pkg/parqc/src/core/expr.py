"""A small integer expression language used by the simplifier benchmark."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Union

from .gen import Gen, frequency, gen_int, int_measure, shrink_int
from .rng import Seed, bounded, split

DEFAULT_ENV = (3, -2, 5)


@dataclass(frozen=True)
class Lit:
    value: int


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class IfZero:
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"


Expr = Union[Lit, Var, Add, Mul, IfZero]


def children(e: Expr) -> List[Expr]:
    if isinstance(e, (Add, Mul)):
        return [e.left, e.right]
    if isinstance(e, IfZero):
        return [e.cond, e.then, e.orelse]
    return []


def node_count(e: Expr) -> int:
    return 1 + sum(node_count(c) for c in children(e))


def expr_measure(e: Expr) -> int:
    """Constructor count plus literal magnitudes; strictly decreases along shrinks."""
    if isinstance(e, Lit):
        return 1 + int_measure(e.value)
    return 1 + sum(expr_measure(c) for c in children(e))


def pretty(e: Expr) -> str:
    if isinstance(e, Lit):
        return f"(lit {e.value})"
    if isinstance(e, Var):
        return f"(var {e.index})"
    name = {Add: "add", Mul: "mul", IfZero: "ifz"}[type(e)]
    return "(" + " ".join([name] + [pretty(c) for c in children(e)]) + ")"


def evaluate(e: Expr, env: Sequence[int] = DEFAULT_ENV) -> int:
    if isinstance(e, Lit):
        return e.value
    if isinstance(e, Var):
        return env[e.index % len(env)]
    if isinstance(e, Add):
        return evaluate(e.left, env) + evaluate(e.right, env)
    if isinstance(e, Mul):
        return evaluate(e.left, env) * evaluate(e.right, env)
    if evaluate(e.cond, env) == 0:
        return evaluate(e.then, env)
    return evaluate(e.orelse, env)


def simplify(e: Expr, planted_bug: bool = False) -> Expr:
    """Bottom-up algebraic simplification.

    With ``planted_bug`` the distribution rule drops the second product:
    ``x * (y + z)`` becomes ``x * y + z``.
    """
    if isinstance(e, (Lit, Var)):
        return e
    if isinstance(e, IfZero):
        cond = simplify(e.cond, planted_bug)
        then = simplify(e.then, planted_bug)
        orelse = simplify(e.orelse, planted_bug)
        if isinstance(cond, Lit):
            return then if cond.value == 0 else orelse
        if then == orelse:
            return then
        return IfZero(cond, then, orelse)

    left = simplify(e.left, planted_bug)
    right = simplify(e.right, planted_bug)
    if isinstance(left, Lit) and isinstance(right, Lit):
        return Lit(left.value + right.value if isinstance(e, Add) else left.value * right.value)
    if isinstance(e, Add):
        if left == Lit(0):
            return right
        if right == Lit(0):
            return left
        return Add(left, right)
    if left == Lit(0) or right == Lit(0):
        return Lit(0)
    if left == Lit(1):
        return right
    if right == Lit(1):
        return left
    if isinstance(right, Add):
        if planted_bug:
            return Add(Mul(left, right.left), right.right)
        return Add(Mul(left, right.left), Mul(left, right.right))
    return Mul(left, right)


def shrink_expr(e: Expr) -> List[Expr]:
    """Subterms first, then each field shrunk in place."""
    if isinstance(e, Var):
        return []
    if isinstance(e, Lit):
        return [Lit(v) for v in shrink_int(e.value)]
    kids = children(e)
    out: List[Expr] = list(kids)
    rebuild = type(e)
    for i, kid in enumerate(kids):
        for smaller in shrink_expr(kid):
            out.append(rebuild(*kids[:i], smaller, *kids[i + 1:]))
    return out


def gen_expr(num_vars: int = len(DEFAULT_ENV), lit_range: int = 9) -> Gen[Expr]:
    """Expressions whose node count grows with the size."""
    leaf = frequency([
        (2, gen_int(-lit_range, lit_range).map(Lit)),
        (1, gen_int(0, num_vars - 1).map(Var)),
    ])

    def tree(budget: int) -> Gen[Expr]:
        if budget <= 1:
            return leaf

        def binary(ctor: type) -> Gen[Expr]:
            def run(seed: Seed, size: int) -> Expr:
                seed, ls = split(seed)
                _, rs = split(seed)
                half = budget // 2
                return ctor(tree(half).run(ls, size), tree(budget - half - 1).run(rs, size))

            return Gen(run)

        def ifzero(seed: Seed, size: int) -> Expr:
            seed, cs = split(seed)
            seed, ts = split(seed)
            _, es = split(seed)
            third = max(1, budget // 3)
            return IfZero(tree(third).run(cs, size), tree(third).run(ts, size), tree(third).run(es, size))

        return frequency([(1, leaf), (3, binary(Add)), (3, binary(Mul)), (1, Gen(ifzero))])

    def run(seed: Seed, size: int) -> Expr:
        budget, seed = bounded(seed, 0, max(0, size))
        return tree(budget).run(seed, size)

    return Gen(run)
