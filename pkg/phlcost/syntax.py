# vim: set ai ts=4 sw=4 expandtab:
# pylint: disable=C0103,C0115,C0116
'''
Abstract syntax of probabilistic HeapLang.

Values are a subclass of expressions, so of_val is the identity and
to_val is a type test. Nodes are frozen dataclasses compared and hashed
structurally; hashes and free-variable sets are cached on the instance.
'''

import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from phlcost.support import decimal_str


@dataclass(frozen=True, order=True)
class Loc:
    '''Heap location: allocation base plus offset.'''
    base: int
    offset: int = 0

    def shift(self, delta: int) -> 'Loc':
        return Loc(self.base, self.offset + delta)

    def __str__(self):
        return f'#loc({self.base}, {self.offset})'


class Expr:
    '''Base of every syntax node.'''
    SUBTERMS = ()

    def _fields(self):
        return tuple(getattr(self, name) for name in _field_names(type(self)))

    def __eq__(self, other):
        pairs = [(self, other)]
        while pairs:
            left, right = pairs.pop()
            if left is right:
                continue
            if type(left) is not type(right):
                return False
            if isinstance(left, Expr):
                if hash(left) != hash(right):
                    return False
                pairs.extend(zip(left._fields(), right._fields()))
            elif isinstance(left, tuple):
                if len(left) != len(right):
                    return False
                pairs.extend(zip(left, right))
            elif left != right:
                return False
        return True

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        cached = self.__dict__.get('_hash')
        if cached is None:
            cached = _cache_bottom_up(self, '_hash',
                lambda e: hash((type(e).__name__,) + e._fields()))
        return cached

    def __str__(self):
        return pretty(self)


class Value(Expr):
    '''Irreducible, closed result of evaluation.'''


_FIELD_CACHE = {}


def _field_names(cls):
    names = _FIELD_CACHE.get(cls)
    if names is None:
        names = tuple(f.name for f in dataclasses.fields(cls))
        _FIELD_CACHE[cls] = names
    return names


def _cache_bottom_up(root, attr, compute):
    '''Store compute(e) as attribute attr on root and on every node below
    it that lacks one, children first. compute may read its children's
    attr. Iterative, so deep evaluation contexts do not exhaust the stack.'''
    stack = [(root, False)]
    while stack:
        expr, ready = stack.pop()
        if attr in expr.__dict__:
            continue
        if ready:
            object.__setattr__(expr, attr, compute(expr))
            continue
        stack.append((expr, True))
        stack.extend((c, False) for c in subterms(expr) if attr not in c.__dict__)
    return root.__dict__[attr]


def node(cls):
    '''Class decorator for syntax nodes.'''
    return dataclass(frozen=True, eq=False)(cls)


# Values

@node
class IntV(Value):
    z: int

@node
class RatV(Value):
    r: Fraction

@node
class BoolV(Value):
    b: bool

@node
class UnitV(Value):
    pass

@node
class LocV(Value):
    loc: Loc

@node
class ListV(Value):
    items: tuple
    SUBTERMS = ('items',)

@node
class PairV(Value):
    first: Value
    second: Value
    SUBTERMS = ('first', 'second')

@node
class InjLV(Value):
    value: Value
    SUBTERMS = ('value',)

@node
class InjRV(Value):
    value: Value
    SUBTERMS = ('value',)

@node
class RecV(Value):
    '''Closure; closed up to its binders f and x (None means "_").'''
    f: Optional[str]
    x: Optional[str]
    body: Expr
    SUBTERMS = ('body',)


# Expressions. EVAL_ORDER lists the fields reduced before the node
# itself, right to left.

@node
class Var(Expr):
    name: str

@node
class RecE(Expr):
    f: Optional[str]
    x: Optional[str]
    body: Expr
    SUBTERMS = ('body',)
    EVAL_ORDER = ()

@node
class App(Expr):
    fn: Expr
    arg: Expr
    SUBTERMS = ('fn', 'arg')
    EVAL_ORDER = ('arg', 'fn')

@node
class UnOp(Expr):
    op: str
    operand: Expr
    SUBTERMS = ('operand',)
    EVAL_ORDER = ('operand',)

@node
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr
    SUBTERMS = ('left', 'right')
    EVAL_ORDER = ('right', 'left')

@node
class If(Expr):
    cond: Expr
    then: Expr
    orelse: Expr
    SUBTERMS = ('cond', 'then', 'orelse')
    EVAL_ORDER = ('cond',)

@node
class PairE(Expr):
    first: Expr
    second: Expr
    SUBTERMS = ('first', 'second')
    EVAL_ORDER = ('second', 'first')

@node
class Fst(Expr):
    operand: Expr
    SUBTERMS = ('operand',)
    EVAL_ORDER = ('operand',)

@node
class Snd(Expr):
    operand: Expr
    SUBTERMS = ('operand',)
    EVAL_ORDER = ('operand',)

@node
class InjL(Expr):
    operand: Expr
    SUBTERMS = ('operand',)
    EVAL_ORDER = ('operand',)

@node
class InjR(Expr):
    operand: Expr
    SUBTERMS = ('operand',)
    EVAL_ORDER = ('operand',)

@node
class Match(Expr):
    scrutinee: Expr
    left_var: Optional[str]
    left_body: Expr
    right_var: Optional[str]
    right_body: Expr
    SUBTERMS = ('scrutinee', 'left_body', 'right_body')
    EVAL_ORDER = ('scrutinee',)

@node
class ListE(Expr):
    items: tuple
    SUBTERMS = ('items',)
    EVAL_ORDER = ('items',)

@node
class AllocN(Expr):
    count: Expr
    init: Expr
    SUBTERMS = ('count', 'init')
    EVAL_ORDER = ('init', 'count')

@node
class Free(Expr):
    operand: Expr
    SUBTERMS = ('operand',)
    EVAL_ORDER = ('operand',)

@node
class Load(Expr):
    operand: Expr
    SUBTERMS = ('operand',)
    EVAL_ORDER = ('operand',)

@node
class Store(Expr):
    target: Expr
    value: Expr
    SUBTERMS = ('target', 'value')
    EVAL_ORDER = ('value', 'target')

@node
class CmpXchg(Expr):
    target: Expr
    expected: Expr
    desired: Expr
    SUBTERMS = ('target', 'expected', 'desired')
    EVAL_ORDER = ('desired', 'expected', 'target')

@node
class Xchg(Expr):
    target: Expr
    value: Expr
    SUBTERMS = ('target', 'value')
    EVAL_ORDER = ('value', 'target')

@node
class FAA(Expr):
    target: Expr
    amount: Expr
    SUBTERMS = ('target', 'amount')
    EVAL_ORDER = ('amount', 'target')

@node
class Fork(Expr):
    body: Expr
    SUBTERMS = ('body',)
    EVAL_ORDER = ()

@node
class Tick(Expr):
    amount: Expr
    SUBTERMS = ('amount',)
    EVAL_ORDER = ('amount',)

@node
class ChooseUniform(Expr):
    operand: Expr
    SUBTERMS = ('operand',)
    EVAL_ORDER = ('operand',)

@node
class ChooseWeighted(Expr):
    operand: Expr
    SUBTERMS = ('operand',)
    EVAL_ORDER = ('operand',)


UNIT = UnitV()
TRUE = BoolV(True)
FALSE = BoolV(False)

# Keyword primitives taking a fixed number of atomic arguments.
PRIMITIVES = {
    'tick': Tick,
    'fork': Fork,
    'ChooseUniform': ChooseUniform,
    'ChooseWeighted': ChooseWeighted,
    'AllocN': AllocN,
    'Free': Free,
    'CmpXchg': CmpXchg,
    'Xchg': Xchg,
    'FAA': FAA,
    'fst': Fst,
    'snd': Snd,
}
PRIMITIVE_NAMES = {cls: name for name, cls in PRIMITIVES.items()}

UNARY_OPS = ('neg', 'not', 'head', 'tail', 'length')
BINARY_OPS = ('+', '-', '*', '/', '<', '<=', '=', '&&', '||', '::', 'range')


def to_val(expr: Expr) -> Optional[Value]:
    '''The expression as a value, or None.'''
    return expr if isinstance(expr, Value) else None


def of_val(value: Value) -> Expr:
    assert isinstance(value, Value)
    return value


def is_value(expr: Expr) -> bool:
    return isinstance(expr, Value)


def mk_pair(first, second):
    '''Pair node, folded to a value when both sides are values.'''
    if isinstance(first, Value) and isinstance(second, Value):
        return PairV(first, second)
    return PairE(first, second)


def mk_list(items):
    items = tuple(items)
    if all(isinstance(i, Value) for i in items):
        return ListV(items)
    return ListE(items)


def mk_inl(operand):
    return InjLV(operand) if isinstance(operand, Value) else InjL(operand)


def mk_inr(operand):
    return InjRV(operand) if isinstance(operand, Value) else InjR(operand)


def mk_let(name, bound, body):
    '''let x := e1 in e2 is (rec _ x := e2) e1.'''
    return App(RecE(None, name, body), bound)


def mk_seq(first, second):
    '''e1 ;; e2 is (rec _ _ := e2) e1.'''
    return App(RecE(None, None, second), first)


def subterms(expr: Expr):
    '''Direct children in source order.'''
    children = []
    for name in type(expr).SUBTERMS:
        child = getattr(expr, name)
        if isinstance(child, tuple):
            children.extend(child)
        else:
            children.append(child)
    return children


def map_children(expr: Expr, func) -> Expr:
    '''Rebuild expr with func applied to each direct child. Returns expr
    itself when nothing changed, so unchanged subtrees stay shared.'''
    changes = {}
    for name in type(expr).SUBTERMS:
        old = getattr(expr, name)
        if isinstance(old, tuple):
            new = tuple(func(c) for c in old)
            if any(n is not o for n, o in zip(new, old)):
                changes[name] = new
        else:
            new = func(old)
            if new is not old:
                changes[name] = new
    if not changes:
        return expr
    return dataclasses.replace(expr, **changes)


def map_expr(expr: Expr, func) -> Expr:
    '''Bottom-up rewrite: func sees each node after its children.'''
    return func(map_children(expr, lambda c: map_expr(c, func)))


def free_vars(expr: Expr) -> frozenset:
    cached = expr.__dict__.get('_fv')
    if cached is not None:
        return cached
    return _cache_bottom_up(expr, '_fv', _free_vars_here)


def _free_vars_here(expr):
    if isinstance(expr, Var):
        result = frozenset([expr.name])
    elif isinstance(expr, (RecE, RecV)):
        result = free_vars(expr.body) - {expr.f, expr.x}
    elif isinstance(expr, Match):
        result = free_vars(expr.scrutinee) \
            | (free_vars(expr.left_body) - {expr.left_var}) \
            | (free_vars(expr.right_body) - {expr.right_var})
    else:
        result = frozenset()
        for child in subterms(expr):
            result = result | free_vars(child)
    return result


def subst(expr: Expr, name: Optional[str], value: Value) -> Expr:
    '''Replace free occurrences of name by a closed value.

    Binders shadow; a None name (the "_" binder) substitutes nothing.'''
    if name is None or name not in free_vars(expr):
        return expr
    if isinstance(expr, Var):
        return value
    if isinstance(expr, RecE):
        return RecE(expr.f, expr.x, subst(expr.body, name, value))
    if isinstance(expr, Match):
        left = expr.left_body if expr.left_var == name \
            else subst(expr.left_body, name, value)
        right = expr.right_body if expr.right_var == name \
            else subst(expr.right_body, name, value)
        return Match(subst(expr.scrutinee, name, value),
            expr.left_var, left, expr.right_var, right)
    return map_children(expr, lambda c: subst(c, name, value))


def has_locations(expr: Expr) -> bool:
    cached = expr.__dict__.get('_locs')
    if cached is None:
        cached = _cache_bottom_up(expr, '_locs', lambda e: isinstance(e, LocV)
            or any(has_locations(c) for c in subterms(e)))
    return cached


def locations(expr: Expr):
    '''Locations mentioned in expr, pre-order, duplicates included.'''
    stack = [expr]
    while stack:
        current = stack.pop()
        if not has_locations(current):
            continue
        if isinstance(current, LocV):
            yield current.loc
        else:
            stack.extend(reversed(subterms(current)))


def map_locations(expr: Expr, func) -> Expr:
    '''Rename every location value through func.'''
    if not has_locations(expr):
        return expr
    if isinstance(expr, LocV):
        return LocV(func(expr.loc))
    return map_children(expr, lambda c: map_locations(c, func))


# Pretty printing. Each node renders at a precedence level; a child is
# parenthesized when its level is below what its position demands.

LV_EXPR, LV_STORE, LV_OR, LV_AND, LV_CMP, LV_CONS, LV_SUM, LV_PROD, \
    LV_UNARY, LV_APP, LV_ATOM = range(11)

INFIX_LEVELS = {
    '||': (LV_OR, LV_OR, LV_AND),
    '&&': (LV_AND, LV_AND, LV_CMP),
    '<': (LV_CMP, LV_CONS, LV_CONS),
    '<=': (LV_CMP, LV_CONS, LV_CONS),
    '=': (LV_CMP, LV_CONS, LV_CONS),
    '::': (LV_CONS, LV_SUM, LV_CONS),
    '+': (LV_SUM, LV_SUM, LV_PROD),
    '-': (LV_SUM, LV_SUM, LV_PROD),
    '*': (LV_PROD, LV_PROD, LV_UNARY),
    '/': (LV_PROD, LV_PROD, LV_UNARY),
}


def pretty(expr: Expr) -> str:
    '''Concrete syntax that parses back to expr for source-level terms.

    Runtime values are shown in display form: negative numbers, rationals
    and closures parse back to expressions (neg, division, rec) that
    reduce purely to the same value. Locations do not parse.'''
    memo = {}
    stack = [(expr, False)]
    while stack:
        current, ready = stack.pop()
        if id(current) in memo:
            continue
        if ready:
            memo[id(current)] = _render(current, memo)
            continue
        stack.append((current, True))
        stack.extend((c, False) for c in subterms(current) if id(c) not in memo)
    return _pp(expr, LV_EXPR, memo)


def _pp(expr, context, memo):
    text, level = memo[id(expr)]
    return f'({text})' if level < context else text


def _binder(name):
    return '_' if name is None else name


def _render_rec(expr, memo):
    binders = [_binder(expr.f), _binder(expr.x)]
    body = expr.body
    while isinstance(body, RecE) and body.f is None:
        binders.append(_binder(body.x))
        body = body.body
    return f'rec {" ".join(binders)} := {_pp(body, LV_EXPR, memo)}', LV_EXPR


def _render(expr, memo):
    # pylint: disable=R0911,R0912
    if isinstance(expr, Var):
        return expr.name, LV_ATOM
    if isinstance(expr, IntV):
        if expr.z < 0:
            return f'(-{-expr.z})', LV_ATOM
        return str(expr.z), LV_ATOM
    if isinstance(expr, RatV):
        text = decimal_str(expr.r)
        if text is None:
            text = f'{expr.r.numerator} / {expr.r.denominator}'
            return f'({text})', LV_ATOM
        return (f'({text})' if expr.r < 0 else text), LV_ATOM
    if isinstance(expr, BoolV):
        return ('true' if expr.b else 'false'), LV_ATOM
    if isinstance(expr, UnitV):
        return '()', LV_ATOM
    if isinstance(expr, LocV):
        return str(expr.loc), LV_ATOM
    if isinstance(expr, (ListV, ListE)):
        inner = ', '.join(_pp(i, LV_EXPR, memo) for i in expr.items)
        return f'[{inner}]', LV_ATOM
    if isinstance(expr, (PairV, PairE)):
        return f'({_pp(expr.first, LV_EXPR, memo)}, {_pp(expr.second, LV_EXPR, memo)})', \
            LV_ATOM
    if isinstance(expr, InjLV):
        return f'inl {_pp(expr.value, LV_ATOM, memo)}', LV_APP
    if isinstance(expr, InjRV):
        return f'inr {_pp(expr.value, LV_ATOM, memo)}', LV_APP
    if isinstance(expr, InjL):
        return f'inl {_pp(expr.operand, LV_ATOM, memo)}', LV_APP
    if isinstance(expr, InjR):
        return f'inr {_pp(expr.operand, LV_ATOM, memo)}', LV_APP
    if isinstance(expr, (RecV, RecE)):
        return _render_rec(expr, memo)
    if isinstance(expr, App):
        fn = expr.fn
        if isinstance(fn, RecE) and fn.f is None:
            if fn.x is None:
                return f'{_pp(expr.arg, LV_STORE, memo)} ;; {_pp(fn.body, LV_EXPR, memo)}', \
                    LV_EXPR
            return f'let {fn.x} := {_pp(expr.arg, LV_EXPR, memo)} in ' \
                f'{_pp(fn.body, LV_EXPR, memo)}', LV_EXPR
        return f'{_pp(fn, LV_APP, memo)} {_pp(expr.arg, LV_ATOM, memo)}', LV_APP
    if isinstance(expr, UnOp):
        if expr.op == 'neg':
            return f'-{_pp(expr.operand, LV_UNARY, memo)}', LV_UNARY
        return f'{expr.op} {_pp(expr.operand, LV_ATOM, memo)}', LV_APP
    if isinstance(expr, BinOp):
        if expr.op == 'range':
            return f'range {_pp(expr.left, LV_ATOM, memo)} ' \
                f'{_pp(expr.right, LV_ATOM, memo)}', LV_APP
        level, left, right = INFIX_LEVELS[expr.op]
        return f'{_pp(expr.left, left, memo)} {expr.op} {_pp(expr.right, right, memo)}', \
            level
    if isinstance(expr, If):
        return f'if {_pp(expr.cond, LV_EXPR, memo)} then {_pp(expr.then, LV_EXPR, memo)}' \
            f' else {_pp(expr.orelse, LV_EXPR, memo)}', LV_EXPR
    if isinstance(expr, Match):
        return f'match {_pp(expr.scrutinee, LV_EXPR, memo)} with ' \
            f'inl {_binder(expr.left_var)} => {_pp(expr.left_body, LV_EXPR, memo)} | ' \
            f'inr {_binder(expr.right_var)} => {_pp(expr.right_body, LV_EXPR, memo)}' \
            ' end', LV_EXPR
    if isinstance(expr, Load):
        return f'!{_pp(expr.operand, LV_ATOM, memo)}', LV_ATOM
    if isinstance(expr, Store):
        return f'{_pp(expr.target, LV_OR, memo)} <- {_pp(expr.value, LV_OR, memo)}', \
            LV_STORE
    name = PRIMITIVE_NAMES.get(type(expr))
    assert name is not None, f'no printer for {type(expr).__name__}'
    args = ' '.join(_pp(c, LV_ATOM, memo) for c in subterms(expr))
    return f'{name} {args}', LV_APP
