# vim: set ai ts=4 sw=4 expandtab:
# pylint: disable=C0116
'''
Small-step semantics of a single thread.

prim_step splits an expression into evaluation context and redex (right
to left, as HeapLang does) and lifts the head reduction of the redex
through the context. A result of None means the expression is a value or
is stuck; stuckness is never an exception.
'''

import dataclasses
import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from phlcost import config
from phlcost import syntax as s
from phlcost.dist import Dist, dirac, from_uniform, from_weighted
from phlcost.support import rational_str


class Heap:
    '''Persistent finite map Loc -> Value plus the next fresh base.

    Never mutated after construction; updates return a new Heap.'''
    __slots__ = ('_cells', 'next_base', '_key', '_hash')

    def __init__(self, cells=None, next_base=0):
        self._cells = dict(cells or {})
        self.next_base = next_base
        self._key = None
        self._hash = None

    def __len__(self):
        return len(self._cells)

    def __contains__(self, loc):
        return loc in self._cells

    def key(self):
        if self._key is None:
            self._key = (tuple(sorted(self._cells.items(),
                key=lambda kv: kv[0])), self.next_base)
        return self._key

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Heap):
            return NotImplemented
        return hash(self) == hash(other) and self.key() == other.key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return f'Heap({dict(self.key()[0])!r}, next_base={self.next_base})'

    def items(self):
        '''Cells sorted by location.'''
        return list(self.key()[0])

    def lookup(self, loc: s.Loc) -> Optional[s.Value]:
        return self._cells.get(loc)

    def store(self, loc: s.Loc, value: s.Value) -> 'Heap':
        assert loc in self._cells
        cells = dict(self._cells)
        cells[loc] = value
        return Heap(cells, self.next_base)

    def alloc(self, count: int, value: s.Value):
        '''Allocate count cells at a fresh base.

        :return tuple: (Heap, Loc of the first cell)'''
        assert count >= 1
        base = self.next_base
        cells = dict(self._cells)
        for offset in range(count):
            cells[s.Loc(base, offset)] = value
        return Heap(cells, base + 1), s.Loc(base, 0)

    def free(self, loc: s.Loc) -> 'Heap':
        cells = dict(self._cells)
        del cells[loc]
        return Heap(cells, self.next_base)

    def to_json(self) -> dict:
        return {f'{loc.base},{loc.offset}': s.pretty(v) for loc, v in self.items()}


EMPTY_HEAP = Heap()


@dataclass(frozen=True)
class StepOutcome:
    '''One branch of a step: reduct, heap after, tick cost, forked threads.'''
    reduct: s.Expr
    heap: Heap
    cost: Fraction = Fraction(0)
    forks: tuple = ()

    def with_reduct(self, reduct):
        return dataclasses.replace(self, reduct=reduct)


# Redexes whose head step reads or writes state, spawns, ticks or samples.
EFFECTFUL = (s.AllocN, s.Free, s.Load, s.Store, s.CmpXchg, s.Xchg, s.FAA,
    s.Fork, s.Tick, s.ChooseUniform, s.ChooseWeighted)


def _num(value):
    if isinstance(value, s.IntV):
        return value.z
    if isinstance(value, s.RatV):
        return value.r
    return None


def _mk_num(number):
    if isinstance(number, int):
        return s.IntV(number)
    return s.RatV(Fraction(number))


def comparable(value: s.Value) -> bool:
    '''Values containing no closure can be tested for equality.'''
    if isinstance(value, s.RecV):
        return False
    return all(comparable(c) for c in s.subterms(value))


def values_equal(left: s.Value, right: s.Value) -> Optional[bool]:
    '''Language-level equality; numbers compare numerically.

    :return: None when either side holds a closure.'''
    if not (comparable(left) and comparable(right)):
        return None
    return _equal(left, right)


def _equal(left, right):
    lnum, rnum = _num(left), _num(right)
    if lnum is not None and rnum is not None:
        return lnum == rnum
    if type(left) is not type(right):
        return False
    if isinstance(left, s.ListV):
        return len(left.items) == len(right.items) and \
            all(_equal(a, b) for a, b in zip(left.items, right.items))
    if isinstance(left, s.PairV):
        return _equal(left.first, right.first) and \
            _equal(left.second, right.second)
    if isinstance(left, (s.InjLV, s.InjRV)):
        return _equal(left.value, right.value)
    return left == right


def _unop(op, value):
    # pylint: disable=R0911
    number = _num(value)
    if op == 'neg':
        return None if number is None else _mk_num(-number)
    if op == 'not':
        return s.BoolV(not value.b) if isinstance(value, s.BoolV) else None
    if not isinstance(value, s.ListV):
        return None
    if op == 'length':
        return s.IntV(len(value.items))
    if not value.items:
        return None
    if op == 'head':
        return value.items[0]
    if op == 'tail':
        return s.ListV(value.items[1:])
    return None


def _binop(op, left, right):
    # pylint: disable=R0911,R0912
    lnum, rnum = _num(left), _num(right)
    if op == '=':
        equal = values_equal(left, right)
        return None if equal is None else s.BoolV(equal)
    if op in ('&&', '||'):
        if isinstance(left, s.BoolV) and isinstance(right, s.BoolV):
            return s.BoolV(left.b and right.b if op == '&&' else left.b or right.b)
        return None
    if op == '::':
        if isinstance(right, s.ListV):
            return s.ListV((left,) + right.items)
        return None
    if op == 'range':
        if isinstance(left, s.IntV) and isinstance(right, s.IntV):
            return s.ListV(tuple(s.IntV(i) for i in range(left.z, right.z)))
        return None
    if op == '+' and isinstance(left, s.LocV) and isinstance(right, s.IntV):
        return s.LocV(left.loc.shift(right.z))
    if lnum is None or rnum is None:
        return None
    if op == '<':
        return s.BoolV(lnum < rnum)
    if op == '<=':
        return s.BoolV(lnum <= rnum)
    if op == '/':
        if rnum == 0:
            return None
        return s.RatV(Fraction(lnum) / rnum)
    result = {'+': lambda: lnum + rnum,
              '-': lambda: lnum - rnum,
              '*': lambda: lnum * rnum}.get(op)
    if result is None:
        return None
    return _mk_num(result())


def _outcome(reduct, heap, cost=Fraction(0), forks=()):
    return dirac(StepOutcome(reduct, heap, cost, forks))


def _location(value, heap):
    if isinstance(value, s.LocV) and value.loc in heap:
        return value.loc
    return None


def head_step(expr: s.Expr, heap: Heap) -> Optional[Dist]:
    '''Reduce a redex whose evaluated positions already hold values.

    :return: Dist over StepOutcome, or None when stuck.'''
    # pylint: disable=R0911,R0912,R0914,R0915
    if isinstance(expr, s.RecE):
        if s.free_vars(expr):
            return None
        return _outcome(s.RecV(expr.f, expr.x, expr.body), heap)
    if isinstance(expr, s.App):
        closure = expr.fn
        if not isinstance(closure, s.RecV):
            return None
        # The parameter shadows the function name.
        body = s.subst(closure.body, closure.x, expr.arg)
        if closure.f != closure.x:
            body = s.subst(body, closure.f, closure)
        return _outcome(body, heap)
    if isinstance(expr, s.UnOp):
        result = _unop(expr.op, expr.operand)
        return None if result is None else _outcome(result, heap)
    if isinstance(expr, s.BinOp):
        result = _binop(expr.op, expr.left, expr.right)
        return None if result is None else _outcome(result, heap)
    if isinstance(expr, s.If):
        if not isinstance(expr.cond, s.BoolV):
            return None
        return _outcome(expr.then if expr.cond.b else expr.orelse, heap)
    if isinstance(expr, s.PairE):
        return _outcome(s.PairV(expr.first, expr.second), heap)
    if isinstance(expr, (s.Fst, s.Snd)):
        if not isinstance(expr.operand, s.PairV):
            return None
        pair = expr.operand
        return _outcome(pair.first if isinstance(expr, s.Fst) else pair.second,
            heap)
    if isinstance(expr, s.InjL):
        return _outcome(s.InjLV(expr.operand), heap)
    if isinstance(expr, s.InjR):
        return _outcome(s.InjRV(expr.operand), heap)
    if isinstance(expr, s.Match):
        scrutinee = expr.scrutinee
        if isinstance(scrutinee, s.InjLV):
            return _outcome(s.subst(expr.left_body, expr.left_var,
                scrutinee.value), heap)
        if isinstance(scrutinee, s.InjRV):
            return _outcome(s.subst(expr.right_body, expr.right_var,
                scrutinee.value), heap)
        return None
    if isinstance(expr, s.ListE):
        return _outcome(s.ListV(expr.items), heap)
    if isinstance(expr, s.AllocN):
        if not isinstance(expr.count, s.IntV) or expr.count.z < 1:
            return None
        heap2, loc = heap.alloc(expr.count.z, expr.init)
        return _outcome(s.LocV(loc), heap2)
    if isinstance(expr, s.Free):
        loc = _location(expr.operand, heap)
        return None if loc is None else _outcome(s.UNIT, heap.free(loc))
    if isinstance(expr, s.Load):
        loc = _location(expr.operand, heap)
        return None if loc is None else _outcome(heap.lookup(loc), heap)
    if isinstance(expr, s.Store):
        loc = _location(expr.target, heap)
        if loc is None:
            return None
        return _outcome(s.UNIT, heap.store(loc, expr.value))
    if isinstance(expr, s.Xchg):
        loc = _location(expr.target, heap)
        if loc is None:
            return None
        return _outcome(heap.lookup(loc), heap.store(loc, expr.value))
    if isinstance(expr, s.CmpXchg):
        loc = _location(expr.target, heap)
        if loc is None:
            return None
        old = heap.lookup(loc)
        equal = values_equal(old, expr.expected)
        if equal is None:
            return None
        heap2 = heap.store(loc, expr.desired) if equal else heap
        return _outcome(s.PairV(old, s.BoolV(equal)), heap2)
    if isinstance(expr, s.FAA):
        loc = _location(expr.target, heap)
        if loc is None or not isinstance(expr.amount, s.IntV):
            return None
        old = heap.lookup(loc)
        if not isinstance(old, s.IntV):
            return None
        return _outcome(old, heap.store(loc, s.IntV(old.z + expr.amount.z)))
    if isinstance(expr, s.Fork):
        return _outcome(s.UNIT, heap, forks=(expr.body,))
    if isinstance(expr, s.Tick):
        amount = _num(expr.amount)
        if amount is None or amount < 0:
            return None
        return _outcome(s.UNIT, heap, cost=Fraction(amount))
    if isinstance(expr, s.ChooseUniform):
        if not isinstance(expr.operand, s.ListV) or not expr.operand.items:
            return None
        return from_uniform(StepOutcome(v, heap) for v in expr.operand.items)
    if isinstance(expr, s.ChooseWeighted):
        return _choose_weighted(expr.operand, heap)
    return None


def _choose_weighted(operand, heap):
    if not isinstance(operand, s.ListV) or not operand.items:
        return None
    pairs = []
    for item in operand.items:
        if not isinstance(item, s.PairV):
            return None
        weight = _num(item.first)
        if weight is None or weight <= 0:
            return None
        pairs.append((weight, StepOutcome(item.second, heap)))
    return from_weighted(pairs)


def _eval_order(expr):
    return getattr(type(expr), 'EVAL_ORDER', ())


def _pending(expr):
    '''Next position to reduce, as (field, index) with index None for
    plain fields; None when the node itself is the redex.'''
    if isinstance(expr, s.ListE):
        for index in reversed(range(len(expr.items))):
            if not isinstance(expr.items[index], s.Value):
                return 'items', index
        return None
    for name in _eval_order(expr):
        if not isinstance(getattr(expr, name), s.Value):
            return name, None
    return None


def _plug(expr, position, child):
    name, index = position
    if index is None:
        return dataclasses.replace(expr, **{name: child})
    items = list(expr.items)
    items[index] = child
    return dataclasses.replace(expr, items=tuple(items))


def _child(expr, position):
    name, index = position
    value = getattr(expr, name)
    return value if index is None else value[index]


@functools.lru_cache(maxsize=1 << 16)
def prim_step(expr: s.Expr, heap: Heap) -> Optional[Dist]:
    '''One step of a thread: decompose, head-reduce, refill the context.

    :return: Dist over StepOutcome, or None for values and stuck terms.'''
    if isinstance(expr, s.Value):
        return None
    frames = []
    redex = expr
    position = _pending(redex)
    while position is not None:
        frames.append((redex, position))
        redex = _child(redex, position)
        position = _pending(redex)
    mu = head_step(redex, heap)
    if mu is None or not frames:
        return mu

    def refill(outcome):
        reduct = outcome.reduct
        for outer, at in reversed(frames):
            reduct = _plug(outer, at, reduct)
        return outcome.with_reduct(reduct)
    return mu.map(refill)


def decompose(expr: s.Expr):
    '''Evaluation-context split.

    :return tuple: (context depth, redex), or None for a value.'''
    if isinstance(expr, s.Value):
        return None
    depth = 0
    while True:
        position = _pending(expr)
        if position is None:
            return depth, expr
        expr = _child(expr, position)
        depth += 1


def redex_of(expr: s.Expr) -> Optional[s.Expr]:
    split = decompose(expr)
    return None if split is None else split[1]


def context_depth(expr: s.Expr) -> Optional[int]:
    split = decompose(expr)
    return None if split is None else split[0]


def reducible(expr: s.Expr, heap: Heap) -> bool:
    return prim_step(expr, heap) is not None


def is_stuck(expr: s.Expr, heap: Heap) -> bool:
    '''Not a value, and no step applies.'''
    return not isinstance(expr, s.Value) and prim_step(expr, heap) is None


def is_pure_step(expr: s.Expr, reduct: s.Expr) -> bool:
    '''True when expr steps to reduct deterministically, at zero cost,
    without forking, for every heap (the heap is left untouched).'''
    redex = redex_of(expr)
    if redex is None or isinstance(redex, EFFECTFUL):
        return False
    mu = prim_step(expr, EMPTY_HEAP)
    if mu is None or not mu.is_dirac():
        return False
    return mu.support()[0] == StepOutcome(reduct, EMPTY_HEAP)


def eval_pure(expr: s.Expr, fuel=None) -> Optional[s.Value]:
    '''Reduce by pure steps only.

    :return: The value reached, or None when an effectful or stuck redex
        is met or fuel runs out.'''
    fuel = config.PURE_FUEL if fuel is None else fuel
    for _ in range(fuel):
        if isinstance(expr, s.Value):
            return expr
        redex = redex_of(expr)
        if isinstance(redex, EFFECTFUL):
            logging.debug('eval_pure: effectful redex %s', type(redex).__name__)
            return None
        mu = prim_step(expr, EMPTY_HEAP)
        if mu is None:
            return None
        expr = mu.support()[0].reduct
    return expr if isinstance(expr, s.Value) else None


def step_trace(expr: s.Expr, heap: Heap) -> dict:
    '''JSON-ready record of a single step.'''
    split = decompose(expr)
    record = {'expr': s.pretty(expr)}
    if split is None:
        record['value'] = True
        return record
    depth, redex = split
    record['redex'] = s.pretty(redex)
    record['redex_kind'] = type(redex).__name__
    record['context_depth'] = depth
    mu = prim_step(expr, heap)
    if mu is None:
        record['stuck'] = True
        return record
    record['outcomes'] = [{
        'reduct': s.pretty(o.reduct),
        'prob': rational_str(p),
        'cost': rational_str(o.cost),
        'forks': [s.pretty(f) for f in o.forks],
        'heap': o.heap.to_json(),
    } for o, p in mu]
    return record
