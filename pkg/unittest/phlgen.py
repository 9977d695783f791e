# vim: set ai ts=4 sw=4 expandtab:
'''Random closed source-level expressions, values and heaps for tests.

Only terms the parser can produce are generated: non-negative literals,
decimal rationals, and pairs, injections and lists folded into values
whenever their parts are values.'''

import json
import os
import sys
from fractions import Fraction

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

# pylint: disable=C0413
from phlcost import syntax as s
from phlcost.semantics import Heap

PROGRAMS = os.path.join(os.path.dirname(__file__), '..', 'programs')
NAMES = ('x', 'y', 'f', 'acc', 'l0')


def program_path(name):
    return os.path.join(PROGRAMS, name)


def read_program(name):
    with open(program_path(name), 'r', encoding='utf-8') as source:
        return source.read()


def read_expected(name):
    '''Known results for a program, from its .expect.json file.'''
    stem = os.path.splitext(name)[0]
    with open(program_path(stem + '.expect.json'), 'r', encoding='utf-8') as golden:
        return json.load(golden)


class AstGenerator:
    '''Generator over a seeded random.Random.'''

    def __init__(self, rng):
        self.rng = rng

    def literal(self):
        pick = self.rng.randrange(6)
        if pick == 0:
            return s.IntV(self.rng.randrange(0, 50))
        if pick == 1:
            return s.RatV(Fraction(self.rng.randrange(0, 40), 4))
        if pick == 2:
            return s.BoolV(self.rng.random() < 0.5)
        if pick == 3:
            return s.UNIT
        if pick == 4:
            return s.ListV(())
        return s.IntV(self.rng.randrange(0, 3))

    def value(self, depth=2):
        if depth <= 0 or self.rng.random() < 0.4:
            return self.literal()
        pick = self.rng.randrange(4)
        if pick == 0:
            return s.PairV(self.value(depth - 1), self.value(depth - 1))
        if pick == 1:
            return s.InjLV(self.value(depth - 1))
        if pick == 2:
            return s.InjRV(self.value(depth - 1))
        return s.ListV(tuple(self.value(depth - 1)
            for _ in range(self.rng.randrange(1, 4))))

    def binder(self):
        return None if self.rng.random() < 0.2 else self.rng.choice(NAMES)

    def expr(self, depth=4, bound=()):
        # pylint: disable=R0911,R0912
        rng = self.rng
        if depth <= 0 or rng.random() < 0.15:
            if bound and rng.random() < 0.6:
                return s.Var(rng.choice(sorted(bound)))
            return self.value(1)
        sub = lambda: self.expr(depth - 1, bound)
        pick = rng.randrange(17)
        if pick == 0:
            return s.If(sub(), sub(), sub())
        if pick == 1:
            name = self.binder()
            body = self.expr(depth - 1, set(bound) | {name} - {None})
            return s.mk_let(name, sub(), body)
        if pick == 2:
            return s.mk_seq(sub(), sub())
        if pick == 3:
            fname, xname = self.binder(), self.binder()
            inner = set(bound) | {fname, xname} - {None}
            return s.RecE(fname, xname, self.expr(depth - 1, inner))
        if pick == 4:
            return s.App(sub(), sub())
        if pick == 5:
            return s.BinOp(rng.choice(s.BINARY_OPS), sub(), sub())
        if pick == 6:
            return s.UnOp(rng.choice(s.UNARY_OPS), sub())
        if pick == 7:
            return s.mk_pair(sub(), sub())
        if pick == 8:
            return s.mk_list(sub() for _ in range(rng.randrange(1, 4)))
        if pick == 9:
            return s.mk_inl(sub()) if rng.random() < 0.5 else s.mk_inr(sub())
        if pick == 10:
            lvar, rvar = self.binder(), self.binder()
            return s.Match(sub(),
                lvar, self.expr(depth - 1, set(bound) | {lvar} - {None}),
                rvar, self.expr(depth - 1, set(bound) | {rvar} - {None}))
        if pick == 11:
            return s.Store(sub(), sub())
        if pick == 12:
            return s.Load(sub())
        if pick == 13:
            return s.AllocN(sub(), sub())
        if pick == 14:
            return s.CmpXchg(sub(), sub(), sub())
        if pick == 15:
            cls = rng.choice([s.Tick, s.Fork, s.ChooseUniform, s.ChooseWeighted,
                s.Free, s.Fst, s.Snd])
            return cls(sub())
        cls = rng.choice([s.Xchg, s.FAA])
        return cls(sub(), sub())

    def heap(self, cells=3):
        '''Heap holding literal values at base 0.'''
        contents = {s.Loc(0, i): self.value(1) for i in range(cells)}
        return Heap(contents, 1 if cells else 0)
