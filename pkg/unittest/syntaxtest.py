# vim: set ai ts=4 sw=4 expandtab:

import random
import unittest
from fractions import Fraction

from assertpy import assert_that

from phlgen import AstGenerator, read_program
from phlcost import syntax as s
from phlcost.errors import ParseError, UnboundVariable
from phlcost.grammar import apply_defines, parse_program, parse_value
from phlcost.semantics import eval_pure


class TestParse(unittest.TestCase):
    """ Concrete syntax to AST. """

    def test_literals(self):
        self.assertEqual(parse_program('42'), s.IntV(42))
        self.assertEqual(parse_program('0.25'), s.RatV(Fraction(1, 4)))
        self.assertEqual(parse_program('true'), s.TRUE)
        self.assertEqual(parse_program('()'), s.UNIT)
        self.assertEqual(parse_program('[]'), s.ListV(()))

    def test_value_folding(self):
        self.assertEqual(parse_program('(1, true)'),
            s.PairV(s.IntV(1), s.TRUE))
        self.assertEqual(parse_program('[1, 2]'),
            s.ListV((s.IntV(1), s.IntV(2))))
        self.assertEqual(parse_program('inl ()'), s.InjLV(s.UNIT))
        self.assertIsInstance(parse_program('(1 + 1, 2)'), s.PairE)

    def test_let_and_seq_desugar(self):
        expr = parse_program('let x := 1 in x')
        self.assertEqual(expr, s.App(s.RecE(None, 'x', s.Var('x')), s.IntV(1)))
        expr = parse_program('tick 1 ;; ()')
        self.assertEqual(expr, s.App(s.RecE(None, None, s.UNIT),
            s.Tick(s.IntV(1))))

    def test_curried_rec(self):
        expr = parse_program('rec f a b := a + b')
        self.assertEqual(expr, s.RecE('f', 'a', s.RecE(None, 'b',
            s.BinOp('+', s.Var('a'), s.Var('b')))))

    def test_choose_range(self):
        expr = parse_program('ChooseRange 0 3')
        self.assertEqual(expr, s.ChooseUniform(
            s.BinOp('range', s.IntV(0), s.IntV(3))))

    def test_else_branch_takes_sequence(self):
        expr = parse_program('if true then () else tick 1 ;; ()')
        assert_that(expr).is_instance_of(s.If)
        self.assertEqual(expr.orelse, s.mk_seq(s.Tick(s.IntV(1)), s.UNIT))

    def test_precedence(self):
        expr = parse_program('1 + 2 * 3 = 7')
        self.assertEqual(expr, s.BinOp('=', s.BinOp('+', s.IntV(1),
            s.BinOp('*', s.IntV(2), s.IntV(3))), s.IntV(7)))
        expr = parse_program('let l := ref 0 in l <- !l + 1')
        store = expr.fn.body
        self.assertEqual(store, s.Store(s.Var('l'),
            s.BinOp('+', s.Load(s.Var('l')), s.IntV(1))))

    def test_comments(self):
        self.assertEqual(parse_program('// nothing\n1 // one\n'), s.IntV(1))

    def test_keyword_prefix_is_a_name(self):
        expr = parse_program('let letter := 1 in letter')
        self.assertEqual(expr.fn.x, 'letter')

    def test_corpus_parses(self):
        for name in ('coin_toss.phl', 'toss_then_tick.phl', 'counter.phl',
                'qsort.phl', 'qsort_recurse_pivot.phl'):
            expr = parse_program(read_program(name))
            self.assertFalse(s.free_vars(expr), name)

    def test_parse_error_position(self):
        with self.assertRaises(ParseError) as ctx:
            parse_program('let x := 1 in\n  x +* 2')
        self.assertEqual(ctx.exception.line, 2)
        self.assertEqual(ctx.exception.column, 6)

    def test_unbound_variable(self):
        with self.assertRaises(UnboundVariable) as ctx:
            parse_program('let x := 1 in\ny')
        self.assertEqual(ctx.exception.name, 'y')
        self.assertEqual(ctx.exception.line, 2)
        self.assertEqual(ctx.exception.column, 1)

    def test_rec_binders_scope(self):
        parse_program('rec f x := f x')
        with self.assertRaises(UnboundVariable):
            parse_program('(rec f x := x) f')

    def test_parse_value(self):
        self.assertEqual(parse_value('(1, [true])'),
            s.PairV(s.IntV(1), s.ListV((s.TRUE,))))
        with self.assertRaises(ParseError):
            parse_value('1 + 1')

    def test_apply_defines(self):
        expr = parse_program('let n := 3 in let m := 4 in n + m')
        expr = apply_defines(expr, {'m': s.IntV(10)})
        self.assertEqual(expr, parse_program('let n := 3 in let m := 10 in n + m'))


class TestPretty(unittest.TestCase):
    """ Printing back to concrete syntax. """

    def test_examples(self):
        self.assertEqual(s.pretty(s.RatV(Fraction(1))), '1.0')
        self.assertEqual(s.pretty(s.RatV(Fraction(5, 4))), '1.25')
        self.assertEqual(s.pretty(parse_program('let x := 1 in x ;; x')),
            'let x := 1 in x ;; x')
        self.assertEqual(s.pretty(parse_program('(1 + 2) * 3')), '(1 + 2) * 3')
        self.assertEqual(s.pretty(s.Load(s.LocV(s.Loc(2, 1)))), '!#loc(2, 1)')

    def test_round_trip_generated(self):
        gen = AstGenerator(random.Random(1234))
        for _ in range(500):
            expr = gen.expr(5)
            text = s.pretty(expr)
            self.assertEqual(parse_program(text), expr, text)

    def test_runtime_values_reduce_back(self):
        closure = s.RecV('f', 'x', s.BinOp('+', s.Var('x'), s.IntV(1)))
        values = [
            s.IntV(-3),
            s.RatV(Fraction(1, 3)),
            s.RatV(Fraction(-1, 3)),
            s.RatV(Fraction(-1, 2)),
            s.PairV(s.IntV(-1), s.RatV(Fraction(2, 7))),
            s.ListV((s.IntV(-2), s.InjLV(s.RatV(Fraction(5, 3))))),
            closure,
            s.InjRV(closure),
        ]
        for value in values:
            text = s.pretty(value)
            self.assertEqual(eval_pure(parse_program(text)), value, text)
        self.assertEqual(s.pretty(s.IntV(-3)), '(-3)')
        self.assertEqual(parse_program('(-3)'), s.UnOp('neg', s.IntV(3)))
        self.assertIsInstance(parse_program(s.pretty(closure)), s.RecE)

    def test_round_trip_corpus(self):
        for name in ('coin_toss.phl', 'counter.phl', 'qsort.phl'):
            expr = parse_program(read_program(name))
            self.assertEqual(parse_program(s.pretty(expr)), expr)


class TestSubst(unittest.TestCase):
    """ Substitution and values. """

    def test_val_embedding(self):
        gen = AstGenerator(random.Random(3))
        for _ in range(100):
            value = gen.value(3)
            self.assertIs(s.to_val(s.of_val(value)), value)
        self.assertIsNone(s.to_val(s.Var('x')))

    def test_subst_free(self):
        expr = parse_program('rec f y := x + y', bound={'x'})
        result = s.subst(expr, 'x', s.IntV(5))
        self.assertEqual(result, parse_program('rec f y := 5 + y'))

    def test_subst_shadowed(self):
        expr = parse_program('rec f x := x', bound={'x'})
        self.assertIs(s.subst(expr, 'x', s.IntV(5)), expr)
        expr = parse_program('match v with inl x => x | inr y => x end',
            bound={'x', 'v'})
        result = s.subst(expr, 'x', s.IntV(1))
        self.assertEqual(result.left_body, s.Var('x'))
        self.assertEqual(result.right_body, s.IntV(1))

    def test_subst_closed_value(self):
        closure = s.RecV('f', 'x', s.Var('x'))
        self.assertIs(s.subst(closure, 'x', s.IntV(1)), closure)

    def test_subst_removes_variable(self):
        gen = AstGenerator(random.Random(77))
        for _ in range(200):
            expr = gen.expr(4, bound={'x'})
            result = s.subst(expr, 'x', gen.value(2))
            self.assertNotIn('x', s.free_vars(result))

    def test_locations(self):
        expr = s.PairE(s.LocV(s.Loc(3)), s.ListV((s.LocV(s.Loc(1, 2)),)))
        self.assertEqual(list(s.locations(expr)), [s.Loc(3), s.Loc(1, 2)])
        renamed = s.map_locations(expr, lambda loc: s.Loc(loc.base + 10, loc.offset))
        self.assertEqual(list(s.locations(renamed)), [s.Loc(13), s.Loc(11, 2)])

    def test_structural_equality(self):
        self.assertEqual(parse_program('(1 + 2, x)', bound={'x'}),
            parse_program('(1 + 2, x)', bound={'x'}))
        self.assertNotEqual(s.IntV(1), s.RatV(Fraction(1)))
        self.assertEqual(hash(s.IntV(1)), hash(s.IntV(1)))


if __name__ == '__main__':
    unittest.main()
