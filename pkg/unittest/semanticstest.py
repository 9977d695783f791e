# vim: set ai ts=4 sw=4 expandtab:

import glob
import os
import random
import unittest
from fractions import Fraction

from assertpy import assert_that

from phlgen import PROGRAMS, AstGenerator
from phlcost import syntax as s
from phlcost.grammar import parse_program
from phlcost.semantics import EMPTY_HEAP, Heap, StepOutcome, context_depth, \
    decompose, eval_pure, head_step, is_pure_step, is_stuck, prim_step, \
    reducible, redex_of, step_trace, values_equal


def run_det(expr, heap=EMPTY_HEAP, limit=10000):
    '''Run a deterministic thread to a value; returns (value, heap, cost).'''
    cost = Fraction(0)
    for _ in range(limit):
        if isinstance(expr, s.Value):
            return expr, heap, cost
        mu = prim_step(expr, heap)
        assert mu is not None, f'stuck at {s.pretty(expr)}'
        assert mu.is_dirac()
        outcome = mu.support()[0]
        expr, heap, cost = outcome.reduct, outcome.heap, cost + outcome.cost
    raise AssertionError('did not finish')


def evaluate(text):
    return run_det(parse_program(text))


class TestHeadStep(unittest.TestCase):
    """ Head reductions. """

    def test_values_irreducible(self):
        gen = AstGenerator(random.Random(99))
        for _ in range(200):
            value, heap = gen.value(3), gen.heap(gen.rng.randrange(4))
            self.assertIsNone(prim_step(value, heap))
            self.assertIsNone(decompose(value))

    def test_beta(self):
        self.assertEqual(evaluate('(rec f x := x + 1) 2')[0], s.IntV(3))

    def test_recursion(self):
        value, _, _ = evaluate(
            'let fact := rec fact n := if n = 0 then 1 else n * fact (n - 1) in '
            'fact 5')
        self.assertEqual(value, s.IntV(120))

    def test_deep_context(self):
        expr = parse_program(
            '(rec f n := if n = 0 then 0 else 1 + f (n - 1)) 1200')
        heap, deepest, depth = EMPTY_HEAP, expr, 0
        while not isinstance(expr, s.Value):
            split = decompose(expr)
            if split[0] > depth:
                depth, deepest = split[0], expr
            outcome = prim_step(expr, heap).support()[0]
            expr, heap = outcome.reduct, outcome.heap
        self.assertEqual(expr, s.IntV(1200))
        assert_that(depth).is_greater_than_or_equal_to(1200)
        assert_that(s.pretty(deepest)).starts_with('1 + (1 + (1 + ')
        self.assertFalse(s.free_vars(deepest))

    def test_parameter_shadows_function_name(self):
        self.assertEqual(evaluate('(rec x x := x) 7')[0], s.IntV(7))

    def test_arithmetic(self):
        self.assertEqual(evaluate('7 - 10')[0], s.IntV(-3))
        self.assertEqual(evaluate('1 / 3')[0], s.RatV(Fraction(1, 3)))
        self.assertEqual(evaluate('0.5 + 1')[0], s.RatV(Fraction(3, 2)))
        self.assertEqual(evaluate('2 * 0.5 = 1')[0], s.TRUE)
        self.assertEqual(evaluate('1 < 0.5')[0], s.FALSE)
        self.assertEqual(evaluate('-(2 + 1)')[0], s.IntV(-3))

    def test_boolean_and_lists(self):
        self.assertEqual(evaluate('true && not false')[0], s.TRUE)
        self.assertEqual(evaluate('false || false')[0], s.FALSE)
        self.assertEqual(evaluate('1 :: [2]')[0],
            s.ListV((s.IntV(1), s.IntV(2))))
        self.assertEqual(evaluate('length (range 2 5)')[0], s.IntV(3))
        self.assertEqual(evaluate('head (tail [1, 2, 3])')[0], s.IntV(2))

    def test_pairs_and_sums(self):
        self.assertEqual(evaluate('snd (1 + 1, 2 + 2)')[0], s.IntV(4))
        self.assertEqual(
            evaluate('match inr (1 + 1) with inl x => x | inr y => y * 10 end')[0],
            s.IntV(20))

    def test_structural_equality(self):
        self.assertEqual(evaluate('(1, [true]) = (1, [true])')[0], s.TRUE)
        self.assertEqual(evaluate('inl 1 = inr 1')[0], s.FALSE)
        self.assertIsNone(values_equal(s.RecV(None, 'x', s.Var('x')), s.UNIT))

    def test_heap_operations(self):
        value, heap, _ = evaluate(
            'let l := AllocN 2 0 in (l + 1) <- 5 ;; FAA l 3 ;; '
            '(Xchg l 9, !(l + 1))')
        self.assertEqual(value, s.PairV(s.IntV(3), s.IntV(5)))
        self.assertEqual(heap.lookup(s.Loc(0, 0)), s.IntV(9))
        self.assertEqual(heap.next_base, 1)

    def test_cmpxchg(self):
        value, heap, _ = evaluate(
            'let l := ref 1 in let r := CmpXchg l 1 2 in (r, !l)')
        self.assertEqual(value, s.PairV(s.PairV(s.IntV(1), s.TRUE), s.IntV(2)))
        value, _, _ = evaluate(
            'let l := ref 1 in let r := CmpXchg l 0 2 in (r, !l)')
        self.assertEqual(value, s.PairV(s.PairV(s.IntV(1), s.FALSE), s.IntV(1)))
        self.assertEqual(len(heap), 1)
        # Pair components evaluate right to left: the load runs first.
        value, _, _ = evaluate('let l := ref 1 in (CmpXchg l 1 2, !l)')
        self.assertEqual(value, s.PairV(s.PairV(s.IntV(1), s.TRUE), s.IntV(1)))

    def test_free(self):
        _, heap, _ = evaluate('let l := ref 1 in Free l')
        self.assertEqual(len(heap), 0)

    def test_tick_cost(self):
        _, _, cost = evaluate('tick 2 ;; tick 0.5 ;; ()')
        self.assertEqual(cost, Fraction(5, 2))

    def test_fork(self):
        mu = prim_step(parse_program('fork (tick 1)'), EMPTY_HEAP)
        self.assertEqual(mu.support(), [StepOutcome(s.UNIT, EMPTY_HEAP,
            Fraction(0), (s.Tick(s.IntV(1)),))])

    def test_choose_uniform(self):
        mu = head_step(s.ChooseUniform(s.ListV((s.IntV(1), s.IntV(1),
            s.IntV(2)))), EMPTY_HEAP)
        self.assertEqual(mu.prob(StepOutcome(s.IntV(1), EMPTY_HEAP)),
            Fraction(2, 3))

    def test_choose_weighted(self):
        mu = prim_step(parse_program('ChooseWeighted [(1, true), (0.5, false)]'),
            EMPTY_HEAP)
        self.assertEqual(mu.prob(StepOutcome(s.TRUE, EMPTY_HEAP)),
            Fraction(2, 3))

    def test_choose_range(self):
        mu = prim_step(parse_program('ChooseUniform [0, 1, 2]'), EMPTY_HEAP)
        self.assertEqual(len(mu), 3)
        expr = parse_program('ChooseRange 0 3')
        mu2 = prim_step(prim_step(expr, EMPTY_HEAP).support()[0].reduct,
            EMPTY_HEAP)
        self.assertEqual(mu, mu2)


class TestContexts(unittest.TestCase):
    """ Evaluation order and context lifting. """

    def test_right_to_left(self):
        value, _, _ = evaluate('let l := ref 0 in (l <- 1, l <- 2) ;; !l')
        self.assertEqual(value, s.IntV(1))

    def test_application_argument_first(self):
        value, _, _ = evaluate(
            'let l := ref 0 in (l <- 1 ;; rec _ x := x) (l <- 2 ;; 3) ;; !l')
        self.assertEqual(value, s.IntV(1))

    def test_decompose(self):
        expr = parse_program('1 + (2 * 3)')
        depth, redex = decompose(expr)
        self.assertEqual(depth, 1)
        self.assertEqual(redex, s.BinOp('*', s.IntV(2), s.IntV(3)))
        self.assertEqual(redex_of(expr), redex)
        self.assertEqual(context_depth(expr), 1)
        self.assertTrue(reducible(expr, EMPTY_HEAP))
        self.assertIsNone(decompose(s.IntV(7)))
        self.assertIsNone(context_depth(s.IntV(7)))
        self.assertFalse(reducible(s.IntV(7), EMPTY_HEAP))
        self.assertFalse(reducible(parse_program('1 + true'), EMPTY_HEAP))

    def test_context_preserves_outcomes(self):
        inner = parse_program('ChooseUniform [1, 2]')
        outer = s.BinOp('+', s.IntV(10), inner)
        mu_inner = prim_step(inner, EMPTY_HEAP)
        mu_outer = prim_step(outer, EMPTY_HEAP)
        self.assertEqual(len(mu_outer), len(mu_inner))
        for (o_in, p_in), (o_out, p_out) in zip(mu_inner, mu_outer):
            self.assertEqual(p_in, p_out)
            self.assertEqual(o_out.reduct, s.BinOp('+', s.IntV(10), o_in.reduct))

    def test_stuck_corpus(self):
        paths = sorted(glob.glob(os.path.join(PROGRAMS, 'stuck', '*.phl')))
        assert_that([os.path.basename(p) for p in paths]).contains(
            'negative_tick.phl', 'alloc_zero.phl', 'add_bool.phl',
            'load_unallocated.phl').is_length(8)
        for path in paths:
            with open(path, 'r', encoding='utf-8') as source:
                expr = parse_program(source.read())
            heap = EMPTY_HEAP
            while not is_stuck(expr, heap):
                self.assertFalse(isinstance(expr, s.Value), path)
                mu = prim_step(expr, heap)
                outcome = mu.support()[0]
                expr, heap = outcome.reduct, outcome.heap

    def test_stuck_primitives(self):
        for text in ('ChooseUniform []', 'ChooseWeighted [(0, true), (0, false)]',
                     'ChooseWeighted [(-1, true), (2, false)]', 'tick (-1)',
                     'AllocN 0 ()', 'tick true'):
            expr = parse_program(text)
            while not is_stuck(expr, EMPTY_HEAP):
                expr = prim_step(expr, EMPTY_HEAP).support()[0].reduct
            self.assertNotIsInstance(expr, s.Value)
            self.assertIsNone(head_step(expr, EMPTY_HEAP), text)


class TestPure(unittest.TestCase):
    """ Pure steps and pure evaluation. """

    def test_is_pure_step(self):
        expr = parse_program('1 + 2')
        self.assertTrue(is_pure_step(expr, s.IntV(3)))
        self.assertFalse(is_pure_step(expr, s.IntV(4)))
        self.assertFalse(is_pure_step(parse_program('tick 0'), s.UNIT))
        self.assertFalse(is_pure_step(parse_program('ChooseUniform [1]'),
            s.IntV(1)))
        self.assertFalse(is_pure_step(parse_program('ref 1'),
            s.LocV(s.Loc(0))))

    def test_eval_pure(self):
        phi = parse_program('rec _ v := v = ()')
        self.assertEqual(eval_pure(s.App(phi, s.UNIT)), s.TRUE)
        self.assertIsNone(eval_pure(parse_program('tick 1 ;; true')))
        self.assertIsNone(eval_pure(parse_program('(rec f x := f x) 0'), fuel=50))

    def test_step_trace(self):
        record = step_trace(parse_program('1 + ChooseUniform [2, 3]'),
            EMPTY_HEAP)
        assert_that(record).contains_entry({'redex_kind': 'ChooseUniform'})
        assert_that(record['outcomes']).is_length(2)
        self.assertEqual(record['outcomes'][0]['reduct'], '1 + 2')
        self.assertEqual(record['outcomes'][0]['prob'], '1/2')

    def test_heap_persistence(self):
        heap = Heap({s.Loc(0): s.IntV(1)}, 1)
        heap2 = heap.store(s.Loc(0), s.IntV(2))
        self.assertEqual(heap.lookup(s.Loc(0)), s.IntV(1))
        self.assertEqual(heap2.lookup(s.Loc(0)), s.IntV(2))
        self.assertEqual(heap, Heap({s.Loc(0): s.IntV(1)}, 1))


if __name__ == '__main__':
    unittest.main()
