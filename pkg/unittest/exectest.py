# vim: set ai ts=4 sw=4 expandtab:

import random
import unittest
from fractions import Fraction

from assertpy import assert_that

from phlgen import AstGenerator, read_expected, read_program
from phlcost import syntax as s
from phlcost.dist import dirac
from phlcost.errors import NodeLimitExceeded, ParseError, SupportLimitExceeded
from phlcost.execution import LEFTMOST, Config, Policy, Scheduler, \
    canonicalize, explore_graph, stuck_threads, tp_step, tp_step_n
from phlcost.grammar import parse_program
from phlcost.semantics import EMPTY_HEAP, Heap


class TestThreadPool(unittest.TestCase):
    """ Thread-pool steps. """

    def test_fork_appends_thread(self):
        cfg = Config.initial(parse_program('fork (tick 1) ;; 2'))
        mu = tp_step(cfg, 0)
        self.assertTrue(mu.is_dirac())
        cfg2 = mu.support()[0]
        assert_that(cfg2.threads).is_length(2)
        self.assertEqual(cfg2.threads[1], s.Tick(s.IntV(1)))
        mu = tp_step(cfg2, 1)
        cfg3 = mu.support()[0]
        self.assertEqual(cfg3.threads[1], s.UNIT)
        self.assertEqual(cfg3.cost, 1)

    def test_value_thread_does_not_step(self):
        cfg = Config((s.IntV(1), s.Tick(s.IntV(1))), EMPTY_HEAP)
        self.assertIsNone(tp_step(cfg, 0))
        self.assertFalse(cfg.is_final())
        self.assertEqual(cfg.main_value(), s.IntV(1))

    def test_stuck_threads(self):
        cfg = Config((s.IntV(1), parse_program('1 + true'), s.UNIT), EMPTY_HEAP)
        self.assertEqual(stuck_threads(cfg), [1])

    def test_step_n_deterministic(self):
        cfg = Config.initial(parse_program('tick 3 ;; 1 + 2'))
        mu = tp_step_n(cfg, 20)
        self.assertEqual(mu, dirac(Config((s.IntV(3),), EMPTY_HEAP,
            Fraction(3))))

    def test_step_n_composes(self):
        cfg = Config.initial(parse_program(read_program('coin_toss.phl')))
        for first, second in ((0, 5), (3, 4), (6, 6)):
            direct = tp_step_n(cfg, first + second)
            composed = tp_step_n(cfg, first).bind(
                lambda c, n=second: tp_step_n(c, n))
            self.assertEqual(direct, composed)
            self.assertEqual(direct.total(), 1)

    def test_step_n_composes_generated(self):
        gen = AstGenerator(random.Random(2718))
        checked = 0
        for _ in range(20):
            cfg = Config.initial(gen.expr(4))
            try:
                for first, second in ((0, 3), (2, 2), (3, 5)):
                    direct = tp_step_n(cfg, first + second, max_support=256)
                    composed = tp_step_n(cfg, first, max_support=256).bind(
                        lambda c, n=second: tp_step_n(c, n, max_support=256))
                    self.assertEqual(direct, composed, s.pretty(cfg.threads[0]))
            except SupportLimitExceeded:
                continue
            checked += 1
        assert_that(checked).is_greater_than_or_equal_to(10)


    def test_step_n_support_limit(self):
        cfg = Config.initial(parse_program(
            '(rec f n := f (n + ChooseUniform [0, 1])) 0'))
        with self.assertRaises(SupportLimitExceeded):
            tp_step_n(cfg, 60, max_support=4)


class TestScheduler(unittest.TestCase):
    """ Scheduler policies. """

    def test_parse(self):
        self.assertEqual(Scheduler.parse('leftmost').policy, Policy.LEFTMOST)
        self.assertEqual(Scheduler.parse('round-robin').policy,
            Policy.ROUND_ROBIN)
        fixed = Scheduler.parse('fixed:1,0,1')
        self.assertEqual(fixed.policy, Policy.FIXED)
        self.assertEqual(fixed.order, (1, 0, 1))
        for text in ('random', 'fixed', 'fixed:', 'fixed:a', 'fixed:0,,1'):
            with self.assertRaises(ParseError, msg=text):
                Scheduler.parse(text)

    def test_leftmost(self):
        self.assertEqual(LEFTMOST.select([1, 2], 3, 0), (1, 0))
        self.assertEqual(LEFTMOST.select([], 3, 0), (None, 0))

    def test_round_robin(self):
        rr = Scheduler(Policy.ROUND_ROBIN)
        self.assertEqual(rr.select([0, 1], 2, 0), (0, 1))
        self.assertEqual(rr.select([0, 1], 2, 1), (1, 2))
        self.assertEqual(rr.select([0], 2, 1), (0, 1))

    def test_fixed(self):
        fixed = Scheduler.parse('fixed:1,0')
        self.assertEqual(fixed.select([0, 1], 2, 0), (1, 1))
        self.assertEqual(fixed.select([0, 1], 2, 1), (0, 0))
        self.assertEqual(fixed.select([0], 2, 0), (0, 1))

    def test_round_robin_interleaves(self):
        program = parse_program(
            'let l := ref 0 in fork (FAA l 1) ;; FAA l 10 ;; FAA l 100 ;; !l')
        graph = explore_graph(program, Scheduler(Policy.ROUND_ROBIN))
        finals = [n for n in graph.nodes if n.terminal]
        assert_that(finals).is_length(1)
        self.assertEqual(finals[0].main_value(), s.IntV(111))
        for ident in range(len(graph)):
            assert_that(graph.actions[ident]).is_length(
                0 if graph.node(ident).terminal else 1)


class TestGraph(unittest.TestCase):
    """ Reachable configuration graphs. """

    def setUp(self):
        self.coin = parse_program(read_program('coin_toss.phl'))

    def test_coin_toss_finite(self):
        graph = explore_graph(self.coin, LEFTMOST)
        self.assertEqual(len(graph), read_expected('coin_toss.phl')['graph_nodes'])
        assert_that(len(graph)).is_less_than_or_equal_to(12)
        terminals = [n for n in graph.nodes if n.terminal]
        assert_that(terminals).is_length(1)
        self.assertEqual(terminals[0].main_value(), s.UNIT)
        self.assertEqual(graph.initial, 0)

    def test_coin_toss_has_cycle(self):
        graph = explore_graph(self.coin, LEFTMOST)
        initial_successors = set(graph.successors(0))
        seen, stack = set(), list(initial_successors)
        revisited = False
        while stack:
            ident = stack.pop()
            if ident in seen:
                revisited = True
                continue
            seen.add(ident)
            stack.extend(graph.successors(ident))
        self.assertTrue(revisited)

    def test_deterministic(self):
        first = explore_graph(self.coin, LEFTMOST).to_json()
        second = explore_graph(self.coin, LEFTMOST).to_json()
        self.assertEqual(first, second)

    def test_schedulers_agree_single_thread(self):
        reference = [n.config for n in explore_graph(self.coin, LEFTMOST).nodes]
        for text in ('round-robin', 'fixed:0'):
            graph = explore_graph(self.coin, Scheduler.parse(text))
            self.assertEqual([n.config for n in graph.nodes], reference, text)

    def test_demonic_graph_branches(self):
        graph = explore_graph(parse_program('fork (tick 1) ;; tick 2'))
        branching = [i for i in range(len(graph)) if len(graph.actions[i]) > 1]
        assert_that(branching).is_not_empty()
        for ident in branching:
            threads = [a.thread for a in graph.actions[ident]]
            self.assertEqual(threads, sorted(threads))

    def test_edges_sum_to_one(self):
        graph = explore_graph(self.coin, LEFTMOST)
        for actions in graph.actions.values():
            for action in actions:
                self.assertEqual(action.edges.total(), 1)
                assert_that(action.expected_cost()).is_greater_than_or_equal_to(0)

    def test_node_limit(self):
        program = parse_program('(rec f n := tick 1 ;; f (n + 1)) 0')
        with self.assertRaises(NodeLimitExceeded):
            explore_graph(program, LEFTMOST, max_nodes=50)


class TestCanonicalize(unittest.TestCase):
    """ Allocation-base renaming. """

    def test_first_use_order(self):
        heap = Heap({s.Loc(5): s.LocV(s.Loc(2)),
                     s.Loc(2): s.IntV(1),
                     s.Loc(9): s.UNIT}, 10)
        threads, heap2 = canonicalize((s.Load(s.LocV(s.Loc(5))),), heap)
        self.assertEqual(threads, (s.Load(s.LocV(s.Loc(0))),))
        self.assertEqual(heap2, Heap({s.Loc(0): s.LocV(s.Loc(1)),
                                      s.Loc(1): s.IntV(1),
                                      s.Loc(2): s.UNIT}, 3))

    def test_idempotent(self):
        heap = Heap({s.Loc(3, 1): s.IntV(4), s.Loc(3, 0): s.IntV(2)}, 4)
        once = canonicalize((s.LocV(s.Loc(3, 1)),), heap)
        self.assertEqual(canonicalize(*once), once)
        self.assertEqual(once[1].next_base, 1)

    def test_allocation_order_irrelevant(self):
        left = parse_program('let a := ref 1 in let b := ref 2 in Free a ;; !b')
        right = parse_program('let b := ref 2 in let a := ref 1 in Free a ;; !b')
        self.assertEqual(len(explore_graph(left, LEFTMOST)),
            len(explore_graph(right, LEFTMOST)))
        final_l = [n.config for n in explore_graph(left, LEFTMOST).nodes
            if n.terminal]
        final_r = [n.config for n in explore_graph(right, LEFTMOST).nodes
            if n.terminal]
        self.assertEqual(final_l, final_r)


if __name__ == '__main__':
    unittest.main()
