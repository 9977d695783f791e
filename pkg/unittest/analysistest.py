# vim: set ai ts=4 sw=4 expandtab:

import functools
import os
import random
import unittest
from fractions import Fraction

from assertpy import assert_that

from phlgen import read_program
from phlcost import syntax as s
from phlcost.analysis import PostPotential, PotentialCertificate, Verdict, \
    adequacy_check, adequacy_sweep, certificate_from_solution, \
    check_certificate, composition_check, extend_certificate, pcost, \
    solve_expected_cost, terminal_rewards
from phlcost.bound import quicksort_cost
from phlcost.errors import CertificateError, GraphError, MissingNodePotential
from phlcost.execution import LEFTMOST, Config, explore_graph, tp_step_n
from phlcost.grammar import parse_program
from phlcost.semantics import EMPTY_HEAP, prim_step, redex_of


def load(name):
    return parse_program(read_program(name))


@functools.lru_cache(maxsize=None)
def truncated_cost(expr, heap, steps):
    '''Expected cost of the first steps steps, by path enumeration.'''
    if steps == 0:
        return Fraction(0)
    mu = prim_step(expr, heap)
    if mu is None:
        return Fraction(0)
    return sum((p * (o.cost + truncated_cost(o.reduct, o.heap, steps - 1))
                for o, p in mu), Fraction(0))


def quicksort_recurrence(n):
    '''Expected comparisons with the pivot left out of both halves.'''
    table = [Fraction(0)] * (n + 1)
    for size in range(2, n + 1):
        table[size] = (size - 1) + Fraction(2, size) * sum(table[:size])
    return table[n]


def tighten(cert, node, delta):
    potentials = dict(cert.node_potentials)
    potentials[node] += delta
    return PotentialCertificate(potentials, cert.claimed_bound, cert.post)


class TestExpectedCost(unittest.TestCase):
    """ Exact expected cost on scheduled graphs. """

    def test_coin_toss(self):
        graph = explore_graph(load('coin_toss.phl'), LEFTMOST)
        solution = solve_expected_cost(graph)
        self.assertEqual(solution.initial_value, 2)
        for node in graph.nodes:
            if node.terminal:
                self.assertEqual(solution.at(node.ident), 0)

    def test_counter(self):
        graph = explore_graph(load('counter.phl'), LEFTMOST)
        self.assertEqual(solve_expected_cost(graph).initial_value, 14)

    def test_qsort(self):
        graph = explore_graph(load('qsort.phl'), LEFTMOST)
        value = solve_expected_cost(graph).initial_value
        self.assertEqual(value, Fraction(29, 6))
        self.assertEqual(value, quicksort_recurrence(4))
        assert_that(float(value)).is_less_than_or_equal_to(quicksort_cost(4))

    def test_tick_scaling(self):
        def triple(expr):
            if isinstance(expr, s.Tick):
                return s.Tick(s.BinOp('*', s.IntV(3), expr.amount))
            return expr
        program = s.map_expr(load('coin_toss.phl'), triple)
        graph = explore_graph(program, LEFTMOST)
        self.assertEqual(solve_expected_cost(graph).initial_value, 6)

    def test_post_potential(self):
        graph = explore_graph(parse_program('ChooseUniform [1, 2, 3]'), LEFTMOST)
        post = PostPotential([(s.IntV(1), 3), (s.IntV(3), 6)], default=0)
        self.assertEqual(sorted(terminal_rewards(graph, post).values()), [0, 3, 6])
        self.assertEqual(solve_expected_cost(graph, post).initial_value, 3)

    def test_nonterminating(self):
        graph = explore_graph(parse_program('(rec f _ := f ()) ()'), LEFTMOST)
        self.assertEqual(solve_expected_cost(graph).initial_value,
            Verdict.NONTERMINATING)

    def test_stuck_reachable(self):
        for text in ('1 + true', 'tick 1 ;; fst 3',
                     'if ChooseUniform [true, false] then () else 1 + true'):
            graph = explore_graph(parse_program(text), LEFTMOST)
            self.assertEqual(solve_expected_cost(graph).initial_value,
                Verdict.STUCK_REACHABLE, text)

    def test_demonic_graph_rejected(self):
        graph = explore_graph(parse_program('fork (tick 1) ;; tick 2'))
        with self.assertRaises(GraphError):
            solve_expected_cost(graph)


class TestCertificate(unittest.TestCase):
    """ Local certificate checking. """

    def setUp(self):
        self.graph = explore_graph(load('coin_toss.phl'), LEFTMOST)
        self.exact = certificate_from_solution(solve_expected_cost(self.graph))

    def test_exact_accepted(self):
        report = check_certificate(self.graph, self.exact)
        self.assertTrue(report.accepted, report.to_json())
        self.assertEqual(report.nodes_checked, len(self.graph))
        self.assertEqual(self.exact.claimed_bound, 2)

    @staticmethod
    def _split(node, tails):
        '''2 before the tick, 1 between tick and toss, 0 after heads,
        tails after tails.'''
        if node.terminal:
            return Fraction(0)
        thread = node.config.threads[0]
        redex = redex_of(thread)
        if isinstance(redex, s.If) and isinstance(redex.cond, s.BoolV):
            return Fraction(0) if redex.cond.b else Fraction(tails)
        paid = isinstance(thread, s.App) and thread.arg == s.UNIT \
            and isinstance(thread.fn, (s.RecE, s.RecV)) \
            and thread.fn.f is None and thread.fn.x is None
        if paid or isinstance(redex, s.ChooseUniform):
            return Fraction(1)
        return Fraction(2)

    def _split_certificate(self, tails):
        return PotentialCertificate(
            {n.ident: self._split(n, tails) for n in self.graph.nodes},
            Fraction(2))

    def test_hand_split_accepted(self):
        cert = self._split_certificate(2)
        self.assertEqual(cert.node_potentials, self.exact.node_potentials)
        report = check_certificate(self.graph, cert)
        self.assertTrue(report.accepted, report.to_json())

    def test_hand_split_tails_overcharged(self):
        choice = [n.ident for n in self.graph.nodes
                  if isinstance(redex_of(n.config.threads[0]), s.ChooseUniform)]
        assert_that(choice).is_length(1)
        violations = check_certificate(self.graph,
            self._split_certificate(3)).violations
        assert_that(violations).is_length(1)
        self.assertEqual(violations[0].kind, 'step')
        self.assertEqual(violations[0].node, choice[0])
        self.assertEqual(violations[0].lhs, Fraction(3, 2))
        self.assertEqual(violations[0].rhs, 1)

    def test_raised_node_rejected(self):
        for node in range(len(self.graph)):
            cert = tighten(self.exact, node, 1)
            self.assertFalse(check_certificate(self.graph, cert).accepted, node)

    def test_lowered_node_rejected(self):
        for node in range(len(self.graph)):
            if self.exact.potential(node) == 0:
                continue
            cert = tighten(self.exact, node, Fraction(-1, 2))
            kinds = [v.kind for v in check_certificate(self.graph, cert).violations]
            assert_that(kinds).contains('step')

    def test_bound_violation(self):
        cert = PotentialCertificate(dict(self.exact.node_potentials),
            Fraction(3, 2))
        violations = check_certificate(self.graph, cert).violations
        assert_that(violations).is_length(1)
        self.assertEqual(violations[0].kind, 'bound')
        self.assertEqual(violations[0].lhs, 2)

    def test_missing_node(self):
        potentials = dict(self.exact.node_potentials)
        del potentials[len(self.graph) - 1]
        with self.assertRaises(MissingNodePotential):
            check_certificate(self.graph, PotentialCertificate(potentials, 2))

    def test_value_violation(self):
        graph = explore_graph(parse_program('1'), LEFTMOST)
        post = PostPotential([(s.IntV(1), 5)])
        cert = PotentialCertificate({0: Fraction(4)}, Fraction(4), post)
        kinds = [v.kind for v in check_certificate(graph, cert).violations]
        self.assertEqual(kinds, ['value'])

    def test_stuck_violation(self):
        graph = explore_graph(parse_program('1 + true'), LEFTMOST)
        cert = PotentialCertificate({0: Fraction(100)}, Fraction(100))
        kinds = [v.kind for v in check_certificate(graph, cert).violations]
        self.assertEqual(kinds, ['stuck'])

    def test_json_round_trip(self):
        post = PostPotential([(s.PairV(s.IntV(1), s.TRUE), Fraction(1, 2))], 1)
        cert = PotentialCertificate({0: Fraction(5, 2), 1: Fraction(0)},
            Fraction(3), post)
        back = PotentialCertificate.from_json(cert.to_json())
        self.assertEqual(back.node_potentials, cert.node_potentials)
        self.assertEqual(back.claimed_bound, 3)
        self.assertEqual(back.post(s.PairV(s.IntV(1), s.TRUE)), Fraction(1, 2))
        self.assertEqual(back.post(s.UNIT), 1)

    def test_json_layout(self):
        post = PostPotential([(s.IntV(1), 3)], Fraction(1, 2))
        cert = PotentialCertificate({0: Fraction(3)}, Fraction(3), post)
        self.assertEqual(cert.to_json(), {
            'bound': '3',
            'post': [{'pattern': '1', 'value': '3'}],
            'default': '1/2',
            'nodes': {'0': '3'}})
        back = PotentialCertificate.from_json({
            'bound': '5/2',
            'post': [{'pattern': '(1, true)', 'value': '2'}],
            'default': '1',
            'nodes': {'0': '5/2'}})
        self.assertEqual(back.post(s.PairV(s.IntV(1), s.TRUE)), 2)
        self.assertEqual(back.post(s.IntV(1)), 1)
        self.assertEqual(back.claimed_bound, Fraction(5, 2))

    def test_malformed_json(self):
        malformed = [
            {'nodes': {'0': '1'}},
            {'bound': '1', 'nodes': {'x': '1'}},
            {'bound': '1', 'nodes': {'0': '1'}, 'post': {'cases': []}},
            {'bound': '1', 'nodes': {'0': '1'}, 'post': ['()']},
            {'bound': '1', 'nodes': {'0': '1'}, 'post': [{'pattern': '()'}]},
            {'bound': '1', 'nodes': {'0': '1'},
             'post': [{'pattern': 'tick 1', 'value': '1'}]},
            {'bound': '1', 'nodes': {'0': '1'}, 'default': '-1'},
            {'bound': '1', 'nodes': ['1']},
            ['bound'],
        ]
        for obj in malformed:
            with self.assertRaises(CertificateError, msg=obj):
                PotentialCertificate.from_json(obj)


class TestExtendCertificate(unittest.TestCase):
    """ Completing potentials from anchor nodes. """

    def setUp(self):
        self.graph = explore_graph(load('counter.phl'), LEFTMOST)
        self.solution = solve_expected_cost(self.graph)
        self.calls = [n.ident for n in self.graph.nodes
                      if self._is_outer_call(n)]

    @staticmethod
    def _is_outer_call(node):
        redex = redex_of(node.config.threads[0])
        return isinstance(redex, s.App) and isinstance(redex.fn, s.RecV) \
            and redex.fn.f == 'incr_m' and isinstance(redex.arg, s.LocV)

    @staticmethod
    def _counter_potential(node):
        '''1/p per set bit plus 2/p per increment still to run, p = 1/2.'''
        args, head = [], node.config.threads[0]
        while isinstance(head, s.App):
            args.append(head.arg)
            head = head.fn
        assert isinstance(head, s.RecV) and len(args) == 4
        remaining = args[2]
        assert isinstance(remaining, s.IntV)
        set_bits = sum(1 for _, v in node.config.heap.items() if v == s.TRUE)
        return Fraction(2 * set_bits + 4 * remaining.z)

    def test_one_call_per_increment(self):
        assert_that(self.calls).is_length(5)

    def test_amortized_anchors_accepted(self):
        anchors = {i: self._counter_potential(self.graph.node(i))
                   for i in self.calls}
        self.assertEqual(sorted(anchors.values()), [2, 8, 10, 14, 16])
        cert = extend_certificate(self.graph, anchors, bound=16)
        self.assertEqual(cert.potential(self.graph.initial), 16)
        report = check_certificate(self.graph, cert)
        self.assertTrue(report.accepted, report.to_json())

    def test_slack_anchors_accepted(self):
        anchors = {i: self.solution.values[i] + 2 for i in self.calls}
        cert = extend_certificate(self.graph, anchors, bound=16)
        self.assertEqual(cert.potential(self.graph.initial), 16)
        self.assertTrue(check_certificate(self.graph, cert).accepted)

    def test_short_anchors_rejected(self):
        anchors = {i: self.solution.values[i] - 1 for i in self.calls}
        cert = extend_certificate(self.graph, anchors, bound=16)
        self.assertFalse(check_certificate(self.graph, cert).accepted)

    def test_unreachable_anchor(self):
        graph = explore_graph(parse_program('(rec f _ := f ()) ()'), LEFTMOST)
        with self.assertRaises(CertificateError):
            extend_certificate(graph, {})


class TestAdequacy(unittest.TestCase):
    """ Truncated executions. """

    def test_toss_then_tick(self):
        report = adequacy_check(load('toss_then_tick.phl'), 2, steps=200)
        self.assertTrue(report.ok)
        assert_that(report.expected_cost).is_greater_than(Fraction(19, 10))
        assert_that(report.expected_cost).is_less_than_or_equal_to(2)

    def test_coin_toss_sweep(self):
        program = load('coin_toss.phl')
        reports = adequacy_sweep(program, 2, steps=40, scheduler=LEFTMOST)
        assert_that(reports).is_length(41)
        previous = Fraction(0)
        for report in reports:
            self.assertEqual(report.expected_cost,
                truncated_cost(program, EMPTY_HEAP, report.steps))
            assert_that(report.expected_cost).is_greater_than_or_equal_to(previous)
            self.assertTrue(report.bound_ok)
            previous = report.expected_cost

    def test_bound_too_small(self):
        report = adequacy_check(load('coin_toss.phl'), 1, steps=60)
        self.assertFalse(report.bound_ok)
        self.assertFalse(report.ok)

    def test_postcondition(self):
        program = load('coin_toss.phl')
        phi = parse_program('rec _ v := v = ()')
        self.assertTrue(adequacy_check(program, 2, phi=phi, steps=30)
            .postcondition_ok)
        phi = parse_program('rec _ v := v = 1')
        report = adequacy_check(parse_program('ChooseUniform [1, 2]'), 0,
            phi=phi, steps=2)
        self.assertFalse(report.postcondition_ok)
        self.assertEqual(report.counterexample, '2')

    def test_post_potential_counts(self):
        post = PostPotential([], default=1)
        report = adequacy_check(parse_program('tick 1 ;; ()'), 2, post=post,
            steps=5)
        self.assertEqual(report.expected_cost, 2)
        self.assertTrue(report.ok)

    def test_progress(self):
        report = adequacy_check(parse_program('tick 1 ;; fst 3'), 10, steps=10)
        self.assertFalse(report.progress_ok)
        self.assertEqual(report.stuck_config['redex_kind'], 'Fst')
        self.assertTrue(report.bound_ok)

    def test_stuck_corpus_fails_progress(self):
        redexes = {
            'add_bool.phl': 'BinOp',
            'alloc_zero.phl': 'AllocN',
            'apply_unit.phl': 'App',
            'div_zero.phl': 'BinOp',
            'fst_int.phl': 'Fst',
            'load_unallocated.phl': 'Load',
            'negative_tick.phl': 'Tick',
            'use_after_free.phl': 'Load',
        }
        for name, kind in redexes.items():
            report = adequacy_check(load(os.path.join('stuck', name)), 100,
                steps=30)
            self.assertFalse(report.progress_ok, name)
            self.assertFalse(report.ok, name)
            self.assertEqual(report.stuck_config['redex_kind'], kind, name)
            self.assertEqual(report.stuck_config['thread'], 0, name)


class TestComposition(unittest.TestCase):
    """ Bind composition inequality. """

    def setUp(self):
        self.cfg = Config.initial(load('coin_toss.phl'))

    def test_holds(self):
        mu = tp_step_n(self.cfg, 3)
        kappa = lambda c: tp_step_n(c, 12)
        report = composition_check(mu, kappa, lambda c: 2)
        self.assertTrue(report.premise)
        self.assertTrue(report.holds)
        assert_that(report.lhs).is_less_than_or_equal_to(report.rhs)
        self.assertEqual(report.lhs, pcost(tp_step_n(self.cfg, 15)))

    def test_premise_fails(self):
        mu = tp_step_n(self.cfg, 3)
        report = composition_check(mu, lambda c: tp_step_n(c, 12),
            lambda c: 0)
        self.assertFalse(report.premise)
        # No tick has run after three steps, so the budget is zero.
        self.assertEqual(report.rhs, 0)
        self.assertFalse(report.holds)

    def test_random_instances(self):
        rng = random.Random(31)
        programs = [load(name) for name in
                    ('coin_toss.phl', 'toss_then_tick.phl', 'counter.phl')]
        for _ in range(100):
            cfg = Config.initial(rng.choice(programs))
            mu = tp_step_n(cfg, rng.randrange(12))
            steps = rng.randrange(1, 12)
            post = PostPotential([], Fraction(rng.randrange(3), 2))
            kappa = lambda c, n=steps: tp_step_n(c, n)
            slack = {}

            def potential(c, post=post, kappa=kappa, slack=slack):
                if c not in slack:
                    slack[c] = Fraction(rng.randrange(3), 4)
                return pcost(kappa(c), post) - c.cost + slack[c]
            report = composition_check(mu, kappa, potential, post)
            self.assertTrue(report.premise)
            self.assertTrue(report.holds, report)


if __name__ == '__main__':
    unittest.main()
