# vim: set ai ts=4 sw=4 expandtab:

import math
import unittest
from fractions import Fraction

from assertpy import assert_that

from phlgen import read_program
from phlcost import syntax as s
from phlcost.grammar import parse_program
from phlcost.montecarlo import draw_unit, estimate, sample_run, \
    trial_generator


def load(name):
    return parse_program(read_program(name))


class TestStreams(unittest.TestCase):
    """ Per-trial random streams. """

    def test_reproducible(self):
        first = [draw_unit(trial_generator(7, 3)) for _ in range(3)]
        second = [draw_unit(trial_generator(7, 3)) for _ in range(3)]
        self.assertEqual(first, second)

    def test_unit_range(self):
        generator = trial_generator(1, 0)
        for _ in range(1000):
            unit = draw_unit(generator)
            assert_that(unit).is_instance_of(Fraction)
            self.assertTrue(0 <= unit < 1)

    def test_trials_independent_of_count(self):
        program = load('coin_toss.phl')
        alone = sample_run(program, seed=11, trial=4)
        again = sample_run(program, seed=11, trial=4)
        self.assertEqual(alone.config.cost, again.config.cost)
        self.assertEqual(alone.steps, again.steps)


class TestSampleRun(unittest.TestCase):
    """ Single sampled executions. """

    def test_trace(self):
        run = sample_run(load('coin_toss.phl'), seed=0, trace=True)
        self.assertTrue(run.terminated)
        self.assertFalse(run.stuck)
        self.assertEqual(run.config.main_value(), s.UNIT)
        assert_that(run.trace).is_length(run.steps)
        self.assertEqual(sum(Fraction(r['cost']) for r in run.trace),
            run.config.cost)
        assert_that(run.config.cost).is_greater_than_or_equal_to(1)

    def test_stuck(self):
        run = sample_run(parse_program('tick 2 ;; 1 + true'), seed=0)
        self.assertTrue(run.stuck)
        self.assertFalse(run.terminated)
        self.assertEqual(run.config.cost, 2)

    def test_deep_recursion(self):
        run = sample_run(
            parse_program('(rec f n := if n = 0 then 0 else 1 + f (n - 1)) 800'),
            seed=0, max_steps=100000)
        self.assertTrue(run.terminated)
        self.assertEqual(run.config.main_value(), s.IntV(800))

    def test_truncated(self):

        run = sample_run(load('coin_toss.phl'), seed=0, max_steps=3)
        self.assertFalse(run.terminated)
        self.assertEqual(run.steps, 3)


class TestEstimate(unittest.TestCase):
    """ Monte Carlo estimates against exact expectations. """

    def assert_near(self, report, exact):
        stderr = report.sample_stddev / math.sqrt(report.trials)
        self.assertLess(abs(report.mean_cost - exact), 4 * stderr + 1e-12,
            report.to_json())

    def test_coin_toss(self):
        program = load('coin_toss.phl')
        for seed in (1, 2, 3):
            report = estimate(program, 20000, seed)
            self.assert_near(report, 2)
            self.assertLess(abs(report.mean_cost - 2), 0.05)
            self.assertEqual(report.truncated_fraction, 0)
            self.assertEqual(report.stuck_fraction, 0)
            self.assertEqual(float(report.exact_mean), report.mean_cost)

    def test_coin_toss_interval(self):
        program = load('coin_toss.phl')
        for seed in (1, 2, 3):
            report = estimate(program, 100000, seed, max_steps=200)
            self.assertTrue(report.contains(2), report.to_json())
            self.assertLess(abs(report.mean_cost - 2), 0.03)

    def test_needs_two_trials(self):
        with self.assertRaises(AssertionError):
            estimate(load('coin_toss.phl'), 1, 0)

    def test_deterministic(self):

        program = load('coin_toss.phl')
        first = estimate(program, 500, 42).to_json()
        second = estimate(program, 500, 42).to_json()
        self.assertEqual(first, second)

    def test_counter(self):
        report = estimate(load('counter.phl'), 4000, 5)
        self.assert_near(report, 14)

    def test_infinite_graph(self):
        report = estimate(load('toss_then_tick.phl'), 10000, 8)
        self.assert_near(report, 2)
        self.assertEqual(report.truncated_fraction, 0)

    def test_stuck_fraction(self):
        program = parse_program(
            'if ChooseUniform [true, false] then () else 1 + true')
        report = estimate(program, 2000, 3)
        assert_that(report.stuck_fraction).is_between(0.4, 0.6)

    def test_truncated_fraction(self):
        report = estimate(load('coin_toss.phl'), 50, 0, max_steps=3)
        self.assertEqual(report.truncated_fraction, 1.0)

    def test_confidence_interval(self):
        report = estimate(load('coin_toss.phl'), 1000, 9)
        low, high = report.ci95
        self.assertAlmostEqual((low + high) / 2, report.mean_cost)
        self.assertTrue(report.contains(report.mean_cost))
        self.assertFalse(report.contains(high + 1))


if __name__ == '__main__':
    unittest.main()
