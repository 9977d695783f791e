# vim: set ai ts=4 sw=4 expandtab:

import math
import unittest
from fractions import Fraction

import sympy

import phlgen  # pylint: disable=W0611
from phlcost.bound import QUICKSORT_BOUND, bound_holds, eval_bound, \
    quicksort_cost
from phlcost.errors import DomainError, ParseError, UnboundVariable


class TestEvalBound(unittest.TestCase):
    """ Bound expressions. """

    def test_arithmetic(self):
        self.assertEqual(eval_bound('1 + 2 * 3'), 7.0)
        self.assertEqual(eval_bound('(1 + 2) * 3'), 9.0)
        self.assertEqual(eval_bound('2 · 3'), 6.0)
        self.assertEqual(eval_bound('2 ^ 10'), 1024.0)
        self.assertEqual(eval_bound('-2 ^ 2'), -4.0)
        self.assertEqual(eval_bound('7 - 2 - 1'), 4.0)
        self.assertEqual(eval_bound('floor(2.5) + ceil(2.5)'), 5.0)

    def test_variables(self):
        self.assertEqual(eval_bound('2*m/p', {'m': 4, 'p': Fraction(1, 2)}), 16.0)

    def test_log(self):
        self.assertAlmostEqual(eval_bound('log(2, 8)'), 3.0)
        self.assertAlmostEqual(eval_bound('log(x)', {'x': math.e}), 1.0)

    def test_quicksort_bound(self):
        expected = 2 * 4 * (1 + sympy.log(4, sympy.Rational(4, 3)))
        self.assertAlmostEqual(eval_bound(QUICKSORT_BOUND, {'n': 4}),
            float(expected), places=9)
        self.assertEqual(quicksort_cost(0), 0.0)
        self.assertEqual(quicksort_cost(1), 2.0)

    def test_errors(self):
        with self.assertRaises(DomainError):
            eval_bound('log(0)')
        with self.assertRaises(DomainError):
            eval_bound('log(1, 5)')
        with self.assertRaises(DomainError):
            eval_bound('1 / (2 - 2)')
        with self.assertRaises(UnboundVariable) as ctx:
            eval_bound('n + 1')
        self.assertEqual(ctx.exception.name, 'n')
        with self.assertRaises(ParseError):
            eval_bound('2 +')

    def test_bound_holds(self):
        self.assertTrue(bound_holds(Fraction(29, 6), quicksort_cost(4)))
        self.assertTrue(bound_holds(Fraction(1, 3), 1 / 3))
        self.assertFalse(bound_holds(Fraction(17), 16.0))


class TestQuicksortLemmas(unittest.TestCase):
    """ Facts the quicksort bound rests on. """

    def test_good_pivot_step(self):
        # A pivot leaving at most 3n/4 on either side pays for its partition.
        for n in range(2, 200):
            for k in range(n):
                if max(k, n - 1 - k) > Fraction(3, 4) * n:
                    continue
                spent = (n - 1) + quicksort_cost(k) + quicksort_cost(n - 1 - k)
                self.assertLessEqual(spent, quicksort_cost(n), (n, k))

    def test_bad_pivot_step(self):
        for n in range(2, 200):
            for k in range(n):
                self.assertLessEqual(
                    quicksort_cost(k) + quicksort_cost(n - 1 - k),
                    quicksort_cost(n) + 1e-9, (n, k))

    def test_balanced_split_leaves_linear_slack(self):
        for n in range(2, 65):
            for k in range(math.ceil(n / 4), n * 3 // 4 + 1):
                self.assertLessEqual(
                    quicksort_cost(k) + quicksort_cost(n - k),
                    quicksort_cost(n) - 3 * n + 1e-9, (n, k))

    def test_any_split_superadditive(self):
        for n in range(2, 65):
            for k in range(1, n + 1):
                self.assertLessEqual(
                    quicksort_cost(k) + quicksort_cost(n - k),
                    quicksort_cost(n) + 1e-9, (n, k))

    def test_monotone(self):
        values = [quicksort_cost(n) for n in range(0, 100)]
        self.assertEqual(values, sorted(values))


if __name__ == '__main__':
    unittest.main()
