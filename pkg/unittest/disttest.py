# vim: set ai ts=4 sw=4 expandtab:

import random
import unittest
from fractions import Fraction

from assertpy import assert_that

import phlgen  # pylint: disable=W0611
from phlcost import dist
from phlcost.dist import Dist, bind, dirac, expect, from_uniform, from_weighted
from phlcost.errors import EmptyChoice, NonPositiveWeight


def random_dist(rng, size=None):
    size = size or rng.randrange(1, 5)
    weights = [(rng.randrange(10), rng.randrange(1, 6)) for _ in range(size)]
    return from_weighted((w, e) for e, w in weights)


class TestDist(unittest.TestCase):
    """ Finite distributions over exact rationals. """

    def test_dirac(self):
        mu = dirac('a')
        self.assertEqual(mu.prob('a'), 1)
        self.assertEqual(mu.prob('b'), 0)
        self.assertTrue(mu.is_dirac())

    def test_uniform_merges_duplicates(self):
        mu = from_uniform([1, 1, 2])
        self.assertEqual(mu.prob(1), Fraction(2, 3))
        self.assertEqual(mu.prob(2), Fraction(1, 3))
        self.assertEqual(mu.support(), [1, 2])

    def test_uniform_empty(self):
        with self.assertRaises(EmptyChoice):
            from_uniform([])

    def test_weighted_normalizes(self):
        mu = from_weighted([(Fraction(1, 2), 'h'), (Fraction(3, 2), 't')])
        self.assertEqual(mu.prob('h'), Fraction(1, 4))
        self.assertEqual(mu.prob('t'), Fraction(3, 4))

    def test_weighted_rejects(self):
        with self.assertRaises(NonPositiveWeight):
            from_weighted([(0, 'a'), (1, 'b')])
        with self.assertRaises(NonPositiveWeight):
            from_weighted([(-1, 'a')])
        with self.assertRaises(EmptyChoice):
            from_weighted([])

    def test_invalid_total(self):
        with self.assertRaises(ValueError):
            Dist([('a', Fraction(1, 2))])

    def test_probabilities_sum_to_one(self):
        rng = random.Random(11)
        for _ in range(100):
            mu = random_dist(rng)
            self.assertEqual(mu.total(), 1)
            assert_that([p for _, p in mu]).does_not_contain(Fraction(0))

    def test_monad_laws(self):
        rng = random.Random(2024)
        table = {k: random_dist(rng) for k in range(10)}
        kappa = table.__getitem__
        lam = lambda x: table[(x * 7 + 3) % 10]
        for _ in range(100):
            mu = random_dist(rng)
            self.assertEqual(bind(dirac(3), kappa), kappa(3))
            self.assertEqual(bind(mu, dirac), mu)
            self.assertEqual(bind(bind(mu, kappa), lam),
                bind(mu, lambda x: bind(kappa(x), lam)))

    def test_expect_linear(self):
        rng = random.Random(5)
        for _ in range(50):
            mu = random_dist(rng)
            a, b = Fraction(rng.randrange(-5, 6), 3), Fraction(rng.randrange(7))
            self.assertEqual(expect(mu, lambda x: a * x + b),
                a * expect(mu, lambda x: x) + b)

    def test_map_merges(self):
        mu = from_uniform([1, 2, 3, 4]).map(lambda x: x % 2)
        self.assertEqual(mu, Dist([(1, Fraction(1, 2)), (0, Fraction(1, 2))]))

    def test_map_is_bind_with_dirac(self):
        rng = random.Random(17)
        for _ in range(50):
            mu = random_dist(rng)
            func = lambda x: (x * 3) % 4
            self.assertEqual(dist.map(mu, func), bind(mu, lambda x: dirac(func(x))))
            self.assertEqual(expect(dist.map(mu, func), lambda y: y),
                expect(mu, func))


    def test_pick_inverse_cdf(self):
        mu = from_weighted([(1, 'a'), (3, 'b')])
        self.assertEqual(mu.pick(Fraction(0)), 'a')
        self.assertEqual(mu.pick(Fraction(1, 5)), 'a')
        self.assertEqual(mu.pick(Fraction(1, 4)), 'b')
        self.assertEqual(mu.pick(Fraction(99, 100)), 'b')

    def test_json(self):
        mu = from_weighted([(1, 'a'), (2, 'b')])
        self.assertEqual(mu.to_json(), [
            {'elem': 'a', 'num': '1', 'den': '3'},
            {'elem': 'b', 'num': '2', 'den': '3'}])


if __name__ == '__main__':
    unittest.main()
