# vim: set ai ts=4 sw=4 expandtab:
'''
Finite probability distributions with exact rational weights.

The support is kept in insertion order (first occurrence wins when equal
elements merge), so every walk over a Dist is deterministic.
'''

from fractions import Fraction

from phlcost.errors import EmptyChoice, NonPositiveWeight
from phlcost.support import rational_str


class Dist:
    '''Finite distribution: element -> Fraction, strictly positive, sum 1.

    :param weights: Iterable of (element, probability) pairs. Equal
        elements are merged by summing.
    :param check: Verify the sum is exactly 1.
    '''
    __slots__ = ('_weights', '_cumulative')

    def __init__(self, weights, check=True):
        merged = {}
        for elem, prob in weights:
            prob = Fraction(prob)
            if prob == 0:
                continue
            assert prob > 0, f'negative probability {prob}'
            merged[elem] = merged.get(elem, Fraction(0)) + prob
        if check and sum(merged.values(), Fraction(0)) != 1:
            raise ValueError('distribution does not sum to 1')
        self._weights = merged
        self._cumulative = None

    def __len__(self):
        return len(self._weights)

    def __iter__(self):
        return iter(self._weights.items())

    def __eq__(self, other):
        if not isinstance(other, Dist):
            return NotImplemented
        return self._weights == other._weights

    def __repr__(self):
        body = ', '.join(f'{e!r}: {rational_str(p)}' for e, p in self)
        return f'Dist({{{body}}})'

    def items(self):
        return list(self._weights.items())

    def support(self):
        return list(self._weights)

    def prob(self, elem) -> Fraction:
        return self._weights.get(elem, Fraction(0))

    def total(self) -> Fraction:
        return sum(self._weights.values(), Fraction(0))

    def is_dirac(self) -> bool:
        return len(self._weights) == 1

    def bind(self, kappa):
        '''Giry bind: sum over x of mu(x) * kappa(x)(y).

        :param kappa: Callable element -> Dist.
        :return Dist:'''
        pairs = []
        for elem, prob in self._weights.items():
            inner = kappa(elem)
            assert isinstance(inner, Dist)
            for elem2, prob2 in inner:
                pairs.append((elem2, prob * prob2))
        return Dist(pairs, check=False)

    def map(self, func):
        '''Push forward through func; equal images merge.'''
        return Dist(((func(e), p) for e, p in self._weights.items()),
            check=False)

    def expect(self, func) -> Fraction:
        '''Expectation of a rational-valued function.'''
        return sum((p * Fraction(func(e)) for e, p in self._weights.items()),
            Fraction(0))

    def pick(self, unit: Fraction):
        '''Inverse CDF over the canonical order.

        :param unit: Exact rational in [0, 1).
        :return: The first element whose cumulative mass exceeds unit.'''
        if self._cumulative is None:
            running = Fraction(0)
            table = []
            for elem, prob in self._weights.items():
                running += prob
                table.append((running, elem))
            self._cumulative = table
        for bound, elem in self._cumulative:
            if unit < bound:
                return elem
        return self._cumulative[-1][1]

    def to_json(self, elem_json=str) -> list:
        '''JSON list of {"elem", "num", "den"} objects in support order.'''
        return [{'elem': elem_json(e),
                 'num': str(p.numerator),
                 'den': str(p.denominator)} for e, p in self._weights.items()]


def dirac(elem) -> Dist:
    '''Point mass at elem.'''
    return Dist([(elem, 1)])


def from_uniform(elems) -> Dist:
    '''Uniform over a list; duplicates merge.

    :raises EmptyChoice: on an empty list.'''
    elems = list(elems)
    if not elems:
        raise EmptyChoice('uniform choice over an empty list')
    share = Fraction(1, len(elems))
    return Dist((e, share) for e in elems)


def from_weighted(pairs) -> Dist:
    '''Normalized weighted distribution.

    :param pairs: Iterable of (weight, element).
    :raises EmptyChoice: on no pairs.
    :raises NonPositiveWeight: on a weight <= 0.'''
    pairs = [(Fraction(w), e) for w, e in pairs]
    if not pairs:
        raise EmptyChoice('weighted choice over an empty list')
    for weight, _ in pairs:
        if weight <= 0:
            raise NonPositiveWeight(f'weight {weight} is not positive')
    total = sum((w for w, _ in pairs), Fraction(0))
    return Dist((e, w / total) for w, e in pairs)


def bind(mu: Dist, kappa) -> Dist:
    return mu.bind(kappa)


def expect(mu: Dist, func) -> Fraction:
    return mu.expect(func)


def map(mu: Dist, func) -> Dist:  # pylint: disable=W0622
    return mu.map(func)
