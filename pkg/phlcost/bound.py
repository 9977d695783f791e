# vim: set ai ts=4 sw=4 expandtab:
# pylint: disable=C0116,R0201
'''
Closed-form bound expressions such as "2*n*(1 + log(4/3, n))".

Operators + - * (or ·) / and ^, log(base, x), log(x) (natural), floor,
ceil, numerals and variables. Evaluation is in floating point; compare
against exact costs with bound_holds.
'''

import math
from fractions import Fraction

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from phlcost import config
from phlcost.errors import DomainError, ParseError, PhlError, UnboundVariable

BOUND_GRAMMAR = r'''
?start: sum

?sum: sum "+" prod          -> add
    | sum "-" prod          -> sub
    | prod

?prod: prod "*" unary       -> mul
     | prod "·" unary       -> mul
     | prod "/" unary       -> div
     | unary

?unary: "-" unary           -> neg
      | power

?power: atom "^" unary      -> pow
      | atom

?atom: NUMBER               -> number
     | NAME                 -> var
     | "log" "(" sum "," sum ")"  -> log
     | "log" "(" sum ")"    -> ln
     | "floor" "(" sum ")"  -> floor
     | "ceil" "(" sum ")"   -> ceil
     | "(" sum ")"

NAME: /[A-Za-z_][A-Za-z0-9_]*/
NUMBER: /[0-9]+(\.[0-9]+)?/

%import common.WS
%ignore WS
'''

_PARSER = Lark(BOUND_GRAMMAR, parser='lalr')

QUICKSORT_BOUND = '2*n*(1 + log(4/3, n))'


@v_args(inline=True)
class _Evaluator(Transformer):

    def __init__(self, env):
        super().__init__()
        self.env = env

    def number(self, token):
        return float(Fraction(str(token)))

    def var(self, token):
        name = str(token)
        if name not in self.env:
            raise UnboundVariable(name, token.line, token.column)
        return float(self.env[name])

    def add(self, left, right):
        return left + right

    def sub(self, left, right):
        return left - right

    def mul(self, left, right):
        return left * right

    def div(self, left, right):
        if right == 0:
            raise DomainError('division by zero')
        return left / right

    def neg(self, operand):
        return -operand

    def pow(self, base, exponent):
        try:
            return math.pow(base, exponent)
        except (ValueError, OverflowError) as exc:
            raise DomainError(f'{base} ^ {exponent}: {exc}') from exc

    def log(self, base, operand):
        if base <= 0 or base == 1:
            raise DomainError(f'log base {base}')
        if operand <= 0:
            raise DomainError(f'log of {operand}')
        return math.log(operand) / math.log(base)

    def ln(self, operand):
        if operand <= 0:
            raise DomainError(f'log of {operand}')
        return math.log(operand)

    def floor(self, operand):
        return float(math.floor(operand))

    def ceil(self, operand):
        return float(math.ceil(operand))


def eval_bound(text: str, env=None) -> float:
    '''Evaluate a bound expression.

    :param env: name -> number (int, Fraction or float).
    :raises ParseError: on malformed text or an unknown variable.
    :raises DomainError: on log of a non-positive number, a bad log base,
        or division by zero.'''
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as exc:
        raise ParseError('malformed bound expression',
            getattr(exc, 'line', None), getattr(exc, 'column', None)) from exc
    try:
        return _Evaluator(env or {}).transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, PhlError):
            raise exc.orig_exc from exc
        raise


def bound_holds(exact, bound: float, slack=None) -> bool:
    '''exact <= bound up to the configured float slack.'''
    slack = config.BOUND_SLACK if slack is None else slack
    return float(Fraction(exact)) <= bound + slack


def quicksort_cost(n: int) -> float:
    '''2n(1 + log_{4/3} n), and 0 for n = 0.'''
    if n == 0:
        return 0.0
    return eval_bound(QUICKSORT_BOUND, {'n': n})
