# vim: set ai ts=4 sw=4 expandtab:
# pylint: disable=C0116,R0201,R0904
'''
Concrete syntax: lark grammar, scope check and AST construction.

Sugar handled here: let, ";;", list literals, ChooseRange, ref, "//"
comments and decimal literals (read as exact rationals).
'''

import logging
from fractions import Fraction

from lark import Lark, Token, Transformer, Tree, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, \
    UnexpectedInput, UnexpectedToken

from phlcost import syntax as s
from phlcost.errors import ParseError, UnboundVariable

PHL_GRAMMAR = r'''
?start: expr

?expr: "if" expr "then" expr "else" expr                  -> if_expr
     | "let" binder ":=" expr "in" expr                    -> let_expr
     | "rec" binder binder binder* ":=" expr               -> rec_expr
     | "match" expr "with" "inl" binder "=>" expr "|" "inr" binder "=>" expr "end" -> match_expr
     | store ";;" expr                                     -> seq_expr
     | store

?store: disj "<-" disj      -> store_expr
      | disj

?disj: disj "||" conj       -> or_expr
     | conj

?conj: conj "&&" cmp        -> and_expr
     | cmp

?cmp: cons "<" cons         -> lt_expr
    | cons "<=" cons        -> le_expr
    | cons "=" cons         -> eq_expr
    | cons

?cons: sum "::" cons        -> cons_expr
     | sum

?sum: sum "+" prod          -> add_expr
    | sum "-" prod          -> sub_expr
    | prod

?prod: prod "*" unary       -> mul_expr
     | prod "/" unary       -> div_expr
     | unary

?unary: "-" unary           -> neg_expr
      | app

?app: app atom              -> app_expr
    | prim
    | atom

prim: "tick" atom                   -> tick
    | "fork" atom                   -> fork
    | "ChooseUniform" atom          -> choose_uniform
    | "ChooseWeighted" atom         -> choose_weighted
    | "ChooseRange" atom atom       -> choose_range
    | "AllocN" atom atom            -> alloc_n
    | "ref" atom                    -> ref
    | "Free" atom                   -> free
    | "CmpXchg" atom atom atom      -> cmpxchg
    | "Xchg" atom atom              -> xchg
    | "FAA" atom atom               -> faa
    | "fst" atom                    -> fst
    | "snd" atom                    -> snd
    | "inl" atom                    -> inl
    | "inr" atom                    -> inr
    | "not" atom                    -> not_op
    | "head" atom                   -> head_op
    | "tail" atom                   -> tail_op
    | "length" atom                 -> length_op
    | "range" atom atom             -> range_op

?atom: INT                          -> int_lit
     | DECIMAL                      -> dec_lit
     | "true"                       -> true_lit
     | "false"                      -> false_lit
     | "(" ")"                      -> unit_lit
     | "[" "]"                      -> nil_lit
     | "[" expr ("," expr)* "]"     -> list_lit
     | "(" expr "," expr ")"        -> pair_lit
     | "(" expr ")"
     | "!" atom                     -> load_expr
     | NAME                         -> var

binder: NAME                        -> named
      | "_"                         -> wildcard

NAME: /[A-Za-z][A-Za-z0-9_']*|_[A-Za-z0-9_']+/
INT: /[0-9]+/
DECIMAL.2: /[0-9]+\.[0-9]+/
COMMENT: /\/\/[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
'''

_PARSER = Lark(PHL_GRAMMAR, parser='lalr', propagate_positions=True)


def _binder_name(tree):
    if tree.data == 'named':
        return str(tree.children[0])
    return None


def _check_scope(tree, bound):
    '''Raise UnboundVariable at the first free occurrence.'''
    if isinstance(tree, Token):
        return
    assert isinstance(tree, Tree)
    kind = tree.data
    kids = tree.children
    if kind == 'var':
        name = str(kids[0])
        if name not in bound:
            raise UnboundVariable(name, kids[0].line, kids[0].column)
    elif kind == 'let_expr':
        _check_scope(kids[1], bound)
        _check_scope(kids[2], bound | {_binder_name(kids[0])})
    elif kind == 'rec_expr':
        names = {_binder_name(b) for b in kids[:-1]}
        _check_scope(kids[-1], bound | names)
    elif kind == 'match_expr':
        _check_scope(kids[0], bound)
        _check_scope(kids[2], bound | {_binder_name(kids[1])})
        _check_scope(kids[4], bound | {_binder_name(kids[3])})
    else:
        for child in kids:
            _check_scope(child, bound)


def _binop(op):
    return lambda self, left, right: s.BinOp(op, left, right)


@v_args(inline=True)
class AstBuilder(Transformer):
    '''Turns the lark parse tree into syntax nodes.'''

    def named(self, token):
        return str(token)

    def wildcard(self):
        return None

    def int_lit(self, token):
        return s.IntV(int(token))

    def dec_lit(self, token):
        return s.RatV(Fraction(str(token)))

    def true_lit(self):
        return s.TRUE

    def false_lit(self):
        return s.FALSE

    def unit_lit(self):
        return s.UNIT

    def nil_lit(self):
        return s.ListV(())

    def list_lit(self, *items):
        return s.mk_list(items)

    def pair_lit(self, first, second):
        return s.mk_pair(first, second)

    def var(self, token):
        return s.Var(str(token))

    def load_expr(self, operand):
        return s.Load(operand)

    def if_expr(self, cond, then, orelse):
        return s.If(cond, then, orelse)

    def let_expr(self, name, bound, body):
        return s.mk_let(name, bound, body)

    def rec_expr(self, *items):
        fname, xname, *rest = items[:-1]
        body = items[-1]
        for name in reversed(rest):
            body = s.RecE(None, name, body)
        return s.RecE(fname, xname, body)

    def match_expr(self, scrutinee, lvar, lbody, rvar, rbody):
        return s.Match(scrutinee, lvar, lbody, rvar, rbody)

    def seq_expr(self, first, second):
        return s.mk_seq(first, second)

    def store_expr(self, target, value):
        return s.Store(target, value)

    or_expr = _binop('||')
    and_expr = _binop('&&')
    lt_expr = _binop('<')
    le_expr = _binop('<=')
    eq_expr = _binop('=')
    cons_expr = _binop('::')
    add_expr = _binop('+')
    sub_expr = _binop('-')
    mul_expr = _binop('*')
    div_expr = _binop('/')
    range_op = _binop('range')

    def neg_expr(self, operand):
        return s.UnOp('neg', operand)

    def app_expr(self, fn, arg):
        return s.App(fn, arg)

    def tick(self, amount):
        return s.Tick(amount)

    def fork(self, body):
        return s.Fork(body)

    def choose_uniform(self, operand):
        return s.ChooseUniform(operand)

    def choose_weighted(self, operand):
        return s.ChooseWeighted(operand)

    def choose_range(self, low, high):
        return s.ChooseUniform(s.BinOp('range', low, high))

    def alloc_n(self, count, init):
        return s.AllocN(count, init)

    def ref(self, init):
        return s.AllocN(s.IntV(1), init)

    def free(self, operand):
        return s.Free(operand)

    def cmpxchg(self, target, expected, desired):
        return s.CmpXchg(target, expected, desired)

    def xchg(self, target, value):
        return s.Xchg(target, value)

    def faa(self, target, amount):
        return s.FAA(target, amount)

    def fst(self, operand):
        return s.Fst(operand)

    def snd(self, operand):
        return s.Snd(operand)

    def inl(self, operand):
        return s.mk_inl(operand)

    def inr(self, operand):
        return s.mk_inr(operand)

    def not_op(self, operand):
        return s.UnOp('not', operand)

    def head_op(self, operand):
        return s.UnOp('head', operand)

    def tail_op(self, operand):
        return s.UnOp('tail', operand)

    def length_op(self, operand):
        return s.UnOp('length', operand)


def _parse_error(exc: UnexpectedInput) -> ParseError:
    line = getattr(exc, 'line', None)
    column = getattr(exc, 'column', None)
    if isinstance(exc, UnexpectedCharacters):
        message = f'unexpected character {exc.char!r}'
    elif isinstance(exc, UnexpectedEOF):
        message = 'unexpected end of input'
        line = column = None
    elif isinstance(exc, UnexpectedToken):
        message = f'unexpected token {str(exc.token)!r}'
        if exc.token.type == '$END':
            message = 'unexpected end of input'
    else:
        message = 'syntax error'
    if line is not None and line < 0:
        line = column = None
    return ParseError(message, line, column)


def parse_program(text: str, bound=frozenset()) -> s.Expr:
    '''Parse program text into a closed expression.

    :param text: Program source.
    :param bound: Names allowed free (for fragments such as predicates).
    :raises ParseError: with line and column on malformed input.
    :raises UnboundVariable: on a variable outside every binder.
    :return Expr:'''
    assert isinstance(text, str)
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as exc:
        raise _parse_error(exc) from exc
    _check_scope(tree, frozenset(bound))
    expr = AstBuilder().transform(tree)
    logging.debug('parse_program: %d characters', len(text))
    return expr


def parse_value(text: str) -> s.Value:
    '''Parse a literal that is already a value (e.g. "(1, true)").'''
    expr = parse_program(text)
    value = s.to_val(expr)
    if value is None:
        raise ParseError(f'not a value literal: {text}')
    return value


def apply_defines(expr: s.Expr, defines: dict) -> s.Expr:
    '''Rebind top-level lets: let n := e in ... becomes let n := v in ...
    for every name n in defines.

    :param defines: name -> replacement expression (already parsed).'''
    if not defines:
        return expr
    if isinstance(expr, s.App) and isinstance(expr.fn, s.RecE) \
            and expr.fn.f is None:
        fn = expr.fn
        body = apply_defines(fn.body, defines)
        bound = expr.arg
        if fn.x is not None and fn.x in defines:
            logging.debug('apply_defines: %s', fn.x)
            bound = defines[fn.x]
        return s.App(s.RecE(None, fn.x, body), bound)
    return expr
