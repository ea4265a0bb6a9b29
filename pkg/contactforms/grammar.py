"""
Grammar shared by scalar coefficients and differential forms.

    expr   :: term [ ('+' | '-') term ]*
    term   :: unary [ ('*' | '/') unary | factor ]*       juxtaposition multiplies
    unary  :: ('-' | '+') unary | factor
    factor :: atom [ ('^' | '∧') unary ]                   right associative
    atom   :: number
            | 'D[' expr [',' ident]+ ']'                   partial derivative
            | 'd[' ident ']'                               coordinate differential
            | name "'"* '(' expr [',' expr]* ')'           call, no space before '('
            | ident
            | '(' expr ')'

The parser only produces a syntax tree of ``Node`` values; turning the tree
into SymPy scalars or differential forms is left to ``expr`` and ``exterior``.
"""
from dataclasses import dataclass

import pyparsing as pp

from .exceptions import ExpressionSyntaxError

pp.ParserElement.enable_packrat()

RESERVED = frozenset({'exp', 'd', 'D'})


@dataclass(frozen=True)
class Node:
    kind: str
    args: tuple
    loc: int = 0


def _number(s, loc, toks):
    return Node('num', (toks[0],), loc)


def _name(s, loc, toks):
    return Node('name', (toks[0],), loc)


def _differential(s, loc, toks):
    return Node('dform', (toks[0],), loc)


def _derivative(s, loc, toks):
    return Node('deriv', (toks[0],) + tuple(toks[1:]), loc)


def _call(s, loc, toks):
    head = toks[0][:-1]
    name = head.rstrip("'")
    return Node('call', (name, len(head) - len(name), tuple(toks[1:])), loc)


def _factor(s, loc, toks):
    if len(toks) == 1:
        return toks[0]
    kind = 'pow' if toks[1] == '^' else 'wedge'
    return Node(kind, (toks[0], toks[2]), loc)


def _unary(s, loc, toks):
    if len(toks) == 1:
        return toks[0]
    return Node('neg', (toks[1],), loc) if toks[0] == '-' else toks[1]


def _term(s, loc, toks):
    result = toks[0]
    op = None
    for tok in toks[1:]:
        if isinstance(tok, str):
            op = tok
            continue
        result = Node('div' if op == '/' else 'mul', (result, tok), loc)
        op = None
    return result


def _expr(s, loc, toks):
    if len(toks) == 1:
        return toks[0]
    terms = [('+', toks[0])]
    for i in range(1, len(toks), 2):
        terms.append((toks[i], toks[i + 1]))
    return Node('add', tuple(terms), loc)


def _build_grammar():
    expr = pp.Forward()
    unary = pp.Forward()

    number = pp.Regex(r"\d+(?:\.\d*)?|\.\d+").set_parse_action(_number)
    ident = pp.Regex(r"(?![dD]\[)[A-Za-z_][A-Za-z0-9_]*")
    name = ident.copy().set_parse_action(_name)
    differential = (pp.Suppress('d[') + ident + pp.Suppress(']')).set_parse_action(_differential)
    derivative = (
        pp.Suppress('D[') + expr + pp.OneOrMore(pp.Suppress(',') + ident) + pp.Suppress(']')
    ).set_parse_action(_derivative)
    call_head = pp.Regex(r"[A-Za-z_][A-Za-z0-9_]*'*\(")
    call = (
        call_head + pp.DelimitedList(expr) + pp.Suppress(')')
    ).set_parse_action(_call)

    atom = number | derivative | differential | call | name | (pp.Suppress('(') + expr + pp.Suppress(')'))
    factor = (atom + pp.Optional(pp.one_of('^ ∧') + unary)).set_parse_action(_factor)
    unary <<= (pp.one_of('- +') + unary).set_parse_action(_unary) | factor
    term = (unary + pp.ZeroOrMore((pp.one_of('* /') + unary) | factor)).set_parse_action(_term)
    expr <<= (term + pp.ZeroOrMore(pp.one_of('+ -') + term)).set_parse_action(_expr)
    return expr


GRAMMAR = _build_grammar()


def parse(text):
    """
    Parse ``text`` into a syntax tree.

    Raises:
        ExpressionSyntaxError: carrying the character position of the failure
    """
    if not text or not text.strip():
        raise ExpressionSyntaxError('Empty expression', text, 0)
    try:
        return GRAMMAR.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as e:
        raise ExpressionSyntaxError(f"Invalid expression: {e.msg}", text, e.loc) from e
