"""
Phase Expression DSL
====================

A small call-style language for naming phases on the command line:

    line(a1,a2,k1,k2)
    resonant(k=[k1,...,kM],a=[a1,...,aM])
    resgen(k=[...],a1=[...],a2=[...])
    two(k1,k2,k3,k4)              two_unchecked(k1,k2,k3,k4)
    wr(e1,e2,...)
    galilean(e,beta)              scale(e,lambda,ysign)
    sum(term(c,[mx,my,mt],[fx,fy,ft]),...)
    preset(name)
    kdv(a[,c])  kdv2(a1,a2)  mkdv(k[,c])  lift(e,d)

Rationals are written as integers or `p/q` with an optional leading minus.
Whitespace is free and `#` starts a comment running to the end of the line.
The canonical text printed by `to_text` is accepted as well and parses to
a `sum(...)` node.

`parse` is a hand-written recursive-descent parser. Arity and argument
shapes are syntax errors; parameter constraints (ordering, positivity,
degenerate k's) are semantic errors raised at parse time by lowering every
node as soon as it is built.

Usage:
    ast = parse('two(-1,-1/2,1/2,1)')
    phase = lower(ast)
    assert parse(print_expr(ast)) == ast
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from src.algebra.expalg import KDV_VARS, KP_VARS, ExpPoly, Term
from src.phases.constructors import (
    Phase,
    galilean,
    kdv_soliton,
    kdv_two_soliton,
    lift,
    line_soliton,
    mkdv_soliton,
    raw_phase,
    resonant,
    resonant_general,
    scale,
    two_soliton,
    two_soliton_unchecked,
    wronskian_phase,
)
from src.phases.presets import build_preset
from src.phases.validators import ValidationError

logger = logging.getLogger(__name__)


class DSLSyntaxError(ValueError):
    """Raised for malformed input; `position` is the 0-based character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f'{message} at position {position}')
        self.position = position


class DSLSemanticError(ValueError):
    """Raised when a well-formed expression violates a phase constraint."""

    def __init__(self, message: str, position: Optional[int] = None):
        where = '' if position is None else f' (at position {position})'
        super().__init__(f'{message}{where}')
        self.detail = message
        self.position = position


# -- AST ---------------------------------------------------------------

class PhaseExpr:
    """Base class of AST nodes."""


@dataclass(frozen=True)
class Line(PhaseExpr):
    a1: Fraction
    a2: Fraction
    k1: Fraction
    k2: Fraction


@dataclass(frozen=True)
class Resonant(PhaseExpr):
    k: Tuple[Fraction, ...]
    a: Tuple[Fraction, ...]


@dataclass(frozen=True)
class ResonantGeneral(PhaseExpr):
    k: Tuple[Fraction, ...]
    a1: Tuple[Fraction, ...]
    a2: Tuple[Fraction, ...]


@dataclass(frozen=True)
class TwoSoliton(PhaseExpr):
    k: Tuple[Fraction, Fraction, Fraction, Fraction]
    checked: bool = True


@dataclass(frozen=True)
class Wr(PhaseExpr):
    args: Tuple[PhaseExpr, ...]


@dataclass(frozen=True)
class Galilean(PhaseExpr):
    expr: PhaseExpr
    beta: Fraction


@dataclass(frozen=True)
class Scale(PhaseExpr):
    expr: PhaseExpr
    lam: Fraction
    y_sign: Fraction


@dataclass(frozen=True)
class SumTerm(PhaseExpr):
    """term(c,[mx,my,mt],[fx,fy,ft])."""

    coeff: Fraction
    mono: Tuple[int, int, int]
    freq: Tuple[Fraction, Fraction, Fraction]


@dataclass(frozen=True)
class RawSum(PhaseExpr):
    terms: Tuple[SumTerm, ...]


@dataclass(frozen=True)
class Preset(PhaseExpr):
    name: str


@dataclass(frozen=True)
class KdV(PhaseExpr):
    a: Fraction
    c: Fraction = Fraction(1)


@dataclass(frozen=True)
class KdV2(PhaseExpr):
    a1: Fraction
    a2: Fraction


@dataclass(frozen=True)
class MKdV(PhaseExpr):
    k: Fraction
    c: Fraction = Fraction(1)


@dataclass(frozen=True)
class Lift(PhaseExpr):
    expr: PhaseExpr
    d: int


# -- tokenizer ---------------------------------------------------------

_TOKEN_RE = re.compile(
    r'(?P<skip>\s+|#[^\n]*)'
    r'|(?P<num>\d+)'
    r'|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)'
    r'|(?P<punct>[()\[\],=\-/*^+])'
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup
        if kind != 'skip':
            tokens.append(Token(kind, match.group(), pos))
        pos = match.end()
    tokens.append(Token('eof', '', len(text)))
    return tokens


# -- parser ------------------------------------------------------------

Value = Union[PhaseExpr, Fraction, List[Fraction], str]


@dataclass
class _Arg:
    value: Value
    position: int
    keyword: Optional[str] = None


class Parser:
    """Recursive-descent parser over the token list of one expression."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.index + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        if token.kind != 'eof':
            self.index += 1
        return token

    def accept(self, text: str) -> bool:
        if self.current.kind in ('punct', 'ident') and self.current.text == text:
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        token = self.current
        if not self.accept(text):
            found = 'end of input' if token.kind == 'eof' else repr(token.text)
            raise DSLSyntaxError(f"expected '{text}', found {found}", token.position)
        return token

    def parse(self) -> PhaseExpr:
        node = self.parse_expr()
        if self.current.kind != 'eof':
            raise DSLSyntaxError(f"unexpected {self.current.text!r} after expression", self.current.position)
        return node

    # expr := call | canonical-text
    def parse_expr(self) -> PhaseExpr:
        token = self.current
        if token.kind == 'ident' and self.peek().text == '(':
            return self.parse_call()
        if token.kind == 'num' or token.text == '-':
            start = token.position
            coeff = self.parse_rational()
            return self.parse_canonical(coeff, start)
        found = 'end of input' if token.kind == 'eof' else repr(token.text)
        raise DSLSyntaxError(f"expected a phase expression, found {found}", token.position)

    def parse_integer(self) -> int:
        token = self.current
        if token.kind != 'num':
            raise DSLSyntaxError(f"expected an integer, found {token.text!r}", token.position)
        self.advance()
        return int(token.text)

    # rational := ['-'] num ['/' num]
    def parse_rational(self) -> Fraction:
        negative = self.accept('-')
        numerator = self.parse_integer()
        denominator = 1
        if self.accept('/'):
            position = self.current.position
            denominator = self.parse_integer()
            if denominator == 0:
                raise DSLSyntaxError('zero denominator', position)
        value = Fraction(numerator, denominator)
        return -value if negative else value

    # list := '[' [rational (',' rational)*] ']'
    def parse_list(self) -> List[Fraction]:
        self.expect('[')
        values: List[Fraction] = []
        if not self.accept(']'):
            values.append(self.parse_rational())
            while self.accept(','):
                values.append(self.parse_rational())
            self.expect(']')
        return values

    def parse_value(self) -> Value:
        token = self.current
        if token.text == '[':
            return self.parse_list()
        if token.kind == 'ident':
            if self.peek().text == '(':
                return self.parse_call()
            self.advance()
            return token.text
        if token.kind == 'num' or token.text == '-':
            value = self.parse_rational()
            if self.current.text == '*':
                return self.parse_canonical(value, token.position)
            return value
        found = 'end of input' if token.kind == 'eof' else repr(token.text)
        raise DSLSyntaxError(f"expected an argument, found {found}", token.position)

    def parse_args(self) -> List[_Arg]:
        self.expect('(')
        args: List[_Arg] = []
        if self.accept(')'):
            return args
        while True:
            token = self.current
            keyword = None
            if token.kind == 'ident' and self.peek().text == '=':
                keyword = token.text
                self.advance()
                self.advance()
            args.append(_Arg(self.parse_value(), token.position, keyword))
            if self.accept(')'):
                return args
            self.expect(',')

    def parse_call(self) -> PhaseExpr:
        name_token = self.advance()
        name = name_token.text
        builder = _BUILDERS.get(name)
        if builder is None:
            available = ', '.join(sorted(_BUILDERS))
            raise DSLSyntaxError(f"unknown function '{name}'. Available: {available}", name_token.position)
        args = self.parse_args()
        node = builder(_Call(name, name_token.position, args))
        _validate(node, name_token.position)
        return node

    # canonical := block (' + ' block)*; block := coeff '*' mono* '*' 'exp' '(' lin ')'
    def parse_canonical(self, first: Fraction, start: int) -> RawSum:
        terms = [self._canonical_block(first)]
        while self.current.text == '+':
            self.advance()
            terms.append(self._canonical_block(self.parse_rational()))
        node = RawSum(tuple(terms))
        _validate(node, start)
        return node

    def _canonical_var(self, seen: Dict[str, Any]) -> str:
        token = self.current
        if token.kind != 'ident':
            raise DSLSyntaxError(f"expected a variable name, found {token.text!r}", token.position)
        if token.text not in KP_VARS:
            raise DSLSemanticError(
                f"canonical text: variable '{token.text}' is not one of {', '.join(KP_VARS)}",
                token.position,
            )
        if token.text in seen:
            raise DSLSyntaxError(f"variable '{token.text}' repeated", token.position)
        self.advance()
        return token.text

    def _canonical_block(self, coeff: Fraction) -> SumTerm:
        if coeff == 0 and self.current.text != '*':
            return SumTerm(coeff, (0, 0, 0), (Fraction(0),) * 3)
        self.expect('*')
        mono: Dict[str, int] = {}
        while self.current.kind == 'ident' and self.current.text != 'exp':
            name = self._canonical_var(mono)
            self.expect('^')
            mono[name] = self.parse_integer()
        if mono:
            self.expect('*')
        self.expect('exp')
        self.expect('(')
        freq: Dict[str, Fraction] = {}
        while True:
            value = self.parse_rational()
            self.expect('*')
            freq[self._canonical_var(freq)] = value
            if self.accept(')'):
                break
            self.expect('+')
        return SumTerm(
            coeff,
            (mono.get('x', 0), mono.get('y', 0), mono.get('t', 0)),
            (freq.get('x', Fraction(0)), freq.get('y', Fraction(0)), freq.get('t', Fraction(0))),
        )


@dataclass
class _Call:
    name: str
    position: int
    args: List[_Arg]

    def fail(self, message: str) -> DSLSyntaxError:
        return DSLSyntaxError(f'{self.name}: {message}', self.position)

    def positional(self, count: int, optional: int = 0) -> List[_Arg]:
        if any(a.keyword for a in self.args):
            raise self.fail('takes positional arguments only')
        if not count <= len(self.args) <= count + optional:
            expected = str(count) if not optional else f'{count} to {count + optional}'
            raise self.fail(f'expected {expected} arguments, got {len(self.args)}')
        return self.args

    def keywords(self, names: Tuple[str, ...]) -> Dict[str, _Arg]:
        found: Dict[str, _Arg] = {}
        for arg in self.args:
            if arg.keyword is None:
                raise DSLSyntaxError(f'{self.name}: arguments must be named ({", ".join(names)})', arg.position)
            if arg.keyword not in names:
                raise DSLSyntaxError(f"{self.name}: unknown argument '{arg.keyword}'", arg.position)
            if arg.keyword in found:
                raise DSLSyntaxError(f"{self.name}: argument '{arg.keyword}' repeated", arg.position)
            found[arg.keyword] = arg
        missing = [n for n in names if n not in found]
        if missing:
            raise self.fail(f"missing argument(s) {', '.join(missing)}")
        return found


def _rational(call: _Call, arg: _Arg) -> Fraction:
    if not isinstance(arg.value, Fraction):
        raise DSLSyntaxError(f'{call.name}: expected a rational', arg.position)
    return arg.value


def _integer(call: _Call, arg: _Arg) -> int:
    value = _rational(call, arg)
    if value.denominator != 1:
        raise DSLSyntaxError(f'{call.name}: expected an integer', arg.position)
    return int(value)


def _vector(call: _Call, arg: _Arg, length: Optional[int] = None) -> Tuple[Fraction, ...]:
    if not isinstance(arg.value, list):
        raise DSLSyntaxError(f'{call.name}: expected a list [..]', arg.position)
    if length is not None and len(arg.value) != length:
        raise DSLSyntaxError(f'{call.name}: expected a list of {length} entries', arg.position)
    return tuple(arg.value)


def _expr(call: _Call, arg: _Arg) -> PhaseExpr:
    if not isinstance(arg.value, PhaseExpr):
        raise DSLSyntaxError(f'{call.name}: expected a phase expression', arg.position)
    return arg.value


def _build_line(call: _Call) -> PhaseExpr:
    return Line(*(_rational(call, a) for a in call.positional(4)))


def _build_resonant(call: _Call) -> PhaseExpr:
    args = call.keywords(('k', 'a'))
    return Resonant(_vector(call, args['k']), _vector(call, args['a']))


def _build_resgen(call: _Call) -> PhaseExpr:
    args = call.keywords(('k', 'a1', 'a2'))
    return ResonantGeneral(_vector(call, args['k']), _vector(call, args['a1']), _vector(call, args['a2']))


def _build_two(call: _Call) -> PhaseExpr:
    k = tuple(_rational(call, a) for a in call.positional(4))
    return TwoSoliton(k, checked=call.name == 'two')


def _build_wr(call: _Call) -> PhaseExpr:
    if not call.args:
        raise call.fail('needs at least one argument')
    return Wr(tuple(_expr(call, a) for a in call.positional(len(call.args))))


def _build_galilean(call: _Call) -> PhaseExpr:
    e, beta = call.positional(2)
    return Galilean(_expr(call, e), _rational(call, beta))


def _build_scale(call: _Call) -> PhaseExpr:
    e, lam, y_sign = call.positional(3)
    return Scale(_expr(call, e), _rational(call, lam), _rational(call, y_sign))


def _build_term(call: _Call) -> PhaseExpr:
    c, mono, freq = call.positional(3)
    powers = _vector(call, mono, 3)
    if any(p.denominator != 1 or p < 0 for p in powers):
        raise DSLSyntaxError(f'{call.name}: monomial powers must be non-negative integers', mono.position)
    return SumTerm(_rational(call, c), tuple(int(p) for p in powers), _vector(call, freq, 3))


def _build_sum(call: _Call) -> PhaseExpr:
    terms = []
    for arg in call.positional(len(call.args)):
        if not isinstance(arg.value, SumTerm):
            raise DSLSyntaxError(f'{call.name}: arguments must be term(...)', arg.position)
        terms.append(arg.value)
    return RawSum(tuple(terms))


def _build_preset(call: _Call) -> PhaseExpr:
    (arg,) = call.positional(1)
    if not isinstance(arg.value, str):
        raise DSLSyntaxError(f'{call.name}: expected a preset name', arg.position)
    return Preset(arg.value)


def _build_kdv(call: _Call) -> PhaseExpr:
    args = [_rational(call, a) for a in call.positional(1, optional=1)]
    return KdV(*args)


def _build_kdv2(call: _Call) -> PhaseExpr:
    return KdV2(*(_rational(call, a) for a in call.positional(2)))


def _build_mkdv(call: _Call) -> PhaseExpr:
    args = [_rational(call, a) for a in call.positional(1, optional=1)]
    return MKdV(*args)


def _build_lift(call: _Call) -> PhaseExpr:
    e, d = call.positional(2)
    return Lift(_expr(call, e), _integer(call, d))


_BUILDERS = {
    'line': _build_line,
    'resonant': _build_resonant,
    'resgen': _build_resgen,
    'two': _build_two,
    'two_unchecked': _build_two,
    'wr': _build_wr,
    'galilean': _build_galilean,
    'scale': _build_scale,
    'term': _build_term,
    'sum': _build_sum,
    'preset': _build_preset,
    'kdv': _build_kdv,
    'kdv2': _build_kdv2,
    'mkdv': _build_mkdv,
    'lift': _build_lift,
}


def _validate(node: PhaseExpr, position: int) -> None:
    if isinstance(node, SumTerm):
        return
    try:
        lower_theta(node)
    except DSLSemanticError as exc:
        raise DSLSemanticError(exc.detail, position) from exc
    except ValueError as exc:
        raise DSLSemanticError(str(exc), position) from exc


def parse(text: str) -> PhaseExpr:
    """
    Parse one phase expression.

    Raises:
        DSLSyntaxError: malformed input, wrong arity or argument shape
        DSLSemanticError: the expression names an invalid phase
    """
    node = Parser(text).parse()
    logger.debug("parsed %s", type(node).__name__)
    return node


def substitute(template: str, values: Mapping[str, Any]) -> str:
    """
    Fill `{name}` placeholders of a sweep template.

    Raises:
        DSLSyntaxError: a placeholder has no value
    """
    def replace(match: 're.Match[str]') -> str:
        name = match.group(1)
        if name not in values:
            raise DSLSyntaxError(f"no value for placeholder '{{{name}}}'", match.start())
        value = values[name]
        return _fmt(value) if isinstance(value, Fraction) else str(value)

    return re.sub(r'\{([A-Za-z_][A-Za-z0-9_]*)\}', replace, template)


# -- printer -----------------------------------------------------------

def _fmt(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


def _fmt_list(values) -> str:
    return '[' + ','.join(_fmt(v) for v in values) + ']'


def print_expr(node: PhaseExpr) -> str:
    """Canonical text of a node; parse(print_expr(node)) == node."""
    if isinstance(node, Line):
        return f'line({_fmt(node.a1)},{_fmt(node.a2)},{_fmt(node.k1)},{_fmt(node.k2)})'
    if isinstance(node, Resonant):
        return f'resonant(k={_fmt_list(node.k)},a={_fmt_list(node.a)})'
    if isinstance(node, ResonantGeneral):
        return f'resgen(k={_fmt_list(node.k)},a1={_fmt_list(node.a1)},a2={_fmt_list(node.a2)})'
    if isinstance(node, TwoSoliton):
        name = 'two' if node.checked else 'two_unchecked'
        return f"{name}({','.join(_fmt(k) for k in node.k)})"
    if isinstance(node, Wr):
        return f"wr({','.join(print_expr(e) for e in node.args)})"
    if isinstance(node, Galilean):
        return f'galilean({print_expr(node.expr)},{_fmt(node.beta)})'
    if isinstance(node, Scale):
        return f'scale({print_expr(node.expr)},{_fmt(node.lam)},{_fmt(node.y_sign)})'
    if isinstance(node, SumTerm):
        return f'term({_fmt(node.coeff)},{_fmt_list(node.mono)},{_fmt_list(node.freq)})'
    if isinstance(node, RawSum):
        return f"sum({','.join(print_expr(t) for t in node.terms)})"
    if isinstance(node, Preset):
        return f'preset({node.name})'
    if isinstance(node, KdV):
        return f'kdv({_fmt(node.a)},{_fmt(node.c)})'
    if isinstance(node, KdV2):
        return f'kdv2({_fmt(node.a1)},{_fmt(node.a2)})'
    if isinstance(node, MKdV):
        return f'mkdv({_fmt(node.k)},{_fmt(node.c)})'
    if isinstance(node, Lift):
        return f'lift({print_expr(node.expr)},{node.d})'
    raise TypeError(f'not a phase expression: {node!r}')


# -- lowering ----------------------------------------------------------

def _raw_theta(node: RawSum) -> ExpPoly:
    terms = [
        Term(t.coeff, (t.mono[2], t.mono[0], t.mono[1]), (t.freq[2], t.freq[0], t.freq[1]))
        for t in node.terms
    ]
    return ExpPoly(KP_VARS, terms)


def lower(node: PhaseExpr) -> Phase:
    """
    Lower a KP node to a Phase over (t, x, y).

    Raises:
        DSLSemanticError: the node is a (t, x) or ZK phase
        ValidationError: parameter constraints
    """
    if isinstance(node, Line):
        return line_soliton(node.a1, node.a2, node.k1, node.k2)
    if isinstance(node, Resonant):
        if len(node.k) != len(node.a):
            raise ValidationError(f'resonant: k and a differ in length ({len(node.k)} vs {len(node.a)})')
        return resonant(node.a, node.k)
    if isinstance(node, ResonantGeneral):
        return resonant_general(node.a1, node.a2, node.k)
    if isinstance(node, TwoSoliton):
        build = two_soliton if node.checked else two_soliton_unchecked
        return build(*node.k)
    if isinstance(node, Wr):
        return wronskian_phase([lower(e) for e in node.args])
    if isinstance(node, Galilean):
        return galilean(lower(node.expr), node.beta)
    if isinstance(node, Scale):
        return scale(lower(node.expr), node.lam, node.y_sign)
    if isinstance(node, RawSum):
        theta = _raw_theta(node)
        if theta.is_zero():
            raise ValidationError('sum: phase expands to zero')
        return raw_phase(theta)
    if isinstance(node, Preset):
        return build_preset(node.name)
    if isinstance(node, (KdV, KdV2, MKdV, Lift)):
        raise DSLSemanticError(f'{print_expr(node)} is not a KP phase over (t, x, y)')
    raise TypeError(f'not a phase expression: {node!r}')


def lower_theta(node: PhaseExpr) -> ExpPoly:
    """Lower any node to its ring element: KP nodes over (t, x, y), kdv/kdv2/mkdv over (t, x), lift over (t, x1..xd)."""
    if isinstance(node, KdV):
        return kdv_soliton(node.a, node.c)
    if isinstance(node, KdV2):
        return kdv_two_soliton(node.a1, node.a2)
    if isinstance(node, MKdV):
        return mkdv_soliton(node.k, node.c)
    if isinstance(node, Lift):
        inner = lower_theta(node.expr)
        if inner.vars != KDV_VARS:
            raise DSLSemanticError(f'lift: expected a (t, x) phase, got {print_expr(node.expr)}')
        return lift(inner, node.d)
    return lower(node).theta
