"""
Text syntax for differential functions.

Canonical form is a parenthesized prefix syntax (see docs/expression_grammar.md):

    (+ (* 2 w1) (exp (+ (* 1/2 r1_0) (* -1/2 r2_0))) (Phi r1_0 r2_0))

Command-line parameters may also be written infix ("w0^2/2", "omega0*omega1");
infix text is handed to sympy's parser with only jet atoms and registered
function symbols in scope.
"""
import re
from typing import List

import sympy as sp
from sympy.core.function import AppliedUndef
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from ..errors import GrammarError
from .symbols import atom_info, lookup, t, x

_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")
_NUMBER_RE = re.compile(r"^-?\d+(/\d+)?$")
_OMEGA_ALIAS_RE = re.compile(r"omega(\d+)")
_UNIVARIATE_FUNCTIONS = {"exp": sp.exp, "tanh": sp.tanh, "sinh": sp.sinh, "cosh": sp.cosh,
                         "sin": sp.sin, "cos": sp.cos, "log": sp.log}


def _atom(token: str) -> sp.Expr:
    if _NUMBER_RE.match(token):
        return sp.Rational(token)
    symbol = sp.Symbol(token, real=True)
    if atom_info(symbol) is None:
        raise GrammarError(f"Unknown atom '{token}'")
    return symbol


def _build(head: str, args: List[sp.Expr]) -> sp.Expr:
    if head == "+":
        return sp.Add(*args)
    if head == "*":
        return sp.Mul(*args)
    if head == "-":
        if len(args) == 1:
            return -args[0]
        return args[0] - sp.Add(*args[1:])
    if head == "/":
        if len(args) != 2:
            raise GrammarError("'/' takes two operands")
        return args[0] / args[1]
    if head == "^":
        if len(args) != 2 or not args[1].is_Integer:
            raise GrammarError("'^' takes a base and an integer exponent")
        return args[0] ** args[1]
    if head == "exp":
        if len(args) != 1:
            raise GrammarError("'exp' takes one operand")
        return sp.exp(args[0])
    if head == "D":
        if len(args) < 3 or len(args) % 2 == 0:
            raise GrammarError("'D' takes an expression followed by (atom count) pairs")
        pairs = [(args[i], int(args[i + 1])) for i in range(1, len(args), 2)]
        return sp.Derivative(args[0], *pairs)
    symbol = lookup(head)
    if symbol is None:
        raise GrammarError(f"Unknown operator or function symbol '{head}'")
    return symbol(*args)


def parse_prefix(text: str) -> sp.Expr:
    """Parse the canonical prefix syntax."""
    tokens = _TOKEN_RE.findall(text)
    if not tokens:
        raise GrammarError("Empty expression")
    position = 0

    def parse_node() -> sp.Expr:
        nonlocal position
        if position >= len(tokens):
            raise GrammarError("Unexpected end of expression")
        token = tokens[position]
        position += 1
        if token == ")":
            raise GrammarError("Unexpected ')'")
        if token != "(":
            return _atom(token)
        if position >= len(tokens):
            raise GrammarError("Missing operator after '('")
        head = tokens[position]
        position += 1
        args = []
        while position < len(tokens) and tokens[position] != ")":
            args.append(parse_node())
        if position >= len(tokens):
            raise GrammarError("Missing ')'")
        position += 1
        return _build(head, args)

    result = parse_node()
    if position != len(tokens):
        raise GrammarError(f"Trailing tokens after expression: {' '.join(tokens[position:])}")
    return result


def _infix_namespace(text: str) -> dict:
    namespace = {"t": t, "x": x, "E": sp.E}
    for name in re.findall(r"[A-Za-z_][A-Za-z0-9_]*", text):
        symbol = sp.Symbol(name, real=True)
        if atom_info(symbol) is not None:
            namespace[name] = symbol
        elif lookup(name) is not None:
            namespace[name] = lookup(name).func
        elif name in _UNIVARIATE_FUNCTIONS:
            namespace[name] = _UNIVARIATE_FUNCTIONS[name]
    return namespace


def parse_infix(text: str, extra_symbols: dict = None) -> sp.Expr:
    """Parse infix text such as 'w0^2/2' or 'exp(r1_0/2 - r2_0/2)*(r1_0 + r2_0)'."""
    text = _OMEGA_ALIAS_RE.sub(r"w\1", text)
    namespace = _infix_namespace(text)
    if extra_symbols:
        namespace.update(extra_symbols)
    transformations = standard_transformations + (convert_xor,)
    try:
        expr = parse_expr(text, local_dict=namespace, global_dict={"Integer": sp.Integer,
                                                                  "Rational": sp.Rational,
                                                                  "Float": sp.Float,
                                                                  "Symbol": sp.Symbol},
                          transformations=transformations, evaluate=True)
    except (SyntaxError, TypeError, NameError) as e:
        raise GrammarError(f"Cannot parse '{text}': {str(e)}")
    allowed = set(namespace.values())
    foreign = [s for s in expr.free_symbols if s not in allowed]
    if foreign:
        raise GrammarError(f"Unknown names in '{text}': {sorted(map(str, foreign))}")
    return sp.nsimplify(expr, rational=True) if expr.atoms(sp.Float) else expr


def parse(text: str) -> sp.Expr:
    """Parse either syntax; text starting with '(' is tried as prefix first."""
    text = text.strip()
    if text.startswith("("):
        try:
            return parse_prefix(text)
        except GrammarError as prefix_error:
            try:
                return parse_infix(text)
            except GrammarError:
                raise prefix_error
    return parse_infix(text)


def parse_univariate(text: str) -> sp.Lambda:
    """Closed-form univariate function in the variable u, e.g. 'tanh', 'u^3', 'exp(u)'."""
    u = sp.Symbol("u", real=True)
    stripped = text.strip()
    if stripped in _UNIVARIATE_FUNCTIONS:
        return sp.Lambda(u, _UNIVARIATE_FUNCTIONS[stripped](u))
    if stripped in ("identity", "id"):
        return sp.Lambda(u, u)
    body = parse_infix(stripped, extra_symbols={"u": u})
    if body.free_symbols - {u}:
        raise GrammarError(f"Univariate closed form may only use 'u': '{text}'")
    return sp.Lambda(u, body)


def serialize(e) -> str:
    """Canonical prefix text of an expression."""
    e = sp.sympify(e)
    if e.is_Integer:
        return str(int(e))
    if e.is_Rational:
        return f"{e.p}/{e.q}"
    if e.is_Symbol:
        return e.name
    if isinstance(e, sp.Add):
        return "(+ " + " ".join(serialize(a) for a in e.args) + ")"
    if isinstance(e, sp.Mul):
        return "(* " + " ".join(serialize(a) for a in e.args) + ")"
    if isinstance(e, sp.Pow):
        return f"(^ {serialize(e.base)} {serialize(e.exp)})"
    if isinstance(e, sp.exp):
        return f"(exp {serialize(e.args[0])})"
    if isinstance(e, sp.Derivative):
        pairs = " ".join(f"{serialize(v)} {c}" for v, c in e.variable_count)
        return f"(D {serialize(e.expr)} {pairs})"
    if isinstance(e, AppliedUndef):
        return f"({e.func.__name__} " + " ".join(serialize(a) for a in e.args) + ")"
    if e is sp.E:
        return "(exp 1)"
    raise GrammarError(f"Cannot serialize {e!r}")
