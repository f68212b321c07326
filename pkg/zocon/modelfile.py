"""Plain text model files.

::

    # Example
    vars 2
    2 x1 + 4 x2 >= 1
    2 x1 - 4 x2 >= -3
    max 3 x2 - x1

Rows use ``>=``, ``<=`` or ``=``; coefficients are integers or ``p/q``;
everything after ``#`` is a comment. Variables are binary.
"""
import logging
import re
from fractions import Fraction

from .core import BinarySystem, LinIneq, Objective
from .util import to_rat

logger = logging.getLogger(__name__)

_TOKEN = re.compile(
    r"\s*(?:(?P<number>\d+(?:/\d+)?)|(?P<var>x\d+)|(?P<sense>>=|<=|=)"
    r"|(?P<sign>[+-])|(?P<times>\*)|(?P<word>[A-Za-z_]\w*))"
)


class ModelSyntaxError(ValueError):
    """A model file could not be parsed.

    :param line: 1-based line number.
    :param column: 1-based column of the offending token."""

    def __init__(self, line, column, message):
        self.line = line
        self.column = column
        self.message = message
        super().__init__("line {line}, column {column}: {message}".format(
            line=line, column=column, message=message))


def _tokens(text, line):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if match is None or match.end() == pos:
            column = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ModelSyntaxError(line, column, "unexpected character '" + text[column - 1] + "'")
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind) + 1))
        pos = match.end()
    return tokens


class _Line:
    def __init__(self, tokens, line, n):
        self.tokens = tokens
        self.index = 0
        self.line = line
        self.n = n

    def peek(self):
        return self.tokens[self.index] if self.index < len(self.tokens) else (None, None, None)

    def take(self):
        token = self.peek()
        self.index += 1
        return token

    def column(self):
        kind, _, column = self.peek()
        if kind is None:
            last = self.tokens[-1] if self.tokens else (None, "", 0)
            return last[2] + len(last[1])
        return column

    def fail(self, message):
        raise ModelSyntaxError(self.line, self.column(), message)

    def number(self, text):
        try:
            return to_rat(text)
        except (ValueError, ZeroDivisionError):
            self.fail("malformed rational '" + text + "'")

    def expression(self):
        """Terms up to a sense or the end of the line: (coefs, constant)."""
        coefs = {}
        constant = Fraction(0)
        first = True
        while self.peek()[0] not in (None, "sense"):
            sign = 1
            if self.peek()[0] == "sign":
                sign = -1 if self.take()[1] == "-" else 1
            elif not first:
                self.fail("expected '+' or '-'")
            first = False
            coefficient = None
            if self.peek()[0] == "number":
                coefficient = self.number(self.take()[1])
                if self.peek()[0] == "times":
                    self.take()
                    if self.peek()[0] != "var":
                        self.fail("expected a variable after '*'")
            if self.peek()[0] == "var":
                kind, name, column = self.take()
                var = int(name[1:])
                if var < 1 or var > self.n:
                    raise ModelSyntaxError(
                        self.line,
                        column,
                        "variable " + name + " outside x1..x" + str(self.n),
                    )
                value = sign * (Fraction(1) if coefficient is None else coefficient)
                coefs[var] = coefs.get(var, Fraction(0)) + value
            elif coefficient is not None:
                constant += sign * coefficient
            else:
                self.fail("expected a coefficient or a variable")
        if first:
            self.fail("expected an expression")
        return coefs, constant

    def rhs(self):
        sign = 1
        if self.peek()[0] == "sign":
            sign = -1 if self.take()[1] == "-" else 1
        kind, text, _ = self.peek()
        if kind != "number":
            self.fail("expected a rational right hand side")
        self.take()
        value = sign * self.number(text)
        if self.peek()[0] is not None:
            self.fail("unexpected text after the right hand side")
        return value


def parse_model(text):
    """Parse a model file into a system and an optional objective.

    :param text: the file contents.
    :type text: string
    :returns: (BinarySystem, Objective or None)"""
    n = None
    rows = []
    objective = None
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        tokens = _tokens(body, number)
        reader = _Line(tokens, number, n)
        kind, value, column = tokens[0]
        if kind == "word" and value == "vars":
            if n is not None:
                raise ModelSyntaxError(number, column, "variables declared twice")
            reader.take()
            if reader.peek()[0] != "number" or "/" in reader.peek()[1]:
                reader.fail("expected the number of variables")
            n = int(reader.take()[1])
            if reader.peek()[0] is not None:
                reader.fail("unexpected text after the variable count")
            continue
        if n is None:
            raise ModelSyntaxError(number, column, "expected 'vars <n>' before any row")
        if kind == "word" and value in ("max", "min"):
            if objective is not None:
                raise ModelSyntaxError(number, column, "second objective")
            reader.take()
            coefs, constant = reader.expression()
            if reader.peek()[0] is not None:
                reader.fail("objective cannot contain a sense")
            if constant != 0:
                raise ModelSyntaxError(number, column, "objective constants are not supported")
            objective = Objective(value, coefs)
            continue
        if kind == "word":
            raise ModelSyntaxError(number, column, "unknown keyword '" + value + "'")
        coefs, constant = reader.expression()
        if reader.peek()[0] != "sense":
            reader.fail("expected '>=', '<=' or '='")
        sense = reader.take()[1]
        rhs = reader.rhs() - constant
        source = raw.strip()
        if sense in (">=", "="):
            rows.append(LinIneq(coefs, rhs, text=source))
        if sense in ("<=", "="):
            rows.append(LinIneq({var: -value for var, value in coefs.items()}, -rhs, text=source))
    if n is None:
        raise ModelSyntaxError(1, 1, "missing 'vars <n>' declaration")
    logger.debug("parsed {rows} rows over {n} variables".format(rows=len(rows), n=n))
    return BinarySystem(n, tuple(rows)), objective


def format_model(S, objective=None):
    """Model file text that parses back to ``S`` and ``objective``."""
    return S.to_text(objective)


def load_model(path):
    """Read and parse a model file; bytes that are not UTF-8 are a syntax error."""
    with open(path, "rb") as file:
        data = file.read()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as err:
        line_start = data.rfind(b"\n", 0, err.start) + 1
        raise ModelSyntaxError(
            data.count(b"\n", 0, err.start) + 1, err.start - line_start + 1, "file is not UTF-8 text"
        )
    return parse_model(text)
