"""Ground first-order terms.

Everything the engine manipulates (actions, fluents, activity names, goals)
is a ground term: a functor applied to zero or more ground terms, written in
the usual predicate notation `f(a,g(b))`. Constants are terms with no
arguments. Terms are immutable and hashable so they can live in sets and
serve as dict keys throughout the solver.
"""

from dataclasses import dataclass, field
from typing import Iterator, Tuple, Union


@dataclass(frozen=True)
class Term:
    """A ground term: functor plus argument tuple (empty for constants)."""

    functor: str
    args: Tuple["Term", ...] = ()
    # hash is consulted constantly during search; cache it eagerly
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((self.functor, self.args)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def is_constant(self) -> bool:
        return not self.args

    def render(self) -> str:
        if not self.args:
            return self.functor
        return "%s(%s)" % (self.functor, ",".join(a.render() for a in self.args))

    def __str__(self) -> str:
        return self.render()

    def constants(self) -> Iterator[str]:
        """Yield every constant name appearing in the term."""
        if not self.args:
            yield self.functor
        for a in self.args:
            yield from a.constants()


TermLike = Union[Term, str]


def T(functor: str, *args: TermLike) -> Term:
    """Build a term; bare strings become constants."""
    return Term(functor, tuple(a if isinstance(a, Term) else Term(a) for a in args))


_NAME_CHARS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_"


class TermSyntaxError(ValueError):
    """Raised when a string is not a well-formed ground term."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__("%s (at column %d)" % (message, position + 1))
        self.position = position


def parse_term(text: str) -> Term:
    """Parse `f(a,g(b))` notation into a Term.

    Whitespace is allowed around punctuation. Functor and constant names
    must start with a lowercase letter and contain only [a-z0-9_] style
    characters (identifiers, not quoted strings).
    """
    term, pos = _parse_term_at(text, _skip_ws(text, 0))
    pos = _skip_ws(text, pos)
    if pos != len(text):
        raise TermSyntaxError("trailing input after term", pos)
    return term


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse_name(text: str, pos: int) -> Tuple[str, int]:
    start = pos
    while pos < len(text) and text[pos] in _NAME_CHARS:
        pos += 1
    if pos == start:
        raise TermSyntaxError("expected an identifier", pos)
    name = text[start:pos]
    # numeric constants (story steps) are allowed; anything else must be a
    # lowercase identifier -- uppercase leads would be variables, and the
    # engine only deals in ground terms
    if name.isdigit():
        return name, pos
    if not name[0].islower():
        raise TermSyntaxError("identifiers must start with a lowercase letter", start)
    return name, pos


def _parse_term_at(text: str, pos: int) -> Tuple[Term, int]:
    name, pos = _parse_name(text, pos)
    pos = _skip_ws(text, pos)
    if pos < len(text) and text[pos] == "(":
        args = []
        pos = _skip_ws(text, pos + 1)
        if pos < len(text) and text[pos] == ")":
            raise TermSyntaxError("empty argument list", pos)
        while True:
            arg, pos = _parse_term_at(text, pos)
            args.append(arg)
            pos = _skip_ws(text, pos)
            if pos >= len(text):
                raise TermSyntaxError("unterminated argument list", pos)
            if text[pos] == ",":
                pos = _skip_ws(text, pos + 1)
                continue
            if text[pos] == ")":
                return Term(name, tuple(args)), pos + 1
            raise TermSyntaxError("expected ',' or ')'", pos)
    return Term(name), pos
