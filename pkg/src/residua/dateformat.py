"""Reader and canonical writer for the line-oriented ``.date`` format.

::

    date <name>
    param <token>
    alphabet <e1> <e2> ...
    var int <name> = <int>
    var bool <name> = true|false
    states <q...>
    initial <q>
    bad <q...>
    trans <q> -> <q'> on <event|*> [if <guard>] [do <assign>{; <assign>}]
"""

from __future__ import annotations

import re

from . import expr as ex
from .date import DateSpec, Transition, VarDecl, check_token
from .errors import SpecError

_WORD = re.compile(r"\S+")
_DO = re.compile(r"(?:^|\s)do(?=\s|$)")
_VAR_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NOT_VAR = ex.KEYWORDS | {"if", "do", "skip"}


def _words(line: str):
    """Yield (word, 1-based column) pairs, stopping at a comment."""
    for m in _WORD.finditer(line):
        yield m.group(), m.start() + 1


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_date(text: str) -> DateSpec:
    name = param = initial = None
    alphabet: list[str] = []
    states: list[str] = []
    bad: list[str] = []
    vars_: list[VarDecl] = []
    raw_trans = []  # (lineno, col, src, dst, event, guard, action)
    stars = []  # (lineno, src, dst)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        words = list(_words(line))
        if not words:
            continue
        head, hcol = words[0]
        args = words[1:]

        def tokens(what):
            for w, c in args:
                try:
                    check_token(w, what)
                except SpecError as err:
                    raise SpecError(err.message, lineno, c) from None
            return [w for w, _ in args]

        if head == "date":
            if name is not None:
                raise SpecError("duplicate 'date' line", lineno, hcol)
            if len(args) != 1:
                raise SpecError("expected: date <name>", lineno, hcol)
            name = tokens("name")[0]
        elif head == "param":
            if len(args) != 1:
                raise SpecError("expected: param <token>", lineno, hcol)
            param = tokens("parameter")[0]
        elif head == "alphabet":
            alphabet += tokens("event")
        elif head == "states":
            states += tokens("state")
        elif head == "bad":
            bad += tokens("state")
        elif head == "initial":
            if initial is not None:
                raise SpecError("duplicate 'initial' line", lineno, hcol)
            if len(args) != 1:
                raise SpecError("expected: initial <state>", lineno, hcol)
            initial = tokens("state")[0]
        elif head == "var":
            vars_.append(_parse_var(line, args, lineno, hcol))
        elif head == "trans":
            _parse_trans(line, args, lineno, hcol, raw_trans, stars)
        else:
            raise SpecError(f"unknown directive {head!r}", lineno, hcol)

    if name is None:
        raise SpecError("missing 'date' line")
    if initial is None:
        raise SpecError("missing 'initial' line")
    if len(set(alphabet)) != len(alphabet):
        raise SpecError("duplicate event in alphabet")
    state_set = set(states)
    if states and initial not in state_set:
        raise SpecError(f"initial state {initial!r} is not declared")
    for q in bad:
        if q not in state_set:
            raise SpecError(f"bad state {q!r} is not declared")
    env = {}
    for v in vars_:
        if v.name in env:
            raise SpecError(f"duplicate variable {v.name!r}")
        env[v.name] = v.kind
    alpha_set = set(alphabet)

    transitions: dict = {}
    for lineno, col, gcol, acol, src, dst, event, guard, action in raw_trans:
        for q in (src, dst):
            if q not in state_set:
                raise SpecError(f"undeclared state {q!r}", lineno, col)
        if event not in alpha_set:
            raise SpecError(f"event {event!r} is not in the alphabet", lineno, col)
        try:
            if ex.check_expr(guard, env, lineno) != ex.BOOL:
                raise SpecError("guard must be boolean", lineno)
        except SpecError as err:
            raise SpecError(err.message, lineno, gcol) from None
        try:
            ex.check_action(action, env, lineno)
        except SpecError as err:
            raise SpecError(err.message, lineno, acol) from None
        t = Transition(src, event, guard, action, dst)
        key = (src, event, guard)
        if key in transitions and transitions[key] != t:
            raise SpecError(f"duplicate edge from {src!r} on {event!r}", lineno, col)
        transitions[key] = t

    explicit = {(t.source, t.event) for t in transitions.values()}
    for lineno, src, dst in stars:
        for q in (src, dst):
            if q not in state_set:
                raise SpecError(f"undeclared state {q!r}", lineno)
        for e in alphabet:
            if (src, e) in explicit:
                continue
            t = Transition(src, e, ex.TRUE, ex.SKIP, dst)
            key = (src, e, ex.TRUE)
            if key in transitions and transitions[key] != t:
                raise SpecError(f"conflicting '*' transitions from {src!r}", lineno)
            transitions[key] = t

    return DateSpec(frozenset(states), frozenset(alphabet), tuple(vars_), initial,
                    frozenset(bad), frozenset(transitions.values()),
                    name=name, param=param or "x")


def _parse_var(line, args, lineno, hcol) -> VarDecl:
    if len(args) < 4 or args[2][0] != "=":
        raise SpecError("expected: var int|bool <name> = <value>", lineno, hcol)
    (kind, kcol), (vname, ncol) = args[0], args[1]
    if kind not in (ex.INT, ex.BOOL):
        raise SpecError(f"unknown variable kind {kind!r}", lineno, kcol)
    if not _VAR_NAME.fullmatch(vname) or vname in _NOT_VAR:
        raise SpecError(f"invalid variable name {vname!r}", lineno, ncol)
    value_text = line[args[3][1] - 1:].strip()
    vcol = args[3][1]
    if kind == ex.BOOL:
        if value_text not in ("true", "false"):
            raise SpecError("bool variables need a true/false initial value", lineno, vcol)
        value = value_text == "true"
    else:
        lit = ex.parse_expr(value_text, lineno, vcol)
        if not isinstance(lit, ex.IntLit):
            raise SpecError("int variables need an integer literal initial value", lineno, vcol)
        value = lit.value
    return VarDecl(vname, kind, value)


def _parse_trans(line, args, lineno, hcol, raw_trans, stars):
    if len(args) < 5 or args[1][0] != "->" or args[3][0] != "on":
        raise SpecError("expected: trans <q> -> <q'> on <event> [if ...] [do ...]", lineno, hcol)
    (src, scol), (dst, dcol), (event, ecol) = args[0], args[2], args[4]
    for w, c in ((src, scol), (dst, dcol)):
        try:
            check_token(w, "state")
        except SpecError as err:
            raise SpecError(err.message, lineno, c) from None
    rest_start = ecol - 1 + len(event)
    rest = line[rest_start:]
    guard, action = ex.TRUE, ex.SKIP
    gcol = acol = ecol
    m = _DO.search(rest)
    guard_text = rest[: m.start()] if m else rest
    gstripped = guard_text.strip()
    if gstripped:
        if not re.match(r"if(\s|$)", gstripped):
            raise SpecError(f"expected 'if' or 'do', found {gstripped.split()[0]!r}",
                            lineno, rest_start + guard_text.index(gstripped) + 1)
        gofs = rest_start + guard_text.index(gstripped) + 2
        gcol = gofs + 1 + (len(line[gofs:]) - len(line[gofs:].lstrip()))
        guard = ex.parse_expr(line[gofs: rest_start + len(guard_text)], lineno, gofs + 1)
    if m:
        aofs = rest_start + m.end()
        acol = aofs + 1 + (len(line[aofs:]) - len(line[aofs:].lstrip()))
        action = ex.parse_action(line[aofs:], lineno, aofs + 1)
        if not action:
            raise SpecError("empty 'do' clause", lineno, aofs)
    if event == "*":
        if gstripped or m:
            raise SpecError("'*' transitions take no guard or action", lineno, ecol)
        stars.append((lineno, src, dst))
        return
    try:
        check_token(event, "event")
    except SpecError as err:
        raise SpecError(err.message, lineno, ecol) from None
    raw_trans.append((lineno, ecol, gcol, acol, src, dst, event, guard, action))


def print_date(d: DateSpec) -> str:
    lines = [f"date {d.name}", f"param {d.param}"]
    lines.append(" ".join(["alphabet", *sorted(d.alphabet)]))
    for v in d.vars:
        val = ("true" if v.initial else "false") if v.kind == ex.BOOL else str(v.initial)
        lines.append(f"var {v.kind} {v.name} = {val}")
    lines.append(" ".join(["states", *sorted(d.states)]))
    lines.append(f"initial {d.initial}")
    if d.bad:
        lines.append(" ".join(["bad", *sorted(d.bad)]))
    for t in d.sorted_transitions():
        lines.append(f"trans {t}")
    return "\n".join(lines) + "\n"
