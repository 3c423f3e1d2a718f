"""Text formats: problem files, controller documents and iteration traces.

Problem files use the line-oriented ``.dpomdp`` dialect::

    agents: 2
    discount: 0.99
    values: reward
    states: 4                    # a count or a list of labels
    actions:
    wait fire                    # one line per agent: a count or labels
    wait fire
    observations:
    lo hi
    lo hi
    start: uniform               # probabilities, 'uniform', or a state
    T: <a1 ... aN> : <x> : <x'> : <p>
    O: <a1 ... aN> : <x'> : <o1 ... oN> : <p>
    R: <a1 ... aN> : <x> : <value>

Indices may be labels, integers or ``*``.  Row and matrix forms of ``T``/``O``
(the value on the following line(s), including ``uniform``/``identity``) are
accepted, as is the five-field reward form ``R: a : x : x' : y : v`` when
both ``x'`` and ``y`` are wildcards.  The observation table is conditioned on
the *new* state and the action that led to it.

Unassigned probabilities are 0.  A later line may override cells set by a
wildcard or ``uniform`` line, but a cell named explicitly twice is an error.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .model import STOCHASTIC_TOL, DecPomdpModel, JointPolicy, validate_model

_HEADER_KEYS = ("agents", "discount", "values", "states", "actions", "observations", "start")
_UNSET, _WILD, _EXPLICIT = 0, 1, 2
# guards against documents whose declared sizes would exhaust memory
MAX_SET_SIZE = 100_000
MAX_TABLE_CELLS = 50_000_000
# row sums this close to 1 are taken as written; others within STOCHASTIC_TOL are rescaled
_KEEP_TOL = 1e-12


@dataclass(frozen=True)
class ModelDocument:
    text: str
    model: DecPomdpModel
    source: str


def _fmt(v) -> str:
    v = float(v)
    if v == 0.0:
        return "0"
    return format(v, ".17g")


def _safe_label(s) -> bool:
    return bool(s) and not any(c.isspace() or c in ":#*" for c in s)


class _Lines:
    """Comment-stripped, non-empty lines with their 1-based line numbers."""

    def __init__(self, text, source):
        self.text = text
        self.items = []
        for no, raw in enumerate(text.splitlines(), start=1):
            body = raw.split("#", 1)[0].strip()
            if body:
                self.items.append((no, body))
        self.pos = 0
        self.source = source
        self.last_line = len(text.splitlines()) or 1

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, None)

    def next(self, what="a line"):
        if self.pos >= len(self.items):
            raise ParseError(f"unexpected end of document, expected {what}", self.last_line, self.source)
        item = self.items[self.pos]
        self.pos += 1
        return item

    def error(self, msg, line):
        return ParseError(msg, line, self.source)


def _floats(tokens, count, lines, line, what):
    if len(tokens) != count:
        raise lines.error(f"{what}: expected {count} numbers, got {len(tokens)}", line)
    try:
        vals = [float(t) for t in tokens]
    except ValueError:
        raise lines.error(f"{what}: non-numeric value in {' '.join(tokens)!r}", line) from None
    if not all(np.isfinite(vals)):
        raise lines.error(f"{what}: non-finite value", line)
    return vals


def _space(tokens, lines, line, what):
    """A set declaration: a single count or a list of labels."""
    if not tokens:
        raise lines.error(f"{what}: empty declaration", line)
    if len(tokens) == 1 and tokens[0].isdigit():
        n = int(tokens[0])
        if n < 1:
            raise lines.error(f"{what}: size must be positive", line)
        if n > MAX_SET_SIZE:
            raise lines.error(f"{what}: size {n} exceeds the limit {MAX_SET_SIZE}", line)
        return [str(i) for i in range(n)]
    if len(set(tokens)) != len(tokens):
        raise lines.error(f"{what}: duplicate labels", line)
    return list(tokens)


def _resolve(token, labels, lines, line, what):
    """Indices named by one token: label, integer index or wildcard."""
    if token == "*":
        return list(range(len(labels))), True
    if token in labels:
        return [labels.index(token)], False
    if token.isdigit() and int(token) < len(labels):
        return [int(token)], False
    raise lines.error(f"unknown {what} {token!r}", line)


def _resolve_joint(field, per_agent, lines, line, what):
    """Joint indices named by a whitespace-separated per-agent field."""
    tokens = field.split()
    sizes = [len(l) for l in per_agent]
    if len(tokens) == len(per_agent):
        choices, wild = [], False
        for tok, labels in zip(tokens, per_agent):
            idx, w = _resolve(tok, labels, lines, line, what)
            choices.append(idx)
            wild |= w
        flat = [int(np.ravel_multi_index(c, sizes)) for c in itertools.product(*choices)]
        return flat, wild
    if len(tokens) == 1:
        total = math.prod(sizes)
        if tokens[0] == "*":
            return list(range(total)), True
        if tokens[0].isdigit() and int(tokens[0]) < total:
            return [int(tokens[0])], False
    raise lines.error(f"bad joint {what} {field.strip()!r}", line)


class _Table:
    def __init__(self, shape):
        self.val = np.zeros(shape)
        self.src = np.zeros(shape, dtype=np.int8)
        self.line = np.zeros(shape[:-1], dtype=np.int64)

    def assign(self, index, values, wild, lines, line, what):
        tag = _WILD if wild else _EXPLICIT
        if np.any(self.src[index] == _EXPLICIT):
            raise lines.error(f"duplicate assignment to {what}", line)
        self.val[index] = values
        self.src[index] = tag
        if self.line.ndim:
            self.line[index[: self.line.ndim]] = line


def _split_fields(body):
    return [f.strip() for f in body.split(":")]


def _value_after(fields, n_index, lines, line):
    """Split off the trailing value of an entry line, allowing ``x' %f`` without a colon."""
    if len(fields) == n_index + 1:
        return fields[:n_index], fields[n_index].split()
    if len(fields) == n_index:
        last = fields[-1].split()
        if len(last) >= 2:
            return fields[:-1] + [last[0]], last[1:]
        return fields, None
    raise lines.error("wrong number of ':'-separated fields", line)


def _trailing_value(fields, n_index, n_agents, lines, line):
    """Like :func:`_value_after` when the last index field is a joint observation."""
    if len(fields) == n_index + 1:
        return fields[:n_index], fields[n_index].split()
    if len(fields) == n_index:
        toks = fields[-1].split()
        if len(toks) == n_agents + 1:
            return fields[:-1] + [" ".join(toks[:-1])], toks[-1:]
        return fields, None
    raise lines.error("wrong number of ':'-separated fields", line)


def parse_model(text: str, source: str = "<string>", gamma: float | None = None) -> DecPomdpModel:
    """Parse a ``.dpomdp`` document; ``gamma`` overrides the file's discount."""
    return parse_document(text, source, gamma).model


def parse_document(text: str, source: str = "<string>", gamma: float | None = None) -> ModelDocument:
    lines = _Lines(text, source)
    try:
        return _parse(lines, gamma)
    except ParseError:
        raise
    except (ValueError, IndexError, KeyError, TypeError, OverflowError, MemoryError) as exc:
        # any slip through the explicit checks still reports a location
        line = lines.items[lines.pos - 1][0] if lines.pos else 1
        raise ParseError(f"malformed document: {exc}", line, source) from exc


def load_model(path, gamma: float | None = None) -> DecPomdpModel:
    with open(path, encoding="utf-8", errors="replace") as fh:
        return parse_model(fh.read(), str(path), gamma)


def _parse(lines, gamma_override):
    text, source = lines.text, lines.source
    head = {}
    n_agents = None
    start_spec = None

    # header
    while True:
        no, body = lines.peek()
        if body is None:
            break
        key, sep, rest = body.partition(":")
        key = key.strip()
        if key in ("T", "O", "R"):
            break
        if not sep:
            raise lines.error(f"expected 'key: value', got {body!r}", no)
        if key in ("start include", "start exclude"):
            key, rest = "start", f"{key.split()[1]} {rest}"
        if key not in _HEADER_KEYS:
            raise lines.error(f"unknown keyword {key!r}", no)
        if key in head:
            raise lines.error(f"duplicate header {key!r}", no)
        lines.next()
        toks = rest.split()
        if key == "agents":
            if not toks:
                raise lines.error("agents: missing value", no)
            n_agents = int(toks[0]) if len(toks) == 1 and toks[0].isdigit() else len(toks)
            if n_agents < 1:
                raise lines.error("agents: need at least one agent", no)
            head[key] = n_agents
        elif key == "discount":
            head[key] = _floats(toks, 1, lines, no, "discount")[0]
        elif key == "values":
            if toks not in (["reward"], ["cost"]):
                raise lines.error("values: expected 'reward' or 'cost'", no)
            head[key] = toks[0]
        elif key == "states":
            head[key] = _space(toks, lines, no, "states")
        elif key in ("actions", "observations"):
            if n_agents is None:
                raise lines.error(f"{key}: 'agents' must come first", no)
            per = []
            if toks:
                per.append(_space(toks, lines, no, key))
            while len(per) < n_agents:
                lno, lbody = lines.next(f"{key} of agent {len(per)}")
                per.append(_space(lbody.split(), lines, lno, key))
            head[key] = per
        elif key == "start":
            if "states" not in head:
                raise lines.error("start: 'states' must come first", no)
            if not toks:
                lno, lbody = lines.next("start distribution")
                toks = lbody.split()
                no = lno
            start_spec = (no, toks)
            head[key] = True

    for key in ("agents", "discount", "states", "actions", "observations"):
        if key not in head:
            raise lines.error(f"missing header {key!r}", lines.peek()[0] or lines.last_line)

    states = head["states"]
    acts = head["actions"]
    obs = head["observations"]
    nx = len(states)
    na = math.prod(len(a) for a in acts)
    ny = math.prod(len(o) for o in obs)
    cells = nx * na * max(nx, ny)
    if cells > MAX_TABLE_CELLS:
        where = lines.peek()[0] or lines.last_line
        raise lines.error(f"declared sizes need {cells} table cells, limit {MAX_TABLE_CELLS}", where)

    if start_spec is None:
        p0 = np.full(nx, 1.0 / nx)
    else:
        p0 = _start(start_spec, states, lines)

    T = _Table((nx, na, nx))
    O = _Table((nx, na, ny))
    R = _Table((nx, na, 1))
    while True:
        no, body = lines.peek()
        if body is None:
            break
        lines.next()
        key, sep, rest = body.partition(":")
        key = key.strip()
        if key == "T":
            _transition_line(rest, no, lines, T, states, acts)
        elif key == "O":
            _observation_line(rest, no, lines, O, states, acts, obs)
        elif key == "R":
            _reward_line(rest, no, lines, R, states, acts, obs)
        elif key in _HEADER_KEYS:
            raise lines.error(f"header {key!r} after the body started", no)
        else:
            raise lines.error(f"unknown keyword {key!r}", no)

    trans = _complete(T, lines, "transition", ("x", "a"))
    ofun = _complete(O, lines, "observation", ("x'", "a"))
    reward = R.val[..., 0]
    if head.get("values") == "cost":
        reward = -reward
    gamma = head["discount"] if gamma_override is None else float(gamma_override)
    model = DecPomdpModel(
        states=states,
        actions=acts,
        observations=obs,
        initial_state=p0,
        transition=trans,
        observation_fn=ofun,
        reward=reward,
        discount=gamma,
        name=source,
    )
    problems = validate_model(model)
    if problems:
        raise ParseError("; ".join(problems[:5]), lines.last_line, source)
    return ModelDocument(text, model, source)


def _start(entry, states, lines):
    no, toks = entry
    nx = len(states)
    if toks == ["uniform"]:
        return np.full(nx, 1.0 / nx)
    if toks and toks[0] in ("include", "exclude"):
        chosen = set()
        for tok in toks[1:]:
            idx, _ = _resolve(tok, states, lines, no, "state")
            chosen.update(idx)
        if toks[0] == "exclude":
            chosen = set(range(nx)) - chosen
        if not chosen:
            raise lines.error("start: empty support", no)
        p0 = np.zeros(nx)
        p0[sorted(chosen)] = 1.0 / len(chosen)
        return p0
    if len(toks) == nx:
        try:
            p0 = np.array([float(t) for t in toks])
        except ValueError:
            p0 = None
        if p0 is not None:
            return _renormalize(p0, lines, no, "start distribution")
    if len(toks) == 1:
        idx, _ = _resolve(toks[0], states, lines, no, "state")
        p0 = np.zeros(nx)
        p0[idx] = 1.0 / len(idx)
        return p0
    raise lines.error(f"start: expected {nx} probabilities, 'uniform' or a state", no)


def _renormalize(row, lines, no, what):
    if not np.all(np.isfinite(row)) or (row < 0).any():
        raise lines.error(f"{what} has negative or non-finite entries", no)
    s = row.sum()
    if abs(s - 1.0) > STOCHASTIC_TOL:
        raise lines.error(f"{what} sums to {s!r}, expected 1", no)
    return row if abs(s - 1.0) <= _KEEP_TOL else row / s


def _complete(table, lines, label, names):
    val = table.val
    sums = val.sum(axis=-1)
    for idx in np.ndindex(sums.shape):
        line = int(table.line[idx]) or lines.last_line
        where = "(" + ", ".join(f"{n}={i}" for n, i in zip(names, idx)) + ")"
        if (val[idx] < 0).any():
            raise lines.error(f"{label} row {where} has negative entries", line)
        if sums[idx] == 0.0:
            raise lines.error(f"{label} row {where} is incomplete (no probability mass)", line)
        if abs(sums[idx] - 1.0) > STOCHASTIC_TOL:
            raise lines.error(f"{label} row {where} sums to {sums[idx]!r}, expected 1", line)
    # rows that are stochastic up to rounding keep their written values, so
    # serialize/parse round trips are exact
    keep = np.abs(sums - 1.0) <= _KEEP_TOL
    return np.where(keep[..., None], val, val / sums[..., None])


def _row_values(lines, n, what):
    no, body = lines.next(what)
    toks = body.split()
    if toks == ["uniform"]:
        return no, np.full(n, 1.0 / n), True
    return no, np.array(_floats(toks, n, lines, no, what)), False


def _transition_line(rest, no, lines, T, states, acts):
    fields = _split_fields(rest)
    nx = len(states)
    if len(fields) >= 3:
        idx, value = _value_after(fields, 3, lines, no)
        a_idx, wa = _resolve_joint(idx[0], acts, lines, no, "action")
        x_idx, wx = _resolve(idx[1], states, lines, no, "state")
        x2_idx, wx2 = _resolve(idx[2], states, lines, no, "state")
        if value is None:
            value = lines.next("transition probability")[1].split()
        p = _floats(value, 1, lines, no, "transition probability")[0]
        T.assign(np.ix_(x_idx, a_idx, x2_idx), p, wa or wx or wx2, lines, no, "transition entry")
        return
    if len(fields) == 2:
        a_idx, wa = _resolve_joint(fields[0], acts, lines, no, "action")
        x_idx, wx = _resolve(fields[1], states, lines, no, "state")
        _, row, uni = _row_values(lines, nx, "transition row")
        T.assign(np.ix_(x_idx, a_idx, range(nx)), row, wa or wx or uni, lines, no, "transition row")
        return
    if len(fields) == 1:
        a_idx, wa = _resolve_joint(fields[0], acts, lines, no, "action")
        lno, body = lines.next("transition matrix")
        toks = body.split()
        if toks in (["uniform"], ["identity"]):
            mat = np.full((nx, nx), 1.0 / nx) if toks == ["uniform"] else np.eye(nx)
            wild = True
        else:
            rows = [_floats(toks, nx, lines, lno, "transition matrix row")]
            for _ in range(nx - 1):
                lno, body = lines.next("transition matrix row")
                rows.append(_floats(body.split(), nx, lines, lno, "transition matrix row"))
            mat = np.array(rows)
            wild = False
        for a in a_idx:
            T.assign((slice(None), a, slice(None)), mat, wa or wild, lines, no, "transition matrix")
        return
    raise lines.error("malformed T line", no)


def _observation_line(rest, no, lines, O, states, acts, obs):
    fields = _split_fields(rest)
    nx = len(states)
    ny = O.val.shape[2]
    if len(fields) in (3, 4):
        idx, value = _trailing_value(fields, 3, len(obs), lines, no)
        a_idx, wa = _resolve_joint(idx[0], acts, lines, no, "action")
        x_idx, wx = _resolve(idx[1], states, lines, no, "state")
        y_idx, wy = _resolve_joint(idx[2], obs, lines, no, "observation")
        if value is None:
            value = lines.next("observation probability")[1].split()
        p = _floats(value, 1, lines, no, "observation probability")[0]
        O.assign(np.ix_(x_idx, a_idx, y_idx), p, wa or wx or wy, lines, no, "observation entry")
        return
    if len(fields) == 2:
        a_idx, wa = _resolve_joint(fields[0], acts, lines, no, "action")
        x_idx, wx = _resolve(fields[1], states, lines, no, "state")
        _, row, uni = _row_values(lines, ny, "observation row")
        O.assign(np.ix_(x_idx, a_idx, range(ny)), row, wa or wx or uni, lines, no, "observation row")
        return
    if len(fields) == 1:
        a_idx, wa = _resolve_joint(fields[0], acts, lines, no, "action")
        lno, body = lines.next("observation matrix")
        toks = body.split()
        if toks == ["uniform"]:
            mat, wild = np.full((nx, ny), 1.0 / ny), True
        else:
            rows = [_floats(toks, ny, lines, lno, "observation matrix row")]
            for _ in range(nx - 1):
                lno, body = lines.next("observation matrix row")
                rows.append(_floats(body.split(), ny, lines, lno, "observation matrix row"))
            mat, wild = np.array(rows), False
        for a in a_idx:
            O.assign((slice(None), a, slice(None)), mat, wa or wild, lines, no, "observation matrix")
        return
    raise lines.error("malformed O line", no)


def _reward_line(rest, no, lines, R, states, acts, obs):
    fields = _split_fields(rest)
    if len(fields) in (4, 5):
        # R: a : x : x' : y : v -- only allowed when x' and y are wildcards
        idx, value = _trailing_value(fields, 4, len(obs), lines, no)
        if value is None:
            value = lines.next("reward value")[1].split()
        if idx[2] != "*" or any(t != "*" for t in idx[3].split()):
            raise lines.error(
                "rewards that depend on the next state or the observation are not supported; "
                "the reward must be r(x, a)",
                no,
            )
        fields = idx[:2]
    elif len(fields) in (2, 3):
        idx, value = _value_after(fields, 2, lines, no)
        if value is None:
            value = lines.next("reward value")[1].split()
        fields = idx
    else:
        raise lines.error("malformed R line", no)
    a_idx, wa = _resolve_joint(fields[0], acts, lines, no, "action")
    x_idx, wx = _resolve(fields[1], states, lines, no, "state")
    v = _floats(value, 1, lines, no, "reward value")[0]
    R.assign(np.ix_(x_idx, a_idx, [0]), v, wa or wx, lines, no, "reward entry")


def serialize_model(model: DecPomdpModel) -> str:
    """Canonical text for a model; parses back to identical tables."""
    def space(labels):
        if list(labels) == [str(i) for i in range(len(labels))]:
            return str(len(labels)), [str(i) for i in range(len(labels))]
        if all(_safe_label(l) for l in labels):
            return " ".join(labels), list(labels)
        return str(len(labels)), [str(i) for i in range(len(labels))]

    st_head, st = space(model.states)
    act = [space(a) for a in model.actions]
    obs = [space(o) for o in model.observations]
    a_sizes = model.action_counts
    y_sizes = model.observation_counts

    def joint(i, per, sizes):
        return " ".join(per[k][1][d] for k, d in enumerate(np.unravel_index(i, sizes)))

    out = [
        f"agents: {model.num_agents}",
        f"discount: {_fmt(model.discount)}",
        "values: reward",
        f"states: {st_head}",
        "actions:",
        *[h for h, _ in act],
        "observations:",
        *[h for h, _ in obs],
        "start: " + " ".join(_fmt(p) for p in model.initial_state),
    ]
    for x, a, x2 in zip(*np.nonzero(model.transition)):
        out.append(f"T: {joint(a, act, a_sizes)} : {st[x]} : {st[x2]} : {_fmt(model.transition[x, a, x2])}")
    for x2, a, y in zip(*np.nonzero(model.observation_fn)):
        out.append(
            f"O: {joint(a, act, a_sizes)} : {st[x2]} : {joint(y, obs, y_sizes)} : "
            f"{_fmt(model.observation_fn[x2, a, y])}"
        )
    for x, a in zip(*np.nonzero(model.reward)):
        out.append(f"R: {joint(a, act, a_sizes)} : {st[x]} : {_fmt(model.reward[x, a])}")
    return "\n".join(out) + "\n"


# ----------------------------------------------------------------------------
# controllers


def serialize_policy(policy: JointPolicy) -> str:
    """Self-describing controller document (17 significant digits per entry)."""
    out = [
        "# finite-state controllers, one block per agent",
        f"agents: {policy.num_agents}",
        "memory: " + " ".join(str(m) for m in policy.memory_sizes),
        "actions: " + " ".join(str(p.shape[1]) for p in policy.pi),
        "observations: " + " ".join(str(l.shape[1]) for l in policy.lam),
    ]
    for i in range(policy.num_agents):
        out.append(f"nu: {i} : " + " ".join(_fmt(v) for v in policy.nu[i]))
        for z, row in enumerate(policy.pi[i]):
            out.append(f"pi: {i} : {z} : " + " ".join(_fmt(v) for v in row))
        for z in range(policy.lam[i].shape[0]):
            for y in range(policy.lam[i].shape[1]):
                out.append(f"lambda: {i} : {z} : {y} : " + " ".join(_fmt(v) for v in policy.lam[i][z, y]))
    return "\n".join(out) + "\n"


def parse_policy(text: str, source: str = "<string>") -> JointPolicy:
    lines = _Lines(text, source)
    head = {}
    for key in ("agents", "memory", "actions", "observations"):
        no, body = lines.next(f"'{key}:' header")
        k, _, rest = body.partition(":")
        if k.strip() != key:
            raise lines.error(f"expected '{key}:' header", no)
        try:
            head[key] = [int(t) for t in rest.split()]
        except ValueError:
            raise lines.error(f"{key}: expected integers", no) from None
    if len(head["agents"]) != 1 or head["agents"][0] < 1:
        raise lines.error("agents: expected one positive integer", lines.items[0][0])
    n = head["agents"][0]
    for key in ("memory", "actions", "observations"):
        if len(head[key]) != n or min(head[key]) < 1:
            raise lines.error(f"{key}: expected {n} positive sizes", lines.items[lines.pos - 1][0])
    mem, nact, nobs = head["memory"], head["actions"], head["observations"]
    cells = sum(m * (a + m * y + 1) for m, a, y in zip(mem, nact, nobs))
    if cells > MAX_TABLE_CELLS:
        raise lines.error(f"declared sizes need {cells} table cells, limit {MAX_TABLE_CELLS}", lines.items[lines.pos - 1][0])

    tabs = {
        "nu": [_Table((1, m)) for m in mem],
        "pi": [_Table((m, a)) for m, a in zip(mem, nact)],
        "lambda": [_Table((m, y, m)) for m, y in zip(mem, nobs)],
    }
    arity = {"nu": 0, "pi": 1, "lambda": 2}
    while True:
        no, body = lines.peek()
        if body is None:
            break
        lines.next()
        fields = _split_fields(body)
        key = fields[0]
        if key not in arity or len(fields) != arity[key] + 3:
            raise lines.error(f"malformed controller line {body!r}", no)
        try:
            agent = int(fields[1])
            coords = tuple(int(f) for f in fields[2:-1])
        except ValueError:
            raise lines.error("indices must be integers", no) from None
        if not 0 <= agent < n:
            raise lines.error(f"agent index {agent} out of range", no)
        tab = tabs[key][agent]
        if key == "nu":
            coords = (0,)
        if any(not 0 <= c < s for c, s in zip(coords, tab.val.shape)):
            raise lines.error("index out of range", no)
        row = _floats(fields[-1].split(), tab.val.shape[-1], lines, no, key)
        tab.assign(coords, row, False, lines, no, f"{key} row")

    def finish(key):
        out = []
        for i, tab in enumerate(tabs[key]):
            for idx in np.ndindex(tab.val.shape[:-1]):
                line = int(tab.line[idx]) or lines.last_line
                if not (tab.src[idx] == _EXPLICIT).all():
                    raise lines.error(f"agent {i}: missing {key} row {idx}", line)
                tab.val[idx] = _renormalize(tab.val[idx], lines, line, f"agent {i} {key} row {idx}")
            out.append(tab.val[0] if key == "nu" else tab.val)
        return tuple(out)

    return JointPolicy(pi=finish("pi"), lam=finish("lambda"), nu=finish("nu"))


# ----------------------------------------------------------------------------
# traces

TRACE_HEADER = ("iter", "J", "inner_iters", "elapsed_ms", "algo")


def write_trace_csv(traces) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for t in traces:
        w.writerow([t.iteration, repr(float(t.J)), t.inner_iters, f"{t.elapsed_ms:.3f}", t.algo])
    return buf.getvalue()
