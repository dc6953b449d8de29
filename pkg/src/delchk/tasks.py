"""Two-process task specifications and the models they induce.

A task maps every admitted input pair (i, j) to the output pairs
(d_B, d_W) allowed for it.  Task files are JSON::

    {
      "agents": ["B", "W"],
      "inputs": {"B": [0, 1, 2], "W": [0, 1, 2]},
      "input_facets": "all",
      "outputs": {"B": [0, 1], "W": [0, 1]},
      "delta": [{"in": [0, 0], "out": [[0, 1], [1, 0]]}, ...]
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from itertools import product

from .model import SimplicialModel, input_atom
from .update import TASK, ActionModel, UpdateResult, extended_product_update, product_update


class TaskSpecError(ValueError):
    """A task specification violates one of its invariants."""


class TaskFileError(ValueError):
    """A task file could not be read as JSON or has the wrong structure."""

    def __init__(self, msg, line=None, col=None):
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + msg)
        self.line = line
        self.col = col


@dataclass(frozen=True)
class TaskSpec:
    agents: tuple
    inputs: dict
    input_facets: tuple
    outputs: dict
    delta: dict
    all_facets: bool = False
    name: str = ""

    def __eq__(self, other):
        if not isinstance(other, TaskSpec):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        return (
            self.agents,
            tuple(tuple(self.inputs[a]) for a in self.agents),
            self.input_facets,
            tuple(tuple(self.outputs[a]) for a in self.agents),
            tuple((k, self.delta[k]) for k in self.input_facets),
        )

    def validate(self) -> list[str]:
        errs = []
        if len(self.agents) != 2 or len(set(self.agents)) != 2:
            errs.append("exactly two distinct agents are required")
            return errs
        a, b = self.agents
        for ag in self.agents:
            if not self.inputs.get(ag):
                errs.append(f"agent {ag} has no input values")
            if not self.outputs.get(ag):
                errs.append(f"agent {ag} has no output values")
        if errs:
            return errs
        if not self.input_facets:
            errs.append("no admitted input facets")
        if len(set(self.input_facets)) != len(self.input_facets):
            errs.append("duplicate admitted input facets")
        for i, j in self.input_facets:
            if i not in self.inputs[a] or j not in self.inputs[b]:
                errs.append(f"input facet {[i, j]} uses undeclared input values")
            outs = self.delta.get((i, j))
            if not outs:
                errs.append(f"input facet {[i, j]} has no allowed output pair")
                continue
            for db, dw in outs:
                if db not in self.outputs[a] or dw not in self.outputs[b]:
                    errs.append(f"output pair {[db, dw]} for input {[i, j]} is outside the output domain")
        for k in self.delta:
            if k not in self.input_facets:
                errs.append(f"delta given for non-admitted input facet {list(k)}")
        return errs

    def check(self) -> "TaskSpec":
        errs = self.validate()
        if errs:
            raise TaskSpecError("; ".join(errs))
        return self


def make_task(inputs, outputs, rule, agents=("B", "W"), input_facets=None, name="") -> TaskSpec:
    """Build a spec from a rule ``(i, j) -> iterable of (d_B, d_W)``.

    ``inputs``/``outputs`` are either one value list shared by both agents
    or a dict per agent.  Output pairs are kept in ascending order.
    """
    if not isinstance(inputs, dict):
        inputs = {a: list(inputs) for a in agents}
    if not isinstance(outputs, dict):
        outputs = {a: list(outputs) for a in agents}
    inputs = {a: tuple(sorted(inputs[a])) for a in agents}
    outputs = {a: tuple(sorted(outputs[a])) for a in agents}
    all_facets = input_facets is None
    if all_facets:
        input_facets = list(product(inputs[agents[0]], inputs[agents[1]]))
    facets = tuple(sorted(tuple(f) for f in input_facets))
    delta = {f: tuple(sorted(set(map(tuple, rule(*f))))) for f in facets}
    return TaskSpec(tuple(agents), inputs, facets, outputs, delta, all_facets, name).check()


def equality_negation() -> TaskSpec:
    return make_task(
        [0, 1, 2], [0, 1],
        lambda i, j: [(d, d) for d in (0, 1)] if i != j else [(0, 1), (1, 0)],
        name="eqneg",
    )


def consensus(k: int = 2) -> TaskSpec:
    vals = list(range(k))
    return make_task(vals, vals, lambda i, j: [(i, i), (j, j)], name=f"consensus{k}")


def constant_zero() -> TaskSpec:
    return make_task([0, 1, 2], [0], lambda i, j: [(0, 0)], name="const0")


def free_choice() -> TaskSpec:
    return make_task([0, 1, 2], [0, 1], lambda i, j: product((0, 1), repeat=2), name="free")


BUILTINS = {
    "eqneg": equality_negation,
    "consensus2": lambda: consensus(2),
    "consensus3": lambda: consensus(3),
    "const0": constant_zero,
    "free": free_choice,
}


def builtin(name: str) -> TaskSpec:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin task {name!r}; choose from {sorted(BUILTINS)}") from None


# -- models ------------------------------------------------------------------


def build_input_model(spec: TaskSpec) -> SimplicialModel:
    """One vertex per used (agent, input) pair, one facet per admitted input pair."""
    spec.check()
    a, b = spec.agents
    used = {a: sorted({f[0] for f in spec.input_facets}), b: sorted({f[1] for f in spec.input_facets})}
    index = {}
    verts = []
    for ag in spec.agents:
        for x in used[ag]:
            index[ag, x] = len(verts)
            verts.append((ag, {input_atom(ag, x)}))
    facets = [{index[a, i], index[b, j]} for i, j in spec.input_facets]
    return SimplicialModel.build(spec.agents, verts, facets, name=spec.name or "I")


def input_facet_id(spec: TaskSpec, pair) -> int:
    return spec.input_facets.index(tuple(pair))


def build_task_action_model(spec: TaskSpec, input_model: SimplicialModel) -> ActionModel:
    """One action per output pair occurring in delta; an agent sees only its own decision."""
    outs = sorted({o for f in spec.input_facets for o in spec.delta[f]})
    pre = [
        {x for x, f in enumerate(spec.input_facets) if o in spec.delta[f]}
        for o in outs
    ]
    keep = [k for k, p in enumerate(pre) if p]
    order = list(spec.agents)
    return ActionModel.build(
        input_model, TASK, [outs[k] for k in keep],
        lambda ag, payload: payload[order.index(ag)],
        [pre[k] for k in keep],
    )


@dataclass(frozen=True, eq=False)
class TaskModels:
    spec: TaskSpec
    input: SimplicialModel
    actions: ActionModel
    output: UpdateResult
    extended_output: UpdateResult


def output_model(spec: TaskSpec) -> TaskModels:
    """Input model, task action model, I[T] and the decision-labeled extension."""
    inp = build_input_model(spec)
    am = build_task_action_model(spec, inp)
    return TaskModels(spec, inp, am, product_update(inp, am), extended_product_update(inp, am))


# -- task files --------------------------------------------------------------

_KEYS = ("agents", "inputs", "input_facets", "outputs", "delta")


def _pos(text, needle):
    idx = text.find(needle)
    if idx < 0:
        return None, None
    line = text.count("\n", 0, idx) + 1
    return line, idx - (text.rfind("\n", 0, idx) + 1) + 1


def parse_task_file(text: str, name: str = "") -> TaskSpec:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise TaskFileError(e.msg, e.lineno, e.colno) from None
    if not isinstance(raw, dict):
        raise TaskFileError("top level must be an object", 1, 1)
    for k in raw:
        if k not in _KEYS:
            raise TaskFileError(f"unknown field {k!r}", *_pos(text, f'"{k}"'))
    for k in _KEYS:
        if k not in raw:
            raise TaskFileError(f"missing field {k!r}")

    def fail(msg, key):
        raise TaskFileError(msg, *_pos(text, f'"{key}"'))

    agents = raw["agents"]
    if not (isinstance(agents, list) and len(agents) == 2 and all(isinstance(a, str) for a in agents)):
        fail("'agents' must be an array of two names", "agents")
    agents = tuple(agents)

    def int_lists(key):
        val = raw[key]
        if not isinstance(val, dict) or set(val) != set(agents):
            fail(f"'{key}' must map each agent to an array of integers", key)
        for a in agents:
            if not isinstance(val[a], list) or not all(type(x) is int for x in val[a]):
                fail(f"'{key}' must map each agent to an array of integers", key)
        return val

    inputs = int_lists("inputs")
    outputs = int_lists("outputs")

    def int_pair(p):
        return isinstance(p, list) and len(p) == 2 and all(type(x) is int for x in p)

    facets_raw = raw["input_facets"]
    if facets_raw == "all":
        facets = None
    elif isinstance(facets_raw, list) and all(int_pair(p) for p in facets_raw):
        facets = [tuple(p) for p in facets_raw]
    else:
        fail("'input_facets' must be \"all\" or an array of [i, j] pairs", "input_facets")

    delta = {}
    if not isinstance(raw["delta"], list):
        fail("'delta' must be an array", "delta")
    for entry in raw["delta"]:
        if not (isinstance(entry, dict) and set(entry) == {"in", "out"} and int_pair(entry["in"])
                and isinstance(entry["out"], list) and all(int_pair(p) for p in entry["out"])):
            fail("each delta entry must be {\"in\": [i, j], \"out\": [[dB, dW], ...]}", "delta")
        key = tuple(entry["in"])
        if key in delta:
            fail(f"duplicate delta entry for input {list(key)}", "delta")
        delta[key] = [tuple(p) for p in entry["out"]]

    all_facets = facets is None
    if all_facets:
        facets = list(product(inputs[agents[0]], inputs[agents[1]]))
    facets = tuple(sorted(facets))
    spec = TaskSpec(
        agents,
        {a: tuple(sorted(inputs[a])) for a in agents},
        facets,
        {a: tuple(sorted(outputs[a])) for a in agents},
        {k: tuple(sorted(set(v))) for k, v in delta.items()},
        all_facets,
        name,
    )
    return spec.check()


def dump_task_file(spec: TaskSpec) -> str:
    """Canonical JSON text for ``spec``; parsing it gives back an equal spec."""
    lines = ["{"]
    lines.append(f'  "agents": {json.dumps(list(spec.agents))},')
    lines.append('  "inputs": ' + json.dumps({a: list(spec.inputs[a]) for a in spec.agents}) + ",")
    facets = '"all"' if spec.all_facets else json.dumps([list(f) for f in spec.input_facets])
    lines.append(f'  "input_facets": {facets},')
    lines.append('  "outputs": ' + json.dumps({a: list(spec.outputs[a]) for a in spec.agents}) + ",")
    lines.append('  "delta": [')
    entries = [
        '    {"in": ' + json.dumps(list(f)) + ', "out": ' + json.dumps([list(o) for o in spec.delta[f]]) + "}"
        for f in spec.input_facets
    ]
    lines.append(",\n".join(entries))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def builtin_task_file(name: str) -> str:
    """Shipped golden task file for a builtin."""
    return resources.files("delchk.data").joinpath(f"{name}.task.json").read_text()


def load_task(ref: str) -> TaskSpec:
    """A builtin name or a path to a task file."""
    if ref in BUILTINS:
        return builtin(ref)
    with open(ref, encoding="utf-8") as fh:
        text = fh.read()
    return parse_task_file(text, name=ref)
