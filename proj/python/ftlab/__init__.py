"""Fault-tree analysis engine and learning environments."""

import json

from ._core import (
    PROTOCOL_VERSION,
    Error,
    FaultTree,
    ParseError,
    brute_force_mcs,
    gate_probabilities,
    generate,
    is_cut_set,
    load,
    minimal_cut_sets,
    parse,
    parse_ftdsl,
    parse_openpsa,
    top_probability,
    vertex_reward,
)
from . import _core

__all__ = [
    "PROTOCOL_VERSION",
    "CutSetEnv",
    "Error",
    "FaultTree",
    "ParseError",
    "Server",
    "VertexQuantEnv",
    "brute_force_mcs",
    "gate_probabilities",
    "generate",
    "is_cut_set",
    "load",
    "minimal_cut_sets",
    "parse",
    "parse_ftdsl",
    "parse_openpsa",
    "top_probability",
    "vertex_reward",
]


class VertexQuantEnv:
    """Prescribe each gate's failure probability, in topological order."""

    def __init__(self):
        self._env = _core.VertexQuantEnv()

    def reset(self, seed=0, tree=None, mode="symmetric", **gen_config):
        if tree is not None:
            return json.loads(self._env.reset_tree(tree, mode))
        return json.loads(self._env.reset_generated(seed, mode=mode, **gen_config))

    def step(self, prescribed):
        return json.loads(self._env.step(float(prescribed)))

    @property
    def done(self):
        return self._env.done

    @property
    def queries(self):
        return list(self._env.queries)


class CutSetEnv:
    """Prune edges and vertices, then submit the surviving basic events."""

    def __init__(self):
        self._env = _core.CutSetEnv()

    def reset(self, seed=0, tree=None, max_steps=None, **gen_config):
        if tree is not None:
            return json.loads(self._env.reset_tree(tree, max_steps))
        return json.loads(self._env.reset_generated(seed, **gen_config))

    def step(self, action):
        kind = action["type"]
        if kind == "remove_edge":
            raw = self._env.step(kind, action["child"], action["parent"])
        elif kind == "remove_vertex":
            raw = self._env.step(kind, action["id"])
        else:
            raw = self._env.step(kind)
        return json.loads(raw)

    @property
    def done(self):
        return self._env.done


class Server:
    """In-process protocol endpoint; same responses as the stdio server."""

    def __init__(self, max_sessions=64, token_seed=None):
        if token_seed is None:
            self._server = _core.Server(max_sessions=max_sessions)
        else:
            self._server = _core.Server(max_sessions=max_sessions, token_seed=token_seed)

    def handle_line(self, line):
        return self._server.handle_line(line)

    def request(self, cmd, payload=None, session=None):
        req = {"cmd": cmd}
        if payload is not None:
            req["payload"] = payload
        if session is not None:
            req["session"] = session
        return json.loads(self._server.handle_line(json.dumps(req)))
