"""Nielsen graph construction and proof search.

A node pairs a set of string equations with an integer constraint store.
Nodes are simplified on creation; expansion picks one action and turns it
into successors. The root is inconsistent exactly when every path ends in
a conflict, which is the only way ``unsat`` is reported.
"""

import collections
import enum
import logging
import threading
import time
from dataclasses import dataclass
from typing import Optional

from nielsen_strings.decompose import decompose, find_split
from nielsen_strings.errors import ModelVerificationError
from nielsen_strings.intsolver import (
    Interrupted,
    IntSolver,
    IntStore,
    Satisfiability,
)
from nielsen_strings.parikh import unsat_filter
from nielsen_strings.powers import detect_chain, introduce_powers
from nielsen_strings.rewrite import lemma_constraints, rewrite_term
from nielsen_strings.rules import (
    CONFLICT,
    ELIMINATE,
    GENERATE,
    RANKS,
    REWRITE,
    match_rule,
    rule_priority,
)
from nielsen_strings.terms import (
    INT,
    LEN,
    Branch,
    Equation,
    FreshNames,
    IntConstraint,
    IntTerm,
    Model,
    Power,
    Substitution,
    SymChar,
    Var,
    alphabet_of,
    apply_substitution,
    len_atom,
    symbolic_chars,
    variables,
)

logger = logging.getLogger(__name__)

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"

_SIMPL_ROUNDS = 64
_SIMPL_STEPS = 4096

_LOOK_AHEAD_RULES = {
    "solved-form",
    "prefix-run",
    "power-mismatch",
    "length-order",
}


class NodeStatus(enum.Enum):
    UNEXTENDED = "unextended"
    EXTENDED = "extended"
    SATISFIED = "satisfied"
    INCONSISTENT = "inconsistent"
    STUCK = "stuck"


@dataclass(frozen=True)
class Result:
    verdict: str
    model: Optional[Model] = None
    reason: Optional[str] = None

    def __str__(self):
        return self.verdict


@dataclass(frozen=True)
class Simplified:
    equations: tuple
    store: IntStore
    status: NodeStatus
    reason: Optional[str] = None


def _section(config):
    return config["nielsen"] if "nielsen" in config else config


def simpl(equations, store, fresh, config, stats=None):
    """Lemma rules, term rewriting and equation rewriting to a fixpoint,
    then the integer and Parikh checks."""
    settings = _section(config)
    stats = stats if stats is not None else collections.Counter()
    current = tuple(equations)
    steps = 0
    for _ in range(_SIMPL_ROUNDS):
        before = store
        store = store.add(lemma_constraints(current))
        work = collections.deque(current)
        result = []
        while work:
            store.solver.interrupt()
            equation = work.popleft()
            steps += 1
            if steps > _SIMPL_STEPS:
                logger.warning(f"Equation rewriting cut off at {equation}")
                result.append(equation)
                result.extend(work)
                break
            equation = Equation(
                rewrite_term(equation.lhs, store).term,
                rewrite_term(equation.rhs, store).term,
            )
            if equation.is_trivial():
                continue
            app = match_rule(
                equation,
                store,
                fresh,
                look_ahead=settings["look_ahead"],
                rewrites_only=True,
            )
            if app is None:
                if equation not in result:
                    result.append(equation)
                continue
            stats[f"rule:{app.rule}"] += 1
            if app.kind == CONFLICT:
                reason = f"{app.rule} on {equation}"
                return Simplified((), store, NodeStatus.INCONSISTENT, reason)
            store = store.add(app.constraints)
            work.extendleft(reversed(app.replacement))
        result = tuple(result)
        if store.inconsistent:
            return Simplified((), store, NodeStatus.INCONSISTENT, "integers")
        if result == current and store is before:
            break
        current = result
    else:
        logger.warning(f"Simplification stopped after {_SIMPL_ROUNDS} rounds")

    store = store.add(lemma_constraints(current))
    status = store.satisfiable().status
    if status is Satisfiability.UNSAT:
        return Simplified((), store, NodeStatus.INCONSISTENT, "integers")
    if settings["parikh"]:
        for equation in current:
            verdict = unsat_filter(equation, settings["max_pattern_len"])
            if verdict:
                stats["parikh_refutations"] += 1
                reason = f"pattern {verdict.pattern!r} on {equation}"
                return Simplified(
                    current, store, NodeStatus.INCONSISTENT, reason
                )
    if not current:
        if status is Satisfiability.SAT:
            return Simplified((), store, NodeStatus.SATISFIED)
        return Simplified((), store, NodeStatus.STUCK, "integers unknown")
    return Simplified(current, store, NodeStatus.UNEXTENDED)


def _rename_ints(term, images):
    return tuple(
        Power(_rename_ints(t.base, images), t.exponent.substitute(images))
        if type(t) is Power
        else t
        for t in term
    )


def _shape(term):
    """``term`` rendered without the names of variables and symbols."""
    parts = []
    for token in term:
        kind = type(token)
        if kind is Var:
            parts.append("x")
        elif kind is SymChar:
            parts.append("o")
        elif kind is Power:
            parts.append(f"({_shape(token.base)})^")
        else:
            parts.append(token.symbol)
    return " ".join(parts)


def _oriented(equations):
    """Each equation with its sides in shape order, the equations sorted
    by shape."""
    keyed = []
    for e in equations:
        lhs, rhs = _shape(e.lhs), _shape(e.rhs)
        if rhs < lhs:
            lhs, rhs, e = rhs, lhs, e.swapped()
        keyed.append(((lhs, rhs), e))
    keyed.sort(key=lambda pair: pair[0])
    return [e for _, e in keyed]


def canonical_key(equations, store):
    """Equations and constraints with names replaced in order of first
    occurrence, so that isomorphic nodes share a key. Sides and equations
    are put in a name independent order first."""
    equations = _oriented(equations)
    strings, chars, ints = {}, {}, {}

    def visit(term):
        for token in term:
            kind = type(token)
            if kind is Var:
                strings.setdefault(token.name, (Var(f"'v{len(strings)}"),))
            elif kind is SymChar:
                chars.setdefault(token.name, SymChar(f"'o{len(chars)}"))
            elif kind is Power:
                visit(token.base)
                for atom in sorted(token.exponent.atoms()):
                    if atom[0] == INT:
                        ints.setdefault(atom, IntTerm.var(f"'m{len(ints)}"))

    for equation in equations:
        visit(equation.lhs)
        visit(equation.rhs)
    for constraint in store:
        for kind, name in sorted(constraint.atoms()):
            if kind == LEN:
                strings.setdefault(name, (Var(f"'v{len(strings)}"),))
            else:
                ints.setdefault((kind, name), IntTerm.var(f"'m{len(ints)}"))

    sigma = Substitution(strings, chars)
    renamed = sorted(
        str(
            Equation(
                _rename_ints(apply_substitution(e.lhs, sigma), ints),
                _rename_ints(apply_substitution(e.rhs, sigma), ints),
            )
        )
        for e in equations
    )
    constraints = []
    for constraint in store:
        c = apply_substitution(constraint, sigma)
        c = IntConstraint(
            c.relation, c.lhs.substitute(ints), c.rhs.substitute(ints)
        )
        constraints.append(str(c.canonical()))
    return tuple(renamed), tuple(sorted(constraints))


class NielsenNode:
    def __init__(self, id, simplified, parent=None, branch=None):
        self.id = id
        self.equations = simplified.equations
        self.store = simplified.store
        self.status = simplified.status
        self.reason = simplified.reason
        self.parent = parent
        self.branch = branch
        self.depth = parent.depth + 1 if parent is not None else 0
        self.edges = []
        self.parents = []

    @property
    def children(self):
        return [child for _, child in self.edges]

    @property
    def size(self):
        return sum(len(e.lhs) + len(e.rhs) for e in self.equations)

    def __str__(self):
        return "; ".join(str(e) for e in self.equations) or "⊤"

    def __repr__(self):
        return f"NielsenNode({self.id}, {self.status.value}, {self})"


class NielsenGraph:
    """The graph for one set of input equations.

    ``config`` is the settings mapping as returned by
    ``SolverSettings.load``.
    """

    def __init__(
        self, equations, config, alphabet=None, solver=None, cancelled=None
    ):
        self.settings = _section(config)
        self.input = tuple(equations)
        self.alphabet = tuple(alphabet or alphabet_of(self.input))
        self.solver = solver or IntSolver(
            probe_bound=self.settings["probe_bound"],
            seed=self.settings["seed"],
        )
        self.fresh = FreshNames()
        self.stats = collections.Counter()
        self.nodes = []
        self.cancelled = cancelled or threading.Event()
        self._index = {}
        self.root = None

    def _add(self, equations, store, parent=None, branch=None):
        simplified = simpl(
            equations, store, self.fresh, self.settings, self.stats
        )
        self.stats["nodes_created"] += 1
        key = None
        if self.settings["dedup"]:
            key = canonical_key(simplified.equations, simplified.store)
            existing = self._index.get(key)
            if existing is not None:
                self.stats["dedup_hits"] += 1
                return existing
        node = NielsenNode(len(self.nodes), simplified, parent, branch)
        self.nodes.append(node)
        if key is not None:
            self._index[key] = node
        logger.debug(
            f"Node {node.id} ({node.status.value}): {node}"
            + (f" [{node.reason}]" if node.reason else "")
        )
        return node

    def _successors(self, node, branches):
        for branch in branches:
            sigma = branch.substitution
            equations = tuple(
                apply_substitution(e, sigma) for e in node.equations
            )
            store = node.store.substitute(
                lambda c: apply_substitution(c, sigma)
            ).add(branch.constraints)
            yield branch, equations + branch.equations, store

    def _from_application(self, node, app):
        self.stats[f"rule:{app.rule}"] += 1
        if app.rule in _LOOK_AHEAD_RULES:
            self.stats["look_ahead"] += 1
        logger.debug(f"Node {node.id}: {app}")
        if app.kind == GENERATE:
            return list(self._successors(node, app.branches))
        if app.kind == REWRITE:
            equations = list(node.equations)
            equations[app.index : app.index + 1] = app.replacement
            branch = Branch(constraints=app.constraints)
            store = node.store.add(app.constraints)
            return [(branch, tuple(equations), store)]
        return []

    def _applications(self, node, indices):
        apps = []
        for i in indices:
            app = match_rule(
                node.equations[i],
                node.store,
                self.fresh,
                look_ahead=self.settings["look_ahead"],
                index=i,
            )
            if app is not None:
                apps.append(app)
        return apps

    def select(self, node):
        """Successor triples ``(branch, equations, store)`` of the chosen
        action, or None when nothing applies."""
        equations = node.equations
        empty = [i for i, e in enumerate(equations) if not e.lhs or not e.rhs]
        apps = self._applications(node, empty)
        if apps:
            return self._from_application(node, rule_priority(apps))

        if self.settings["power_introduction"]:
            chain = detect_chain(equations, self.settings["max_chain_length"])
            if chain is not None:
                self.stats["powers_introduced"] += 1
                branches = introduce_powers(chain, node.store, self.fresh)
                logger.debug(
                    f"Node {node.id}: power introduction over "
                    f"{len(chain)} equation(s), {len(branches)} branch(es)"
                )
                return list(self._successors(node, branches))

        apps = self._applications(node, range(len(equations)))
        best = rule_priority(apps) if apps else None
        if best is not None and best.rank <= RANKS[ELIMINATE]:
            return self._from_application(node, best)

        if self.settings["decompose"]:
            for i, equation in enumerate(equations):
                split = find_split(equation, node.store)
                if split is None:
                    continue
                self.stats["decompositions"] += 1
                parts = decompose(equation, split, self.fresh)
                rest = equations[:i] + parts + equations[i + 1 :]
                return [(Branch(), rest, node.store)]

        if best is not None:
            return self._from_application(node, best)
        return None

    def expand(self, node):
        successors = self.select(node)
        if successors is None:
            logger.warning(f"Node {node.id} is stuck: {node}")
            node.status = NodeStatus.STUCK
            node.reason = "no applicable rule"
            self.stats["stuck"] += 1
            return []
        node.status = NodeStatus.EXTENDED
        self.stats["nodes_expanded"] += 1
        for branch, equations, store in successors:
            child = self._add(equations, store, node, branch)
            if child.status is NodeStatus.INCONSISTENT:
                continue
            if child not in node.children:
                node.edges.append((branch, child))
                child.parents.append(node)
        if not node.edges:
            self._mark_inconsistent(node)
        return node.children

    def _mark_inconsistent(self, node):
        pending = [node]
        while pending:
            node = pending.pop()
            if node.status is NodeStatus.INCONSISTENT:
                continue
            node.status = NodeStatus.INCONSISTENT
            for parent in node.parents:
                if parent.status is NodeStatus.EXTENDED and all(
                    c.status is NodeStatus.INCONSISTENT
                    for c in parent.children
                ):
                    pending.append(parent)

    def _check_budget(self, deadline):
        if self.cancelled.is_set():
            raise Interrupted("cancelled")
        if deadline is not None and time.monotonic() > deadline:
            raise Interrupted("timeout")
        if len(self.nodes) >= self.settings["max_nodes"]:
            raise Interrupted("max-nodes")

    def _deepen(self, bound, deadline):
        stack = [(self.root, 0)]
        visited = set()
        cut = False
        while stack:
            node, cost = stack.pop()
            if node.id in visited or node.status is NodeStatus.INCONSISTENT:
                continue
            visited.add(node.id)
            if node.status is NodeStatus.SATISFIED:
                return node, cut
            if node.status is NodeStatus.UNEXTENDED:
                self._check_budget(deadline)
                self.expand(node)
            if node.status is not NodeStatus.EXTENDED:
                continue
            for child in reversed(node.children):
                step = 0 if child.size < node.size else 1
                if cost + step > bound:
                    cut = True
                    continue
                stack.append((child, cost + step))
        return None, cut

    def _iterative_deepening(self, deadline):
        bound = 1
        max_depth = self.settings["max_depth"]
        while True:
            found, cut = self._deepen(bound, deadline)
            if found is not None or not cut:
                return found, "stuck"
            if bound >= max_depth:
                return None, "depth"
            bound = min(2 * bound, max_depth)
            logger.debug(f"Raising depth bound to {bound}")

    def _breadth_first(self, deadline):
        queue = collections.deque([self.root])
        visited = set()
        while queue:
            node = queue.popleft()
            if node.id in visited or node.status is NodeStatus.INCONSISTENT:
                continue
            visited.add(node.id)
            if node.status is NodeStatus.SATISFIED:
                return node, None
            if node.status is NodeStatus.UNEXTENDED:
                self._check_budget(deadline)
                self.expand(node)
            if node.status is NodeStatus.EXTENDED:
                queue.extend(node.children)
        return None, "stuck"

    def solve(self, deadline=None):
        """Search for a satisfied node until ``deadline`` (a
        ``time.monotonic`` value)."""
        started = time.monotonic()
        if deadline is None:
            deadline = started + self.settings["timeout"]
        search = (
            self._breadth_first
            if self.settings["strategy"] == "bfs"
            else self._iterative_deepening
        )
        self.solver.deadline = deadline
        self.solver.cancelled = self.cancelled
        try:
            if self.root is None:
                self.root = self._add(self.input, IntStore((), self.solver))
            found, reason = search(deadline)
        except Interrupted as exc:
            found, reason = None, exc.reason
        finally:
            self.solver.deadline = self.solver.cancelled = None
        self.stats["wall_time_ms"] = int((time.monotonic() - started) * 1000)
        self.stats["intsolver_queries"] = self.solver.queries
        self.stats["intsolver_cache_hits"] = self.solver.cache_hits

        if found is not None:
            return self._satisfied(found)
        root = self.root
        if root is not None and root.status is NodeStatus.INCONSISTENT:
            expansions = self.stats["nodes_expanded"]
            logger.info(f"unsat after {expansions} expansions")
            return Result(UNSAT)
        logger.warning(f"No verdict: {reason}")
        return Result(UNKNOWN, reason=reason)

    def _satisfied(self, node):
        try:
            model = self.extract_model(node)
        except ModelVerificationError as exc:
            logger.error(f"Discarding satisfied node {node.id}: {exc}")
            return Result(UNKNOWN, reason="model-verification")
        logger.info(f"sat at node {node.id}")
        return Result(SAT, model)

    def path(self, node):
        branches = []
        while node.parent is not None:
            branches.append(node.branch)
            node = node.parent
        return branches[::-1]

    def extract_model(self, node):
        """Compose the substitutions from the root, instantiate what is
        left and check the result against the input equations."""
        names = sorted(set().union(*(e.variables() for e in self.input)))
        images = {name: (Var(name),) for name in names}
        for branch in self.path(node):
            for name, image in images.items():
                images[name] = apply_substitution(image, branch.substitution)

        values = node.store.model() or {}
        least = self.alphabet[0]
        residual = Model(
            ints={name: v for (kind, name), v in values.items() if kind == INT}
        )
        for image in images.values():
            for var in variables(image):
                count = values.get(len_atom(var), 0)
                residual.strings.setdefault(var, least * count)
            for char in symbolic_chars(image):
                residual.chars.setdefault(char, least)

        model = Model(
            strings={name: residual.unwind(images[name]) for name in names}
        )
        model.verify(self.input)
        return model

    def to_dot(self):
        """The graph in graphviz dot syntax, one line at a time."""
        yield "digraph nielsen {"
        yield "  node [shape=box, fontname=monospace];"
        for node in self.nodes:
            lines = [str(e) for e in node.equations] or ["⊤"]
            constraints = [str(c) for c in node.store if c.lhs.degree() > 0]
            lines += constraints[:4]
            lines.append(node.status.value)
            label = _gvquote(*lines)
            yield f"  n{node.id} [label={label}];"
        for node in self.nodes:
            for branch, child in node.edges:
                label = _gvquote(str(branch))
                yield f"  n{node.id} -> n{child.id} [label={label}];"
        yield "}"


def _gvquote(*lines):
    """A quoted dot string, one label line per argument."""
    escaped = (
        line.replace("\\", "\\\\").replace('"', '\\"') for line in lines
    )
    return '"' + "\\n".join(escaped) + '"'


def solve(equations, config, deadline=None):
    return NielsenGraph(equations, config).solve(deadline)
