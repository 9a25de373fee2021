from mopidy.models import fields
from mopidy.models.immutable import ValidatedImmutableObject

from nielsen_strings.terms import Equation

VERDICTS = ("sat", "unsat", "unknown")

STATISTIC_COUNTERS = (
    "nodes_created",
    "nodes_expanded",
    "powers_introduced",
    "decompositions",
    "parikh_refutations",
    "look_ahead",
    "dedup_hits",
    "intsolver_queries",
    "intsolver_cache_hits",
    "wall_time_ms",
)


class Problem(ValidatedImmutableObject):
    """A parsed input file: declared variables and plain equations."""

    #: Name of the file the problem was read from. Read-only.
    source = fields.String()

    #: The logic from ``set-logic``, if any. Read-only.
    logic = fields.String()

    #: Declared string constants in declaration order. Read-only.
    variables = fields.Collection(type=str, container=tuple)

    #: Asserted equations in file order. Read-only.
    assertions = fields.Collection(type=Equation, container=tuple)

    #: Whether the file asks for a model. Read-only.
    wants_model = fields.Boolean(default=False)


class Statistics(ValidatedImmutableObject):
    """A snapshot of the search counters of one solver run."""

    nodes_created = fields.Integer(min=0, default=0)
    nodes_expanded = fields.Integer(min=0, default=0)
    powers_introduced = fields.Integer(min=0, default=0)
    decompositions = fields.Integer(min=0, default=0)
    parikh_refutations = fields.Integer(min=0, default=0)
    look_ahead = fields.Integer(min=0, default=0)
    dedup_hits = fields.Integer(min=0, default=0)
    intsolver_queries = fields.Integer(min=0, default=0)
    intsolver_cache_hits = fields.Integer(min=0, default=0)
    wall_time_ms = fields.Integer(min=0, default=0)

    #: ``(rule, count)`` pairs sorted by rule name.
    rules = fields.Collection(type=tuple, container=tuple)

    #: Why the verdict is ``unknown``, if it is.
    reason = fields.String()

    @classmethod
    def from_counter(cls, counter, reason=None):
        rules = sorted(
            (key[len("rule:") :], count)
            for key, count in counter.items()
            if key.startswith("rule:")
        )
        counts = {key: counter.get(key, 0) for key in STATISTIC_COUNTERS}
        return cls(rules=rules, reason=reason, **counts)

    def lines(self):
        yield f"nodes-created: {self.nodes_created}"
        yield f"nodes-expanded: {self.nodes_expanded}"
        for rule, count in self.rules:
            yield f"rule {rule}: {count}"
        yield f"powers-introduced: {self.powers_introduced}"
        yield f"decompositions: {self.decompositions}"
        yield f"parikh-refutations: {self.parikh_refutations}"
        yield f"look-ahead: {self.look_ahead}"
        yield f"dedup-hits: {self.dedup_hits}"
        yield f"intsolver-queries: {self.intsolver_queries}"
        yield f"intsolver-cache-hits: {self.intsolver_cache_hits}"
        yield f"wall-time-ms: {self.wall_time_ms}"
        if self.reason:
            yield f"unknown-reason: {self.reason}"


class BenchRow(ValidatedImmutableObject):
    """One benchmark file's outcome."""

    file = fields.String()
    track = fields.String()
    verdict = fields.Field(type=str, choices=VERDICTS)
    time_ms = fields.Integer(min=0, default=0)
    nodes = fields.Integer(min=0, default=0)
    reason = fields.String()

    #: ``"agrees"`` or ``"contradicted"`` after a bounded cross-check.
    oracle = fields.String()

    @property
    def solved(self):
        return self.verdict in ("sat", "unsat")
