"""Exception hierarchy shared by every engine."""


class StablePlanError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(StablePlanError):
    """The system description itself is broken."""


class UndefinedTransition(ModelError):
    def __init__(self, key, detail="no transition defined"):
        self.key = key
        super().__init__(f"{detail} for {key}")


class NullRequired(ModelError):
    def __init__(self, agent, state, step=None):
        self.agent = agent
        self.state = state
        self.step = step
        where = "" if step is None else f" at step {step}"
        super().__init__(f"agent {agent} must play null in state {state!r}{where}, "
                         "but null is unavailable or has no transition")


class UnavailableAction(StablePlanError):
    def __init__(self, agent, state, action, step=None):
        self.agent = agent
        self.state = state
        self.action = action
        self.step = step
        where = "" if step is None else f" at step {step}"
        super().__init__(f"action {action!r} is not available to agent {agent} "
                         f"in state {state!r}{where}")


class PlanError(StablePlanError):
    """Malformed plan input."""


class EmptyPlan(PlanError):
    def __init__(self):
        super().__init__("plan has zero joint steps")


class LengthMismatch(PlanError):
    def __init__(self, n1, n2):
        super().__init__(f"agent plans differ in length ({n1} vs {n2})")


class MissingBranch(PlanError):
    def __init__(self, state, node):
        self.state = state
        self.node = node
        super().__init__(f"node {node!r} has no branch for observed state {state!r}")


class DanglingNodeRef(PlanError):
    def __init__(self, ref, where=None):
        self.ref = ref
        suffix = "" if where is None else f" (referenced from {where})"
        super().__init__(f"undeclared node id {ref!r}{suffix}")


class MalformedEncoding(PlanError):
    pass


class NotEfficient(StablePlanError):
    def __init__(self, reason):
        self.reason = reason
        super().__init__(f"plan is not efficient: {reason}")


class BudgetExceeded(StablePlanError):
    def __init__(self, limit, what="nodes"):
        self.limit = limit
        super().__init__(f"search budget of {limit} {what} exhausted")


class WindowExplosion(StablePlanError):
    def __init__(self, count, limit):
        super().__init__(f"{count} candidate windows per configuration exceeds budget {limit}")


class PartialAssignment(StablePlanError):
    pass


class TooManyVars(StablePlanError):
    pass


class OutOfRange(StablePlanError):
    pass


class ObservationOutOfRange(StablePlanError):
    pass


class ParseError(StablePlanError):
    def __init__(self, message, line=None):
        self.line = line
        prefix = "" if line is None else f"line {line}: "
        super().__init__(prefix + message)
