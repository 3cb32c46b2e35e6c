"""Exception types raised by the analysis pipeline."""


class LatschedError(Exception):
    """Base class for all errors raised by this package."""


class InvalidGraph(LatschedError):
    """An operation was given a graph that fails validation."""

    def __init__(self, report):
        self.report = report
        super().__init__("invalid task graph: " + "; ".join(v.message for v in report.violations))


class PathExplosion(LatschedError):
    """More source-to-sink paths exist than the configured cap allows."""

    def __init__(self, source, sink, count, cap):
        self.source, self.sink, self.count, self.cap = source, sink, count, cap
        super().__init__(f"{count} paths from {source} to {sink} exceed cap {cap}")


class NoPath(LatschedError):
    """No directed path connects the two tasks."""

    def __init__(self, source, sink):
        self.source, self.sink = source, sink
        super().__init__(f"no path from {source} to {sink}")


class NotXConfiguration(LatschedError):
    """An X-pair operation was applied to constraints that are not in X."""


class InfeasibleSpec(LatschedError):
    """A generator spec cannot be realised (edge budget too small or too large)."""
