class ContainmentViolation(RuntimeError):
    """A selected digit left the partial remainder outside +-(2/3)d.

    This can only mean the selection logic is wrong; the recurrence aborts
    instead of continuing with a corrupt remainder. ``trace`` holds whatever
    per-cycle records were gathered before the failure.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])
