from contextvars import ContextVar

# Context variable to hold the current CLI run id for logging correlation
run_id = ContextVar('run_id', default=None)
