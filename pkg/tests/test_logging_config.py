import io
import json
import logging

import numpy as np
import pytest

import qutrit_link.run_context as run_context
from qutrit_link.logging_config import JSONFormatter, configure_logging


@pytest.fixture()
def clean_root():
    root = logging.getLogger()
    saved = list(root.handlers), root.level
    for handler in list(root.handlers):
        if isinstance(handler.formatter, JSONFormatter):
            root.removeHandler(handler)
    yield root
    for handler in list(root.handlers):
        if isinstance(handler.formatter, JSONFormatter):
            root.removeHandler(handler)
    for handler in saved[0]:
        if handler not in root.handlers:
            root.addHandler(handler)
    root.setLevel(saved[1])


def _record(message="hello", **extra):
    record = logging.LogRecord("sender", logging.INFO, __file__, 10, message, (), None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


def test_formatter_emits_json_with_run_id():
    token = run_context.run_id.set("abc123")
    try:
        payload = json.loads(JSONFormatter().format(_record()))
    finally:
        run_context.run_id.reset(token)
    assert payload["run_id"] == "abc123"
    assert payload["level"] == "INFO"
    assert payload["logger"] == "sender"
    assert payload["message"] == "hello"


def test_formatter_keeps_serializable_extras_and_stringifies_the_rest():
    payload = json.loads(JSONFormatter().format(_record(out_dir="outputs", grid=object())))
    assert payload["out_dir"] == "outputs"
    assert payload["grid"].startswith("<object object")
    assert payload["run_id"] is None


def test_formatter_unwraps_numpy_values():
    payload = json.loads(JSONFormatter().format(_record(drift=np.float32(0.5), steps=np.int64(3), beta2=np.array([0.25, 0.75]))))
    assert payload["drift"] == 0.5
    assert payload["steps"] == 3
    assert payload["beta2"] == [0.25, 0.75]


def test_formatter_includes_exception_text():
    try:
        raise ValueError("boom")
    except ValueError:
        import sys

        record = logging.LogRecord("cli", logging.ERROR, __file__, 1, "failed", (), sys.exc_info())
    payload = json.loads(JSONFormatter().format(record))
    assert "ValueError: boom" in payload["exc"]


def test_configure_logging_is_idempotent(clean_root):
    stream = io.StringIO()
    configure_logging(logging.DEBUG, stream=stream)
    configure_logging(logging.INFO, stream=stream)
    handlers = [h for h in clean_root.handlers if isinstance(h.formatter, JSONFormatter)]
    assert len(handlers) == 1
    assert clean_root.level == logging.INFO

    logging.getLogger("receiver").warning("absorption incomplete")
    line = stream.getvalue().strip().splitlines()[-1]
    assert json.loads(line)["message"] == "absorption incomplete"
