"""Python bindings for the latticed total K-theory kernel."""

import json

from ._lkt import (  # noqa: F401
    DslError,
    Model,
    beta_pair_json,
    canonical_group,
    compare,
    load,
    roundtrip,
    run_json,
    smith,
)


def run(command, args=(), **kw):
    """Run a CLI command in-process; returns (exit_code, report dict)."""
    code, text = run_json(command, list(args), **kw)
    return code, json.loads(text)


def load_file(path, name, coefficients="2,3,4,6"):
    with open(path, encoding="utf-8") as f:
        return load(f.read(), name, coefficients)
