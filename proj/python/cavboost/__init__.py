"""Driven spin-cavity boosting simulator."""

import json

from ._cavboost import *  # noqa: F401,F403
from ._cavboost import __version__
from ._cavboost import run_experiment as _run_experiment


def run_experiment(name, config, out_dir):
    """Run a named experiment; the summary is returned as a dict."""
    report = _run_experiment(name, config, str(out_dir))
    report["summary"] = json.loads(report.pop("summary_json"))
    return report
