"""Python interface to the wormbench dataset generator."""

import json

from ._wormbench import (
    AnalysisError,
    ConfigError,
    RuntimeFailure,
    degree_fit,
    hurst,
    mix_seed,
    normalize_scenario,
    pfp_degrees,
    preset_ids,
    preset_json,
    preset_summary,
    read_pcap,
    topology_json,
)
from . import _wormbench

__all__ = [
    "AnalysisError",
    "ConfigError",
    "RuntimeFailure",
    "degree_fit",
    "generate",
    "hurst",
    "mix_seed",
    "normalize_scenario",
    "pfp_degrees",
    "preset",
    "preset_ids",
    "preset_summary",
    "read_pcap",
    "topology",
    "validate",
]


def preset(preset_id):
    """Preset scenario as a dict."""
    return json.loads(preset_json(preset_id))


def generate(scenario, out=None, seed=None, runs=None, router_taps=False, jobs=1):
    """Run a scenario (dict, JSON text or preset id). Returns one dict per run."""
    if isinstance(scenario, dict):
        text = json.dumps(scenario)
    elif scenario in preset_ids():
        text = json.dumps({"preset": scenario})
    else:
        text = scenario
    return _wormbench.generate(text, out, seed, runs, router_taps, jobs)


def validate(path):
    """Validation report for a scenario or run directory, as a dict."""
    return json.loads(_wormbench.validate(str(path)))


def topology(kind, seed=1, n_as=50, hosts_per_as=6):
    return json.loads(topology_json(kind, seed, n_as, hosts_per_as))
