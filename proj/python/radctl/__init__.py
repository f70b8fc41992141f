"""Python access to the radctl core: partitions, dropout sampling, fusion,
metrics and the end-to-end pipeline. Structured results are plain dicts."""

import json

from . import _radctl
from ._radctl import (
    RadctlError,
    __version__,
    bleu,
    collapse,
    dropout_seed,
    meteor,
    parse_report_sections,
    rouge_l,
    split_sentences,
    tokenize,
)


def _dump(value):
    return value if isinstance(value, str) else json.dumps(value)


def find_valid_subsets(report):
    """report: {"report_id", "sentences": [{"index", "text", "regions"}]}."""
    return json.loads(_radctl.find_valid_subsets(_dump(report)))


def validate_partition(report, partition):
    """Returns (valid, diagnostics)."""
    return _radctl.validate_partition(_dump(report), _dump(partition))


def sample_dropout(partition, seed, full_report_probability=None):
    return json.loads(_radctl.sample_dropout(_dump(partition), seed, full_report_probability))


def random_params(token_dim, seed):
    return json.loads(_radctl.random_params(token_dim, seed))


def mlp_forward(params, x):
    return _radctl.mlp_forward(_dump(params), list(x))


def ce_metrics(ground_truth, predicted, average="micro"):
    """Both sides are lists of {finding: class} dicts."""
    return json.loads(_radctl.ce_metrics(_dump(ground_truth), _dump(predicted), average))


def label_findings(text):
    return json.loads(_radctl.label_findings(text))


def synth(output_dir, seed=0, patients=50, token_dim=64):
    """Writes a synthetic corpus; returns the file paths."""
    keys = ("reports", "annotations", "metadata", "tokens", "sidecar")
    return dict(zip(keys, _radctl.synth(str(output_dir), seed, patients, token_dim)))


def run_pipeline(config_file=None, **settings):
    """Runs every stage; keyword arguments are config keys. Returns the manifest."""
    flat = {k: str(v).lower() if isinstance(v, bool) else str(v) for k, v in settings.items()}
    return json.loads(_radctl.run_pipeline(flat, str(config_file) if config_file else ""))
