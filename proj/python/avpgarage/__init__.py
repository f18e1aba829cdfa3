"""Garage plan validation, scene synthesis and camera occlusion sweeps."""

import json

from ._core import (
    CellIndexError,
    ConstructionError,
    DomainError,
    Error,
    GarageSpec,
    ParseError,
    PlanError,
    SceneGraph,
    SceneImportError,
    ValidationError,
    classified_json,
    classify,
    import_scene,
    scenario_report,
    score,
    synthesize,
    validate,
    visible_fraction,
)


def run_scenario(label, params=None, layout=(), light="bright", step=0.5, fov=60.0, face_samples=24):
    """Run a test case and return the decoded report/1 document."""
    text = scenario_report(label, params or {}, list(layout), light, step, fov, face_samples)
    return json.loads(text)


def score_report(report, weights=(0.4, 0.4, 0.2)):
    """Score a report given as a dict or as report/1 text."""
    if not isinstance(report, str):
        report = json.dumps(report)
    return score(report, tuple(weights))


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
