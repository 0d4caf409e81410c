"""intactness: scan the m-separability witnesses for an upper bound on entanglement intactness"""

import logging
from typing import Any, Dict, List, Sequence, Union

from ..sampling import run_experiment
from ..utils.output import rational_dict
from ..witness import Estimate, Number, intactness_scan, white_noise_expectation
from .common import RunConfig, console, emit, load_inputs, table

logger = logging.getLogger(__name__)

HEADER = ("m", "value", "detected")


def intactness_command(config: RunConfig) -> int:
    """Expectations come from the white-noise formula, or from sampling with --sampled"""
    g, _, coloring = load_inputs(config)
    settings = config.settings

    estimates: Sequence[Union[Estimate, Number]]
    if config.sampled:
        record = run_experiment(
            g,
            coloring,
            float(config.noise),
            config.shots_or_default,
            config.seed,
            settings.dense_gate,
            settings.raw_cap,
        )
        estimates = record.estimates()
    else:
        expected: List[Number] = [white_noise_expectation(config.noise, n_l) for n_l in coloring.sizes]
        estimates = expected

    report = intactness_scan(
        g,
        coloring,
        estimates,
        settings.z_threshold,
        gate=settings.enum_gate,
        override=config.override_gate,
        threads=settings.threads,
        full=config.full,
    )

    console.print(
        table(
            f"m-separability scan on {g.label} (p={config.noise})",
            ("m", "<W>", "Detected"),
            [(v.witness.context, f"{float(v.value):.6g}", "yes" if v.detected else "no") for v in report.verdicts],
        )
    )
    style = "green" if report.detected_m is not None else "yellow"
    console.print(f"[{style}]{report.summary}[/{style}]")

    payload: Dict[str, Any] = {
        "schema": "entwit.intactness/1",
        "graph": g.label,
        "noise": {**rational_dict(config.noise), "value": float(config.noise)},
        "sampled": config.sampled,
        "report": report.to_dict(),
    }
    rows = [(v.witness.context, f"{float(v.value):.10g}", v.detected) for v in report.verdicts]
    emit(config, payload, HEADER, rows)
    logger.debug("intactness scan on %s: %s", g.label, report.summary)
    return 0
