"""bounds: partition constants, witness constants and their noise tolerance"""

import logging
from typing import Any, Dict, List, Optional

from rich.progress import Progress, SpinnerColumn, TextColumn

from ..entropy import DyadicBound, c_min_c_max
from ..exceptions import ConfigError
from ..utils.output import format_rational, rational_dict
from ..witness import Witness, WitnessKind, build_subsystem_witness, build_witness, m_separable_bound, noise_threshold
from .common import RunConfig, console, emit, load_inputs, table

logger = logging.getLogger(__name__)

HEADER = ("witness", "constant", "decimal", "bound", "p_limit")


def _bound_json(bound: Optional[DyadicBound]) -> Optional[Dict[str, Any]]:
    return None if bound is None else bound.to_json()


def bounds_command(config: RunConfig) -> int:
    if config.partition is None and config.m is None:
        raise ConfigError("bounds needs --partition, --m or both")
    g, partition, coloring = load_inputs(config)
    settings = config.settings

    witnesses: List[Witness] = [build_witness(g, coloring, WitnessKind.GME)]
    report = None
    if partition is not None:
        for kind in (WitnessKind.FULLY_SEPARABLE, WitnessKind.GENUINE):
            if config.keep is not None:
                witnesses.append(build_subsystem_witness(g, coloring, partition, config.keep, kind))
            else:
                witnesses.append(build_witness(g, coloring, kind, partition))
        subsystem = witnesses[-1]
        report = c_min_c_max(subsystem.graph, subsystem.context)  # type: ignore[arg-type]

    c_m = None
    if config.m is not None:
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=console,
        ) as progress:
            task = progress.add_task(f"Optimizing the {config.m}-partition constant...", total=None)
            c_m, source = m_separable_bound(g, config.m, settings.enum_gate, config.override_gate, settings.threads)
            progress.update(task, visible=False)
        witnesses.append(
            Witness(WitnessKind.M_SEPARABLE, coloring.k - 1 + c_m.value, c_m.value, g, coloring, config.m, source)
        )

    rows = [
        (
            w.kind.value,
            f"{w.constant.numerator}/{w.constant.denominator}",
            f"{float(w.constant):.10g}",
            f"{w.bound.numerator}/{w.bound.denominator}",
            f"{float(noise_threshold(w)):.10g}",
        )
        for w in witnesses
    ]
    console.print(
        table(
            f"Witness constants for {g.label} (k={coloring.k})",
            ("Witness", "Constant", "Bound", "p_limit"),
            [
                (
                    w.kind.value,
                    format_rational(w.constant),
                    format_rational(w.bound),
                    format_rational(noise_threshold(w)),
                )
                for w in witnesses
            ],
        )
    )

    payload: Dict[str, Any] = {
        "schema": "entwit.bounds/1",
        "graph": g.label,
        "coloring": coloring.to_json(),
        "partition": partition.to_json()["blocks"] if partition is not None else None,
        "kept_blocks": list(config.keep) if config.keep is not None else None,
        "c_min": _bound_json(report.c_min if report else None),
        "c_max": _bound_json(report.c_max if report else None),
        "c_m": None if c_m is None else {**c_m.to_json(), "m": config.m},
        "witnesses": [{**w.to_dict(), "p_limit": rational_dict(noise_threshold(w))} for w in witnesses],
    }
    emit(config, payload, HEADER, rows)
    logger.debug("bounds for %s: %d witness constants", g.label, len(witnesses))
    return 0
