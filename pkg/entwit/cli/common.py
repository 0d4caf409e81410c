"""Run configuration and the input/output plumbing shared by every command"""

import argparse
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

from rich.console import Console
from rich.table import Table

from ..config import Settings
from ..exceptions import ColoringError, ConfigError
from ..graphs import Coloring, Graph, chromatic_coloring, default_coloring, parse_graph_spec, two_coloring
from ..partitions import Partition, parse_partition
from ..utils.output import validate_payload, write_csv, write_json
from ..witness import WitnessKind

console = Console()

FORMATS = ("json", "csv")
COLORING_MODES = ("auto", "two", "chromatic")


@dataclass(frozen=True)
class RunConfig:
    command: str
    graph: str
    settings: Settings
    partition: Optional[str] = None
    coloring: str = "auto"
    k_max: int = 8
    kind: Optional[str] = None
    m: Optional[int] = None
    noise: Fraction = Fraction(0)
    shots: Optional[int] = None
    seed: Optional[int] = None
    out: Optional[Path] = None
    fmt: str = "json"
    override_gate: bool = False
    keep: Optional[Tuple[int, ...]] = None
    sampled: bool = False
    full: bool = False
    corrupt_constant: bool = False
    correct_byproducts: bool = False
    verbose: bool = False

    def __post_init__(self):
        if self.fmt not in FORMATS:
            raise ConfigError(f"--format must be one of {', '.join(FORMATS)}, got {self.fmt!r}")
        if not 0 <= self.noise <= 1:
            raise ConfigError(f"--noise must lie in [0, 1], got {self.noise}")
        if self.shots is not None and self.shots < 1:
            raise ConfigError(f"--shots must be at least 1, got {self.shots}")
        if self.k_max < 1:
            raise ConfigError(f"--k-max must be positive, got {self.k_max}")
        if self.kind is not None:
            try:
                kind = WitnessKind(self.kind)
            except ValueError:
                raise ConfigError(f"unknown witness kind {self.kind!r}") from None
            if kind is WitnessKind.M_SEPARABLE and self.m is None:
                raise ConfigError("--kind m_separable requires --m")
            if kind in (WitnessKind.FULLY_SEPARABLE, WitnessKind.GENUINE) and self.partition is None:
                raise ConfigError(f"--kind {kind.value} requires --partition")
        if self.keep is not None and self.partition is None:
            raise ConfigError("--keep selects blocks of --partition, which is missing")

    @property
    def shots_or_default(self) -> int:
        return self.shots if self.shots is not None else self.settings.shots

    def log_fields(self) -> Dict[str, Any]:
        fields = asdict(self)
        fields.pop("settings")
        fields["noise"] = str(self.noise)
        return fields


def _parse_keep(text: Optional[str]) -> Optional[Tuple[int, ...]]:
    if text is None:
        return None
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"--keep expects comma-separated block indices, got {text!r}") from None


def parse_noise(text: str) -> Fraction:
    """argparse type for --noise; decimals are kept exact"""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid noise weight {text!r}") from None


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge parsed flags over the environment settings and validate the combination"""
    settings = Settings.from_env().with_overrides(
        dense_gate=args.dense_gate,
        enum_gate=args.enum_gate,
        z_threshold=args.z_threshold,
    )
    return RunConfig(
        command=args.command,
        graph=args.graph,
        settings=settings,
        partition=args.partition,
        coloring=args.coloring,
        k_max=args.k_max,
        kind=args.kind,
        m=args.m,
        noise=args.noise,
        shots=args.shots,
        seed=args.seed,
        out=Path(args.out) if args.out else None,
        fmt=args.format,
        override_gate=args.override_gate,
        keep=_parse_keep(getattr(args, "keep", None)),
        sampled=getattr(args, "sampled", False),
        full=getattr(args, "full", False),
        corrupt_constant=getattr(args, "corrupt_constant", False),
        correct_byproducts=getattr(args, "correct_byproducts", False),
        verbose=args.verbose,
    )


def load_inputs(config: RunConfig) -> Tuple[Graph, Optional[Partition], Coloring]:
    g = parse_graph_spec(config.graph)
    partition = parse_partition(g.n, config.partition) if config.partition else None
    return g, partition, pick_coloring(g, config.coloring, config.k_max)


def pick_coloring(g: Graph, mode: str, k_max: int) -> Coloring:
    """``auto``, ``two``, ``chromatic`` or an explicit comma-separated color per vertex"""
    if mode == "auto":
        return default_coloring(g, k_max)
    if mode == "two":
        coloring = two_coloring(g)
        if coloring is None:
            raise ColoringError(f"{g.label} is not bipartite")
        return coloring
    if mode == "chromatic":
        return chromatic_coloring(g, k_max)
    try:
        colors = [int(x) for x in mode.split(",")]
    except ValueError:
        raise ConfigError(f"--coloring must be one of {', '.join(COLORING_MODES)} or per-vertex colors") from None
    coloring = Coloring.from_assignment(colors)
    coloring.validate(g)
    return coloring


def emit(config: RunConfig, payload: Dict[str, Any], header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    """Write the payload to --out in the chosen format; without --out only the schema is checked"""
    validate_payload(payload)
    if config.out is None:
        return
    if config.fmt == "json":
        write_json(config.out, payload)
    else:
        write_csv(config.out, header, rows)
    console.print(f"[green]Wrote {config.fmt} to {config.out}[/green]")


def table(title: str, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> Table:
    out = Table(title=title)
    for i, name in enumerate(columns):
        out.add_column(name, style="cyan" if i == 0 else None)
    for row in rows:
        out.add_row(*(str(x) for x in row))
    return out
