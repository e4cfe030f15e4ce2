"""Motif sampling and network observables for weighted graphs."""

from .netcore import (
    ConfigError,
    InitializationError,
    Motif,
    Network,
    arm_edge_motif,
    complete_motif,
    cycle_motif,
    load_motif,
    load_network,
    motif_from_name,
    path_motif,
    resolve_motif,
    save_motif,
    save_network,
    star_motif,
    two_arm_motif,
    wedge_motif,
)

__version__ = "0.1.0"
