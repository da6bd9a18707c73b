"""RSFQ logic locking, pipelining and attack engines."""

from ._core import (
    AttackReport,
    ConfigError,
    Error,
    Locked,
    Netlist,
    NetlistError,
    ParseError,
    WidthError,
    eval_comb,
    lock,
    miter_attack,
    parse_bench,
    path_balance,
    read_bench,
    run_config,
    simulate,
    sweep_attack,
)

__all__ = [
    "AttackReport",
    "ConfigError",
    "Error",
    "Locked",
    "Netlist",
    "NetlistError",
    "ParseError",
    "WidthError",
    "eval_comb",
    "lock",
    "miter_attack",
    "parse_bench",
    "path_balance",
    "read_bench",
    "run_config",
    "simulate",
    "sweep_attack",
]
