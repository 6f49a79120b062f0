"""Delay-robust bounds and safety synthesis for periodically switched systems."""

from ._core import (
    Box,
    Config,
    Controller,
    DomainError,
    Error,
    IntegrationError,
    OutOfRangeError,
    ParseError,
    SymbolicModel,
    ValidationError,
    abstract,
    bound,
    check_certificate,
    delay_bound,
    demo_config,
    demo_names,
    estimate_nu,
    load_config,
    max_eta,
    parse_config,
    simulate,
    synthesize,
    verify,
    verify_threshold,
)

__all__ = [
    "Box",
    "Config",
    "Controller",
    "DomainError",
    "Error",
    "IntegrationError",
    "OutOfRangeError",
    "ParseError",
    "SymbolicModel",
    "ValidationError",
    "abstract",
    "bound",
    "check_certificate",
    "delay_bound",
    "demo_config",
    "demo_names",
    "estimate_nu",
    "load_config",
    "max_eta",
    "parse_config",
    "simulate",
    "synthesize",
    "verify",
    "verify_threshold",
]
