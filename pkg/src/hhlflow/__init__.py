"""DC power flow solved classically and with a simulated HHL circuit."""

from . import flowmeter, grid, hhl, numerics, qsim
from .grid import Network, DcSystem, load_network, parse_network
from .hhl import HhlParams, HhlOutcome

__all__ = [
    "flowmeter",
    "grid",
    "hhl",
    "numerics",
    "qsim",
    "Network",
    "DcSystem",
    "load_network",
    "parse_network",
    "HhlParams",
    "HhlOutcome",
]
