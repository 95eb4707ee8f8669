"""Finite-length validation: lifting, shaped channel, windowed BP, BER/CER."""

from .channel import ChannelRealization, simulate_channel
from .decoder import DecodeResult, WindowConfig, decode_windowed
from .harness import SimResult, StopRule, sweep_ber_cer
from .lifting import GeometryOverflowError, LiftedCode, lift, read_alist, write_alist

__all__ = [
    "LiftedCode",
    "lift",
    "GeometryOverflowError",
    "write_alist",
    "read_alist",
    "ChannelRealization",
    "simulate_channel",
    "WindowConfig",
    "DecodeResult",
    "decode_windowed",
    "StopRule",
    "SimResult",
    "sweep_ber_cer",
]
