"""LBCV - Ricci soliton verification for Lorentzian Bianchi-Cartan-Vranceanu spaces."""

__version__ = "0.1.0"
