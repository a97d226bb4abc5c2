"""
Data domain value objects.
"""

from enum import Enum


class Protocol(str, Enum):
    """Evaluation protocol, shared by splits and models."""

    TRANSDUCTIVE = "transductive"
    INDUCTIVE = "inductive"
