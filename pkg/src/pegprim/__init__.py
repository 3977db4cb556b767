"""Motion-primitive reinforcement learning for peg-in-hole insertion."""

__version__ = "0.1.0"
