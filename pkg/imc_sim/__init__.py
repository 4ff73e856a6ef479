"""Energy vs quality-of-result simulator for intermittent computing on STT-MRAM."""

__version__ = "1.0.0"
