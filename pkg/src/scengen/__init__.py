"""scengen: natural-language traffic scenarios to executable DSL scripts,
with a test-and-repair loop and reliability metrics."""

__version__ = "0.1.0"
