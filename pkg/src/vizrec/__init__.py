"""Natural-language-to-visualization pipeline: grammar core, prompt forge,
corpus enrichment, evaluation stack, and study service."""

__version__ = "0.1.0"
