"""lexforge: a workbench for mining domain terminology, semantic word
classes and lexico-semantic patterns from annotated corpora."""

__version__ = "0.1.0"
