"""Candidate-scorer language: parser, type checker, evaluator, printer, complexity."""
