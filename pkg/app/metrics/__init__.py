"""Fitness and analysis metrics: ROC-AUC, rejection curves, PRR, correlations."""
