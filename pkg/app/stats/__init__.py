"""Bootstrap significance tests, multiple-comparison correction and logistic regression."""
