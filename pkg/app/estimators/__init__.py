"""Built-in uncertainty estimators, the shared feature catalog and estimator specs."""
