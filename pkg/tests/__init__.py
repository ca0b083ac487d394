"""Tests package - configure test environment."""
import os

# Settings are read at import time; keep the suite independent of a developer's .env
os.environ["UQEVO_LOG_LEVEL"] = "DEBUG"
os.environ["UQEVO_BOOTSTRAP_RESAMPLES"] = "2000"
