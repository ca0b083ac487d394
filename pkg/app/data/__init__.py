"""Dataset ingestion, numeric views and splits."""
