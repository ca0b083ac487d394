"""Empty __init__ file for models package."""
