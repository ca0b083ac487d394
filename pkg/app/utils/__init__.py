"""Empty __init__ file for utils package."""
