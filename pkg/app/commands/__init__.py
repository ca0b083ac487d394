"""Empty __init__ file for commands package."""
