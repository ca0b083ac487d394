"""Empty __init__ file for storage package."""
