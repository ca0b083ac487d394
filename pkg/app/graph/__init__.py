"""Empty __init__ file for graph package."""
