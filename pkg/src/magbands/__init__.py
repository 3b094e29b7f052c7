"""Band functions of magnetic Schroedinger fiber operators with a field step."""
__version__ = "0.1.0"
