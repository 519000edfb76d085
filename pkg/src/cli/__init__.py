"""Command-line surface (``qfi-lab``)."""
