"""Social sensing toolkit."""
