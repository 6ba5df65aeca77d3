class ExporterError(ValueError):
    """Invalid input data or configuration; the CLI maps it to exit code 4."""
