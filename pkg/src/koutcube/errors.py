class BudgetError(RuntimeError):
    """The requested computation exceeds a configured size or work cap."""
