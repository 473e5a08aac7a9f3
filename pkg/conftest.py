"""Root conftest.py for pytest configuration."""
# Keeps the repository root importable so ``cmdeg`` resolves without installing.
# Fixtures live in tests/conftest.py
