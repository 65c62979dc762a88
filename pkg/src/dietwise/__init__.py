"""dietwise: self-hosted dietary assistant service and tooling."""

__version__ = "0.1.0"
