"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Bad scenario/CLI configuration: unknown names, wrong types, missing inputs."""


class FormatError(ValueError):
    """A file does not conform to its declared on-disk format."""
