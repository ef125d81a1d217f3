import logging
import os

logger = logging.getLogger(__name__)

TRUE_VALUES = ("1", "true", "yes", "on")


class Settings:
    """
    Read-only view on the ``PPINV_*`` environment variables.

    Values are looked up on every access, so a changed environment is picked up
    without re-creating the object.
    """

    prefix = "PPINV"
    defaults = {
        "max_field": 2**22,
        "jobs": 1,
        "samples": 1000,
        "seed": 0,
    }

    def __init__(self, environ=None):
        self._environ = environ

    @property
    def environ(self):
        return os.environ if self._environ is None else self._environ

    def get(self, key, default=None, as_type=str):
        name = "{}_{}".format(self.prefix, key.upper())
        raw = self.environ.get(name)
        if raw is None or raw == "":
            return default if default is not None else self.defaults.get(key)
        if as_type is bool:
            return raw.strip().lower() in TRUE_VALUES
        try:
            return as_type(raw)
        except (TypeError, ValueError):
            raise ValueError("{} has an invalid value: {!r}".format(name, raw))

    def __getattr__(self, key):
        if key.startswith("_") or key not in self.defaults:
            raise AttributeError(key)
        return self.get(key, as_type=type(self.defaults[key]))


settings = Settings()
