import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))  # makes `oracles` importable

settings.register_profile(
    "privdash", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("privdash")
