from glasspass.service.config import ServiceConfig
from glasspass.service.app import create_app

__all__ = ["ServiceConfig", "create_app"]
