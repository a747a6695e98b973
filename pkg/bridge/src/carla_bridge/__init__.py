"""carla-bridge: external executor serving the arise-exec/1 protocol against
Scenic 3 compilation and CARLA execution."""

from .config import BridgeConfig, load_config
from .server import handle_request, serve
from .wire import PROTOCOL_VERSION

__all__ = ["BridgeConfig", "PROTOCOL_VERSION", "handle_request", "load_config", "serve"]

__version__ = "0.1.0"
