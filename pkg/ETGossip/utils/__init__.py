from .time_format import readable_duration
from .rng import StreamFactory
from .cache import ReceiveCache
