import time

__version__ = "0.3.0"
StartTime = time.time()
