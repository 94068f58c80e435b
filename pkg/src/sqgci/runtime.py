"""Process-wide execution settings."""
import os


def workers() -> int:
    """FFT worker count, capped by ``SQG_THREADS`` (default 1).

    pocketfft results do not depend on the worker count, so this only
    changes speed.
    """
    raw = os.environ.get("SQG_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
