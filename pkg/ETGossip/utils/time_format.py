def readable_duration(seconds: float) -> str:
    """Durations like '1h: 2m: 3s', '4m: 5s' or '12.3ms'"""
    if seconds < 1:
        return f"{seconds * 1000:.1f}ms"
    remaining = int(round(seconds))
    parts = []
    for suffix, size in (("d", 86400), ("h", 3600), ("m", 60)):
        count, remaining = divmod(remaining, size)
        if count or parts:
            parts.append(f"{count}{suffix}")
    parts.append(f"{remaining}s")
    return ": ".join(parts)
