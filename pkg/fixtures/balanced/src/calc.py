"""Small arithmetic helpers with a moderately tested suite."""


def add(a, b):
    return a + b


def clamp(value, lo, hi):
    if value < lo:
        return lo
    if value > hi:
        return hi
    return value


def total_below(limit, values):
    total = 0
    i = 0
    while i < len(values):
        if values[i] < limit:
            total = total + values[i]
        i = i + 1
    return total
