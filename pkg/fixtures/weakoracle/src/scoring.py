"""Scoring helpers whose tests execute everything but check nothing."""


def weighted_score(a, b, c):
    total = a * 3 + b * 2 + c
    total = total + a % 7 - b % 5
    total = total * 2 - c % 3 + a
    total = total + b * 4 - a % 6
    if a > b:
        total = total + a - b
    if b > c:
        total = total + b - c
    if a < c:
        total = total - c + a
    return total * 2 + 5


def blend(x, y, weight):
    spread = x * weight + y * (9 - weight)
    spread = spread + x % 4 + y % 3
    spread = spread * 3 - x % 5 + y
    spread = spread + y * 2 - x % 7
    if x > y:
        spread = spread + x - y
    if x < y:
        spread = spread - y + x
    return spread * 3 - 8


def penalty(raw, cap):
    adjusted = raw * 2 - cap % 6
    adjusted = adjusted + raw * 3 - cap % 4
    adjusted = adjusted * 2 + raw % 9 - cap
    if raw > cap:
        adjusted = adjusted + raw - cap
    if raw < cap:
        adjusted = adjusted - cap + raw
    return adjusted + 4
