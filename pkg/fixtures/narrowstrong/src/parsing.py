"""Digit parsing (well tested) next to formatting code no test touches."""


def parse_digits(text):
    value = 0
    seen = False
    for ch in text:
        if ch < "0":
            break
        if ch > "9":
            break
        value = value * 10 + ord(ch) - ord("0")
        seen = True
    if not seen:
        return -1
    return value


def format_table(rows, width):
    rendered = []
    for row in rows:
        cell = str(row)
        pad = width - len(cell)
        if pad < 0:
            pad = 0
        rendered.append(" " * pad + cell)
    header = "-" * width
    body = "\n".join(rendered)
    return header + "\n" + body


def column_widths(rows, minimum):
    widths = []
    for row in rows:
        size = len(str(row)) + 2
        if size < minimum:
            size = minimum
        widths.append(size)
    return widths
