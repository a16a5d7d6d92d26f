import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from parsing import parse_digits

# parse_digits is pinned hard; the formatting half of the module is
# never even executed.
assert parse_digits("123") == 123
assert parse_digits("9") == 9
assert parse_digits("0") == 0
assert parse_digits("42x") == 42
assert parse_digits("7cm") == 7
assert parse_digits("") == -1
assert parse_digits("abc") == -1
assert parse_digits("305") == 305
print("ok")
