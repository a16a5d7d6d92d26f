import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from calc import add, clamp, total_below

assert add(2, 3) == 5
assert add(-1, 1) == 0
assert clamp(5, 0, 10) == 5
assert clamp(-4, 0, 10) == 0
total_below(10, [1, 2, 30])
print("ok")
