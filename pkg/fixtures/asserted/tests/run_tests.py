import os
import sys

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from mathops import combine, offset, ratio_floor, scale

# test: scale
r1 = scale(3, 4)
assert r1 == 12
assert scale(5, 1) == 5

# test: offset
r2 = offset(10, 5)
assert r2 == 15
assert offset(2, -2) == 0

# test: combine
r3 = combine(3, 4)
assert r3 == 10
assert combine(0, 7) == 7

# test: ratio_floor
r4 = ratio_floor(7, 3)
assert r4 == 27
assert ratio_floor(9, 2) == 35

print("ok")
