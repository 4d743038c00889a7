from enum import IntEnum


class Colour(IntEnum):
    UNCOLOURED = 0
    RED = 1
    BLACK = 2
    WHITE = 3
