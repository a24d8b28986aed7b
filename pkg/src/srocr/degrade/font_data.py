"""Embedded monospaced bitmap font (generated by scripts/make_font_data.py)."""

CELL_WIDTH = 10
CELL_HEIGHT = 20

# one hex string per row, bit 0 of the row value is the leftmost pixel
GLYPHS = {
    ' ': "000 000 000 000 000 000 000 000 000 000 000 000 000 000 000 000 000 000 000 000",
    '!': "000 000 000 010 010 010 010 010 010 010 010 000 000 010 010 000 000 000 000 000",
    '"': "000 000 000 048 048 048 048 000 000 000 000 000 000 000 000 000 000 000 000 000",
    '#': "000 000 000 000 190 090 090 3fe 0c8 048 048 1ff 064 024 026 000 000 000 000 000",
    '$': "000 000 000 020 020 0f8 12c 024 024 038 0e0 120 120 124 0f8 020 020 000 000 000",
    '%': "000 000 000 00e 011 011 011 08e 060 018 0e6 110 110 110 0e0 000 000 000 000 000",
    '&': "000 000 000 078 004 004 004 008 014 136 122 142 0c2 0c4 178 000 000 000 000 000",
    "'": "000 000 000 010 010 010 010 000 000 000 000 000 000 000 000 000 000 000 000 000",
    '(': "000 000 000 060 030 010 010 008 008 008 008 008 008 010 010 030 060 000 000 000",
    ')': "000 000 000 00c 018 010 010 020 020 020 020 020 020 010 010 018 00c 000 000 000",
    '*': "000 000 000 010 010 092 07c 038 0d6 010 010 000 000 000 000 000 000 000 000 000",
    '+': "000 000 000 000 000 000 000 010 010 010 0fe 010 010 010 000 000 000 000 000 000",
    ',': "000 000 000 000 000 000 000 000 000 000 000 000 000 030 030 030 018 008 000 000",
    '-': "000 000 000 000 000 000 000 000 000 000 078 000 000 000 000 000 000 000 000 000",
    '.': "000 000 000 000 000 000 000 000 000 000 000 000 000 030 030 000 000 000 000 000",
    '/': "000 000 000 080 040 040 020 020 010 010 010 008 008 004 004 002 000 000 000 000",
    '0': "000 000 000 078 084 084 102 102 132 132 102 102 084 084 078 000 000 000 000 000",
    '1': "000 000 000 038 02c 020 020 020 020 020 020 020 020 020 0f8 000 000 000 000 000",
    '2': "000 000 000 07c 086 102 100 100 080 040 020 010 008 00c 1fe 000 000 000 000 000",
    '3': "000 000 000 07c 082 100 100 180 078 080 100 100 100 082 07c 000 000 000 000 000",
    '4': "000 000 000 060 070 050 058 048 044 044 042 1fe 040 040 040 000 000 000 000 000",
    '5': "000 000 000 0fc 004 004 004 07c 084 100 100 100 100 082 07c 000 000 000 000 000",
    '6': "000 000 000 078 08c 004 002 07a 086 102 102 102 102 084 078 000 000 000 000 000",
    '7': "000 000 000 1fe 100 080 080 040 040 020 020 020 010 010 008 000 000 000 000 000",
    '8': "000 000 000 078 186 102 102 186 078 184 102 102 102 084 078 000 000 000 000 000",
    '9': "000 000 000 078 084 102 102 102 102 184 178 100 080 0c4 078 000 000 000 000 000",
    ':': "000 000 000 000 000 000 000 030 030 000 000 000 000 030 030 000 000 000 000 000",
    ';': "000 000 000 000 000 000 000 030 030 000 000 000 000 030 030 030 018 008 000 000",
    '<': "000 000 000 000 000 000 100 1e0 038 00e 00e 038 1e0 100 000 000 000 000 000 000",
    '=': "000 000 000 000 000 000 000 000 1fe 000 000 1fe 000 000 000 000 000 000 000 000",
    '>': "000 000 000 000 000 000 002 01e 070 1c0 1c0 070 01e 002 000 000 000 000 000 000",
    '?': "000 000 000 078 0c4 080 080 0c0 060 010 010 010 000 010 010 000 000 000 000 000",
    '@': "000 000 000 000 0f0 188 104 1e4 1b2 112 112 112 112 1b2 1e4 004 008 0f0 000 000",
    'A': "000 000 000 030 030 078 048 048 048 084 084 0fc 084 102 102 000 000 000 000 000",
    'B': "000 000 000 07e 182 102 102 182 07e 182 102 102 102 182 07e 000 000 000 000 000",
    'C': "000 000 000 0f0 18c 004 002 002 002 002 002 002 004 18c 0f0 000 000 000 000 000",
    'D': "000 000 000 03e 0c2 082 102 102 102 102 102 102 082 0c2 03e 000 000 000 000 000",
    'E': "000 000 000 1fe 002 002 002 002 1fe 002 002 002 002 002 1fe 000 000 000 000 000",
    'F': "000 000 000 1fe 002 002 002 002 0fe 002 002 002 002 002 002 000 000 000 000 000",
    'G': "000 000 000 0f0 18c 004 002 002 002 1c2 102 102 104 10c 0f0 000 000 000 000 000",
    'H': "000 000 000 102 102 102 102 102 1fe 102 102 102 102 102 102 000 000 000 000 000",
    'I': "000 000 000 07c 010 010 010 010 010 010 010 010 010 010 07c 000 000 000 000 000",
    'J': "000 000 000 0f0 080 080 080 080 080 080 080 080 080 046 03c 000 000 000 000 000",
    'K': "000 000 000 082 042 022 012 00a 016 012 022 042 042 082 102 000 000 000 000 000",
    'L': "000 000 000 002 002 002 002 002 002 002 002 002 002 002 1fe 000 000 000 000 000",
    'M': "000 000 000 186 186 1ce 14a 14a 132 132 132 102 102 102 102 000 000 000 000 000",
    'N': "000 000 000 106 106 10a 10a 112 112 122 122 142 142 182 182 000 000 000 000 000",
    'O': "000 000 000 078 084 186 102 102 102 102 102 102 186 084 078 000 000 000 000 000",
    'P': "000 000 000 07e 082 102 102 102 082 07e 002 002 002 002 002 000 000 000 000 000",
    'Q': "000 000 000 078 084 086 102 102 102 102 102 102 186 084 0f8 0c0 080 000 000 000",
    'R': "000 000 000 07e 082 102 102 102 182 07e 082 102 102 102 202 000 000 000 000 000",
    'S': "000 000 000 078 0c4 002 002 002 01c 0f0 100 100 102 186 07c 000 000 000 000 000",
    'T': "000 000 000 1ff 010 010 010 010 010 010 010 010 010 010 010 000 000 000 000 000",
    'U': "000 000 000 102 102 102 102 102 102 102 102 102 102 084 078 000 000 000 000 000",
    'V': "000 000 000 102 102 084 084 084 084 048 048 048 078 030 030 000 000 000 000 000",
    'W': "000 000 000 201 201 201 132 132 132 132 14a 14a 14a 084 084 000 000 000 000 000",
    'X': "000 000 000 102 084 084 048 048 030 030 048 048 084 084 102 000 000 000 000 000",
    'Y': "000 000 000 101 082 044 044 028 028 010 010 010 010 010 010 000 000 000 000 000",
    'Z': "000 000 000 1fe 100 080 040 060 020 010 018 008 004 002 1fe 000 000 000 000 000",
    '[': "000 000 000 070 010 010 010 010 010 010 010 010 010 010 010 010 070 000 000 000",
    '\\': "000 000 000 002 004 004 008 008 010 010 010 020 020 040 040 080 000 000 000 000",
    ']': "000 000 000 038 020 020 020 020 020 020 020 020 020 020 020 020 038 000 000 000",
    '^': "000 000 000 070 0d8 18c 306 000 000 000 000 000 000 000 000 000 000 000 000 000",
    '_': "000 000 000 000 000 000 000 000 000 000 000 000 000 000 000 000 000 000 3ff 000",
    '`': "000 000 00c 018 030 000 000 000 000 000 000 000 000 000 000 000 000 000 000 000",
    'a': "000 000 000 000 000 000 0f8 184 100 1f8 106 102 182 1c6 17c 000 000 000 000 000",
    'b': "000 000 000 002 002 002 07a 086 102 102 102 102 102 086 07a 000 000 000 000 000",
    'c': "000 000 000 000 000 000 078 084 002 002 002 002 002 084 078 000 000 000 000 000",
    'd': "000 000 000 100 100 100 178 184 102 102 102 102 102 184 178 000 000 000 000 000",
    'e': "000 000 000 000 000 000 078 084 102 102 1fe 002 002 104 0f8 000 000 000 000 000",
    'f': "000 000 000 0e0 010 010 0fc 010 010 010 010 010 010 010 010 000 000 000 000 000",
    'g': "000 000 000 000 000 000 178 184 102 102 102 102 102 184 178 100 084 078 000 000",
    'h': "000 000 000 002 002 002 0fa 186 102 102 102 102 102 102 102 000 000 000 000 000",
    'i': "000 000 000 010 010 000 01c 010 010 010 010 010 010 010 0fe 000 000 000 000 000",
    'j': "000 000 000 020 020 000 038 020 020 020 020 020 020 020 020 020 020 01c 000 000",
    'k': "000 000 000 002 002 002 042 022 012 00a 016 022 042 082 102 000 000 000 000 000",
    'l': "000 000 000 01e 010 010 010 010 010 010 010 010 010 010 0e0 000 000 000 000 000",
    'm': "000 000 000 000 000 000 07e 092 092 092 092 092 092 092 092 000 000 000 000 000",
    'n': "000 000 000 000 000 000 0fa 186 102 102 102 102 102 102 102 000 000 000 000 000",
    'o': "000 000 000 000 000 000 078 084 102 102 102 102 102 084 078 000 000 000 000 000",
    'p': "000 000 000 000 000 000 07a 086 102 102 102 102 102 086 07a 002 002 002 000 000",
    'q': "000 000 000 000 000 000 178 184 102 102 102 102 102 184 178 100 100 100 000 000",
    'r': "000 000 000 000 000 000 0e8 118 008 008 008 008 008 008 008 000 000 000 000 000",
    's': "000 000 000 000 000 000 0f8 106 002 006 0fc 180 100 182 07c 000 000 000 000 000",
    't': "000 000 000 000 008 008 07e 008 008 008 008 008 008 008 070 000 000 000 000 000",
    'u': "000 000 000 000 000 000 102 102 102 102 102 102 102 186 17c 000 000 000 000 000",
    'v': "000 000 000 000 000 000 102 084 084 084 048 048 048 030 030 000 000 000 000 000",
    'w': "000 000 000 000 000 000 201 201 132 132 12a 14a 14a 084 084 000 000 000 000 000",
    'x': "000 000 000 000 000 000 186 084 048 030 030 030 048 084 186 000 000 000 000 000",
    'y': "000 000 000 000 000 000 102 084 084 084 048 048 050 030 030 020 010 01c 000 000",
    'z': "000 000 000 000 000 000 1fe 100 080 040 030 008 004 002 1fe 000 000 000 000 000",
    '{': "000 000 000 060 010 010 010 010 010 010 00c 010 010 010 010 010 010 060 000 000",
    '|': "000 000 000 010 010 010 010 010 010 010 010 010 010 010 010 010 010 010 010 000",
    '}': "000 000 000 00c 010 010 010 010 010 010 060 010 010 010 010 010 010 00c 000 000",
    '~': "000 000 000 000 000 000 000 000 000 11c 0e2 000 000 000 000 000 000 000 000 000",
}
