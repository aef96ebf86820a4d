"""Named inputs for reproduction runs, so long constants are never retyped."""

from .polyprimes import discriminant_of_poly

# x^2 + x + RECORD_A: the prime-dense polynomial of Jacobson and Williams
RECORD_A = -33251810980696878103150085257129508857312847751498190349983874538507313
RECORD_D = discriminant_of_poly(RECORD_A)
assert RECORD_D == 133007243922787512412600341028518035429251391005992761399935498154029253

EULER_A = 41
EULER_D = discriminant_of_poly(EULER_A)

# preset name -> (A, d)
PRESETS = {
    "dgk-record": (RECORD_A, RECORD_D),
    "euler": (EULER_A, EULER_D),
}
