#!/usr/bin/env python3
"""Walk one byte through the composite-field S-box, step by step.

The AES byte substitution is a multiplicative inverse in GF(2^8) followed
by an affine transform.  Inverting directly is expensive in hardware, so
the byte is carried into a tower of small fields where the inverse costs
a handful of 2- and 4-bit operations.
"""

from sboxsim import (DEFAULT_PARAMS, gf16_inv, gf16_mul, gf16_square_scale,
                     map_iso, map_iso_inv, affine_transform, gf256_mul,
                     sbox_composite, sbox_reference)

P = DEFAULT_PARAMS
x = 0x53

print(f"input byte            x = 0x{x:02x}")
print(f"subfield constants    lam = 0x{P.lam:x}, phi = 0x{P.phi:x}")
print(f"basis change rows     {[hex(r) for r in P.delta]}")
print()

# 1. Linear basis change into the tower representation
t = map_iso(x, P)
print(f"tower form            hi = 0x{t.hi:x}, lo = 0x{t.lo:x}")

# 2. The 8-bit inverse decomposes into 4-bit arithmetic:
#    d = (hi + lo)*lo + lam*hi^2, then both output nibbles share d^-1.
s = t.hi ^ t.lo
d = gf16_mul(s, t.lo, P) ^ gf16_square_scale(t.hi, P)
d_inv = gf16_inv(d, P)
sigma_hi = gf16_mul(d_inv, t.hi, P)
sigma_lo = gf16_mul(d_inv, s, P)
print(f"nibble sum            hi+lo = 0x{s:x}")
print(f"shared term           d = 0x{d:x}, d^-1 = 0x{d_inv:x}")
print(f"inverse (tower form)  hi = 0x{sigma_hi:x}, lo = 0x{sigma_lo:x}")

# 3. Back to the AES basis; confirm it really is the field inverse.
inv = map_iso_inv(type(t)(sigma_hi, sigma_lo), P)
print(f"inverse (AES basis)   x^-1 = 0x{inv:02x}")
print(f"check x * x^-1        = 0x{gf256_mul(x, inv):02x}")

# 4. Affine transform finishes the substitution.
y = affine_transform(inv, P)
print(f"after affine          y = 0x{y:02x}")
print(f"published table says  SB(0x{x:02x}) = 0x{sbox_reference(x):02x}")
print()

# The whole route, for every byte.
mismatches = sum(1 for v in range(256)
                 if sbox_composite(v, P) != sbox_reference(v))
print(f"exhaustive check over 256 bytes: {mismatches} mismatches")
