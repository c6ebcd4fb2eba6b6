"""Pure-Python sparse kernels over packed monomial keys.

A monomial is packed into one integer: total degree in bits 48 and up, the
exponent of variable ``i`` in the 16-bit slot at ``32 - 16*i``.  Monomial
multiplication is integer addition, and a key is below truncation order T
exactly when ``key < T << 48``.  ``limit`` is that bound, or ``None`` for
exact (untruncated) products.
"""


def mul(a, b, limit):
    if len(a) > len(b):
        a, b = b, a
    if not a:
        return {}
    bs = sorted(b.items())
    out = {}
    get = out.get
    if limit is None:
        for ka, ca in a.items():
            for kb, cb in bs:
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
    else:
        for ka, ca in a.items():
            room = limit - ka
            for kb, cb in bs:
                if kb >= room:
                    break
                k = ka + kb
                out[k] = get(k, 0) + ca * cb
    return {k: c for k, c in out.items() if c}


def axpy(acc, c, x, limit):
    """acc += c * x in place, dropping keys at or above ``limit``."""
    get = acc.get
    for k, v in x.items():
        if limit is not None and k >= limit:
            continue
        s = get(k, 0) + c * v
        if s:
            acc[k] = s
        elif k in acc:
            del acc[k]
    return acc
