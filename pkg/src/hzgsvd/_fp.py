"""Low-level IEEE-754 building blocks.

Everything numerical in this package funnels multiply-accumulate work through
:func:`fma`, a correctly rounded fused multiply-add lowered to the
``llvm.fma.f64`` intrinsic (a single hardware instruction on any x86-64 with
FMA3, and the correctly rounded libm fallback elsewhere).  Fused behaviour is
verified once at import time; the package refuses to load on a platform where
the operation is not actually fused.
"""

from numba import njit, types
from numba.extending import intrinsic
from llvmlite import ir


@intrinsic
def _llvm_fma(typingctx, a, b, c):
    sig = types.float64(types.float64, types.float64, types.float64)

    def codegen(context, builder, signature, args):
        fnty = ir.FunctionType(ir.DoubleType(), [ir.DoubleType()] * 3)
        fn = builder.module.declare_intrinsic("llvm.fma", [ir.DoubleType()], fnty)
        return builder.call(fn, args)

    return sig, codegen


@njit(cache=True, nogil=True)
def fma(a, b, c):
    """Fused ``a*b + c`` with a single rounding."""
    return _llvm_fma(a, b, c)


@njit(cache=True, nogil=True)
def two_sum(a, b):
    """Error-free sum: returns (s, t) with s = fl(a+b) and s + t = a + b."""
    s = a + b
    ap = s - b
    bp = s - ap
    da = a - ap
    db = b - bp
    return s, da + db


@njit(cache=True, nogil=True)
def two_prod(a, b):
    """Error-free product: returns (p, e) with p = fl(a*b) and p + e = a*b."""
    p = a * b
    return p, fma(a, b, -p)


def verify_fma():
    """Abort unless multiply-add is genuinely fused.

    The probe multiplies 2**27 + 1 by itself; the exact square 2**54 + 2**28 + 1
    loses its low bit under separate rounding, so only a fused operation can
    recover the residual 1.
    """
    x = float(2**27 + 1)
    r = fma(x, x, -(2.0**54 + 2.0**28))
    if r != 1.0:
        raise RuntimeError(
            "fused multiply-add verification failed (got %r, expected 1.0); "
            "this platform cannot run the solver reproducibly" % (r,)
        )
