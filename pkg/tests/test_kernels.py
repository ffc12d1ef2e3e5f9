import numpy as np
import pytest

from nls1d import kernels
from nls1d.kernels import _fallback

try:
    from nls1d.kernels import _compiled
except ImportError:
    _compiled = None

IMPLS = [_fallback] + ([_compiled] if _compiled is not None else [])


@pytest.fixture
def arrays():
    rng = np.random.default_rng(17)
    u = rng.standard_normal(513) + 1j * rng.standard_normal(513)
    v = rng.standard_normal(513) + 1j * rng.standard_normal(513)
    return np.ascontiguousarray(u), np.ascontiguousarray(v)


class TestBackendEquivalence:
    def test_compiled_extension_available(self):
        # the build is expected to produce the extension in this environment
        assert _compiled is not None
        assert kernels.USING_COMPILED in (True, False)

    def test_abs2(self, arrays):
        u, _ = arrays
        ref = np.abs(u) ** 2
        for impl in IMPLS:
            assert np.allclose(impl.abs2(u), ref, rtol=1e-14, atol=0)

    def test_cubic(self, arrays):
        u, _ = arrays
        ref = np.abs(u) ** 2 * u
        for impl in IMPLS:
            assert np.allclose(impl.cubic(u), ref, rtol=1e-13, atol=0)
        if _compiled is not None:
            assert np.array_equal(_compiled.cubic(u), _fallback.cubic(u))

    def test_nonlinear_phase(self, arrays):
        u, _ = arrays
        dt = 0.37
        ref = np.exp(-1j * dt * np.abs(u) ** 2) * u
        for impl in IMPLS:
            out = impl.nonlinear_phase(u, dt)
            assert np.max(np.abs(out - ref)) < 1e-13
            # exact modulus preservation is what the splitting relies on
            assert np.max(np.abs(np.abs(out) - np.abs(u))) < 1e-13

    def test_duhamel_step(self, arrays):
        u, v = arrays
        rng = np.random.default_rng(3)
        acc = np.ascontiguousarray(rng.standard_normal(513) * (0.2 + 1j))
        phase = np.ascontiguousarray(np.exp(1j * rng.standard_normal(513)))
        ref = phase * (acc + 0.05 * u) + 0.05 * v
        for impl in IMPLS:
            out = impl.duhamel_step(acc, u, v, phase, 0.05)
            assert np.max(np.abs(out - ref)) < 1e-14
