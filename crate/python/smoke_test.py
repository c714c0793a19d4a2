"""Smoke test for the compiled extension: python python/smoke_test.py"""

import math

import polytunnel_py as pt

p = pt.Params(5.5, 9.7, 1.0, 10)
d = pt.compute_dispersion(p)
assert math.isclose(d.lam, 1.5511836896651823, rel_tol=1e-12)

s = pt.solve_boundary_system(d, 10)
assert abs(s.transmission + s.reflection - 1) < 1e-10
assert math.isclose(s.transmission, 4.8871985013617085e-9, rel_tol=1e-8)
assert isinstance(s.a1, complex)

paper = pt.paper_coefficients(d, 10)
cmp = pt.compare_methods(d, 10)
assert cmp.paper_forms_consistent
assert math.isclose(paper.transmission, s.transmission, rel_tol=1e-8)

o = pt.lattice_recursion_scatter(d, 10)
assert abs(o.transmission + o.reflection - 1) < 1e-12
assert 0 < pt.continuum_transmission(p) < 1

t = pt.tunneling_time(p)
assert math.isclose(t.time_fs, 1.1230329669267811, rel_tol=1e-8)

a = pt.sweep_mu0(5.5, 9.7, 1.0, 1, 400)
assert a.records[0].n == 7 and len(a.skipped) == 6
lo, hi = pt.find_fs_band(a.records, 0.1, 10.0)
assert (lo, hi) == a.fs_band

try:
    pt.validate_params(12.0, 9.7, 1.0, 10)
except ValueError as e:
    assert str(e).startswith("NotTunneling")
else:
    raise AssertionError("expected ValueError")

print(f"ok: T = {s.transmission:.6e}, time = {t.time_fs:.4f} fs, band = [{lo:.4e}, {hi:.4e}] nm")
