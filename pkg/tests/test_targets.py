import numpy as np
import pytest

from zlab.errors import DomainError, UsageError
from zlab.special import zeta
from zlab.targets import (
    LineSegment,
    TargetFunction,
    WeightFunction,
    parse_target,
    parse_weight,
    read_samples,
    write_samples,
)


def test_segment_validation():
    seg = LineSegment(0.5, 100.0, 2.0)
    assert seg.t_end == 102.0
    with pytest.raises(DomainError):
        LineSegment(0.5, 0.0, 0.0)
    with pytest.raises(DomainError):
        LineSegment(float("nan"), 0.0, 1.0)
    with pytest.raises(DomainError):
        LineSegment(1.0, 0.5, 1.0)


def test_builtin_targets():
    u = np.linspace(0, 1, 5)
    assert np.allclose(TargetFunction.constant(2, 1)(u), 2)
    p = TargetFunction.polynomial([1, -1], 1)
    assert np.allclose(p(u), 1 - u)
    assert p.is_real_valued() and p.is_nonnegative() and not p.is_zero()
    assert not TargetFunction.polynomial([1, -2], 1).is_nonnegative()
    assert TargetFunction.constant(0, 1).is_zero()
    z = TargetFunction.zeta_translate(0.5, 100.0, 1.0)
    assert z(np.array([0.25]))[0] == pytest.approx(zeta(0.5 + 100.25j), abs=1e-10)
    assert not z.is_real_valued()
    a = TargetFunction.abs_zeta(100.0, 1.0)
    assert a.is_nonnegative()


def test_sampled_target_interpolates_and_checks_span():
    t = np.linspace(0, 2, 21)
    f = TargetFunction.sampled(t, t ** 2)
    assert f.domain_length == 2
    # pchip reproduces the nodes exactly and stays close in between
    assert np.allclose(f(t), t ** 2)
    assert abs(f(np.array([1.05]))[0] - 1.05 ** 2) < 1e-2
    with pytest.raises(DomainError):
        TargetFunction.sampled([0.0, 1.0, 0.5], [1, 2, 3])
    with pytest.raises(DomainError):
        TargetFunction.sampled([0.1, 1.0], [1, 2])


def test_with_length():
    f = TargetFunction.constant(1, 1).with_length(3)
    assert f.domain_length == 3
    with pytest.raises(DomainError):
        TargetFunction.sampled([0, 1], [0, 1]).with_length(2)


def test_weights():
    G = WeightFunction.unit()
    assert G.is_unit and G.is_real()
    assert np.all(G(np.array([1.0, 2.0])) == 1)
    W = WeightFunction.sampled([10, 11, 12], [1, 2, 3])
    assert W.is_real() and not W.is_unit
    assert W(np.array([11.0]))[0] == pytest.approx(2)
    with pytest.raises(DomainError):
        W(np.array([13.0]))
    C = WeightFunction.sampled([0, 1], [1j, 1])
    assert not C.is_real()


def test_parse_target_forms(tmp_path):
    assert parse_target("const:1", 1).kind == "builtin-constant"
    assert parse_target("poly:1,-1", 1)(np.array([1.0]))[0] == 0
    assert parse_target("zeta:0.5,1000", 1).payload == (0.5, 1000.0, False)
    assert parse_target("abszeta:1000", 1).payload[2]
    with pytest.raises(UsageError):
        parse_target("const:1")
    with pytest.raises(UsageError):
        parse_target("nonsense", 1)
    with pytest.raises(UsageError):
        parse_target("const:x", 1)
    path = tmp_path / "f.csv"
    write_samples(path, [0, 0.5, 1], [1, 1j, 2])
    f = parse_target(str(path), 1)
    assert f.kind == "sampled" and f(np.array([0.5]))[0] == pytest.approx(1j)
    with pytest.raises(DomainError):
        parse_target(str(path), 2)


def test_read_samples_rejects_bad_files(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("t,re\n0,1\n1,2\n")
    t, v = read_samples(p)
    assert list(t) == [0, 1] and list(v) == [1, 2]
    p.write_text("t,re,im\n1,1,0\n2,2,0\n")
    with pytest.raises(DomainError):
        read_samples(p)
    assert read_samples(p, start_at_zero=False)[0][0] == 1
    p.write_text("0,1,0\n0,2,0\n")
    with pytest.raises(DomainError):
        read_samples(p)
    p.write_text("0,1,0\n1,x,0\n")
    with pytest.raises(DomainError):
        read_samples(p)


def test_parse_weight(tmp_path):
    assert parse_weight("unit").is_unit
    p = tmp_path / "g.csv"
    write_samples(p, [5, 6], [1, 1])
    assert parse_weight(str(p)).kind == "sampled-real"
    with pytest.raises(UsageError):
        parse_weight(str(tmp_path / "missing.csv"))
