from fractions import Fraction

import pytest

from p2scat.errors import EmptyRayLocusError, NoStableObjectsError, NoWallError
from p2scat.models import ChargeVector, LatticeClass, PointQ
from p2scat.stability import (
    central_charge,
    default_probe_height,
    divisors,
    euler_form,
    line_of_sheaf,
    moduli_dimension,
    on_ray_locus,
    perturb_probe,
    potential_wall,
    probe_point,
    serre_dual,
    twist,
)


def test_parse_class() -> None:
    assert ChargeVector.parse("0,3,-1") == ChargeVector(0, 3, -1)
    assert ChargeVector(0, 3, -1).m == LatticeClass(0, -3)
    with pytest.raises(ValueError, match="Use format like '0,3,1'"):
        ChargeVector.parse("0,3")


@pytest.mark.parametrize(
    "gamma,dim",
    [
        (ChargeVector(0, 1, 1), 2),
        (ChargeVector(0, 2, 1), 5),
        (ChargeVector(0, 3, 1), 10),
        (ChargeVector(0, 4, 2), 17),
        (ChargeVector(1, 0, 1), 0),
        (ChargeVector(1, 0, 0), 2),
        (ChargeVector(1, 0, -1), 4),
        (ChargeVector(0, 0, 1), 2),
    ],
)
def test_moduli_dimension(gamma: ChargeVector, dim: int) -> None:
    assert moduli_dimension(gamma) == dim


def test_point_classes_without_stable_objects() -> None:
    with pytest.raises(NoStableObjectsError, match="no stable objects"):
        moduli_dimension(ChargeVector(0, 0, 2))


def test_euler_form_of_line_bundles() -> None:
    # chi(O(a), O(b)) = (b - a + 1)(b - a + 2)/2
    for a in range(-2, 3):
        for b in range(-2, 3):
            k = b - a
            assert euler_form(line_of_sheaf(a), line_of_sheaf(b)) == (k + 1) * (k + 2) // 2


def test_twist() -> None:
    assert twist(line_of_sheaf(0)) == line_of_sheaf(1)
    assert twist(line_of_sheaf(2), -3) == line_of_sheaf(-1)
    assert twist(ChargeVector(0, 1, 1)) == ChargeVector(0, 1, 2)
    gamma = ChargeVector(2, -1, 3)
    assert twist(twist(gamma, 2), -2) == gamma
    assert moduli_dimension(twist(gamma, 1)) == moduli_dimension(gamma)


def test_serre_dual() -> None:
    assert serre_dual(ChargeVector(0, 2, 1)) == ChargeVector(0, 2, -1)
    with pytest.raises(ValueError, match="one-dimensional"):
        serre_dual(ChargeVector(1, 0, 1))


def test_divisors() -> None:
    assert divisors(ChargeVector(0, 4, 2)) == [1, 2]
    assert divisors(ChargeVector(0, 4, 4)) == [1, 2, 4]
    assert divisors(ChargeVector(1, 0, -1)) == [1]
    assert ChargeVector(0, 4, 2).primitive() == ChargeVector(0, 2, 1)


def test_central_charge() -> None:
    gamma = ChargeVector(0, 1, 1)
    z = central_charge(gamma, PointQ(Fraction(-1, 2), Fraction(1)))
    assert (z.re, z.im_coeff) == (0, 1)
    assert z.is_imaginary_positive()
    assert on_ray_locus(gamma, PointQ(Fraction(-1, 2), Fraction(1)))
    assert not on_ray_locus(gamma, PointQ(Fraction(0), Fraction(1)))
    # outside the slice x^2 + 2y > 0
    assert not on_ray_locus(gamma, PointQ(Fraction(-1, 2), Fraction(-1)))


def test_probe_point_for_torsion_classes() -> None:
    gamma = ChargeVector(0, 1, 1)
    assert default_probe_height(gamma) == Fraction(9, 4)
    sigma = probe_point(gamma, Fraction(4))
    assert sigma == PointQ(Fraction(-1, 2), Fraction(15, 8))
    assert sigma.s == 4
    assert on_ray_locus(gamma, sigma)
    assert probe_point(ChargeVector(0, 3, 3), Fraction(4)).x == Fraction(-1, 2)
    assert probe_point(ChargeVector(0, 3, 1), Fraction(4)).x == Fraction(-7, 6)


def test_probe_point_for_rank_one() -> None:
    gamma = ChargeVector(1, 0, -1)
    sigma = probe_point(gamma, Fraction(4))
    assert sigma == PointQ(Fraction(-3), Fraction(-2))
    assert sigma.s == 5
    assert on_ray_locus(gamma, sigma)


def test_empty_ray_locus() -> None:
    with pytest.raises(EmptyRayLocusError, match="empty ray locus"):
        probe_point(ChargeVector(0, -1, 1), Fraction(4))


@pytest.mark.parametrize("gamma", [ChargeVector(0, 2, 1), ChargeVector(1, 0, -1)])
def test_perturbed_probe_stays_on_the_locus(gamma: ChargeVector) -> None:
    sigma = probe_point(gamma, Fraction(4))
    moved = perturb_probe(gamma, sigma, Fraction(1, 101))
    assert moved != sigma
    assert moved.s > sigma.s
    assert on_ray_locus(gamma, moved)


def test_potential_wall() -> None:
    gamma, other = ChargeVector(1, 0, 1), ChargeVector(0, 1, 1)
    wall = potential_wall(gamma, other)
    for sigma in (PointQ(Fraction(1, 3), Fraction(2)), PointQ(Fraction(-2), Fraction(5, 7))):
        z, w = central_charge(gamma, sigma), central_charge(other, sigma)
        assert wall(sigma) == z.im_coeff * w.re - w.im_coeff * z.re
    a, b, _ = wall.tangent_line(PointQ(Fraction(1, 3), Fraction(2)))
    assert (a, b) != (0, 0)


def test_no_wall_between_collinear_classes() -> None:
    with pytest.raises(NoWallError, match="no wall"):
        potential_wall(ChargeVector(0, 1, 1), ChargeVector(0, 2, 5))
