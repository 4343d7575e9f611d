import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlinksim.lattice import Direction, LatticeError, build_lattice


@pytest.mark.parametrize("Lx,Ly", [(2, 2), (1, 3), (3, 2), (4, 4)])
def test_counts(Lx, Ly):
    lat = build_lattice(Lx, Ly)
    assert lat.n_sites == Lx * Ly
    assert lat.n_links == 2 * Lx * Ly
    assert lat.n_plaquettes == Lx * Ly


def test_rejects_bad_extents_and_budget():
    with pytest.raises(LatticeError):
        build_lattice(0, 2)
    with pytest.raises(LatticeError):
        build_lattice(2, 2, link_budget=7)
    with pytest.raises(LatticeError):
        build_lattice(2, 2, boundary="open")


def test_decode_roundtrip_example():
    lat = build_lattice(3, 2)
    link = lat.link_at(2, 1, Direction.Y)
    assert lat.decode_link(link) == ((2, 1), Direction.Y)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_encode_decode_roundtrip(Lx, Ly, data):
    lat = build_lattice(Lx, Ly)
    link = data.draw(st.integers(0, lat.n_links - 1))
    (nx, ny), d = lat.decode_link(link)
    assert lat.link_at(nx, ny, d) == link
    site = data.draw(st.integers(0, lat.n_sites - 1))
    assert lat.site(*lat.site_coords(site)) == site


def test_links_at_site_2x2():
    lat = build_lattice(2, 2)
    out, inc = lat.links_at_site(lat.site(0, 0))
    assert sorted(out) == sorted([lat.link_at(0, 0, "x"), lat.link_at(0, 0, "y")])
    assert sorted(inc) == sorted([lat.link_at(1, 0, "x"), lat.link_at(0, 1, "y")])


def test_one_by_one_is_degenerate():
    lat = build_lattice(1, 1)
    assert lat.degenerate
    out, inc = lat.links_at_site(0)
    assert set(out) == set(inc) == {0, 1}


def test_links_disjoint_3x3():
    lat = build_lattice(3, 3)
    out, inc = lat.links_at_site(lat.site(1, 1))
    assert len(out) == len(inc) == 2
    assert not set(out) & set(inc)


def test_plaquette_ordering_2x2():
    lat = build_lattice(2, 2)
    expected = [
        (lat.link_at(0, 0, "x"), +1),
        (lat.link_at(1, 0, "y"), +1),
        (lat.link_at(0, 1, "x"), -1),
        (lat.link_at(0, 0, "y"), -1),
    ]
    assert list(lat.plaquette_links(lat.site(0, 0))) == expected


@pytest.mark.parametrize("Lx,Ly", [(2, 2), (2, 3), (3, 4)])
def test_each_link_in_two_plaquettes(Lx, Ly):
    lat = build_lattice(Lx, Ly)
    counts = np.zeros(lat.n_links, dtype=int)
    for p in range(lat.n_plaquettes):
        links = lat.plaquette_links(p)
        assert len(links) == 4
        for link, _ in links:
            counts[link] += 1
    assert np.all(counts == 2)
    assert lat.n_plaquettes == Lx * Ly


def test_plaquettes_are_closed_paths():
    lat = build_lattice(3, 3)
    for p in range(lat.n_plaquettes):
        assert lat.path(lat.plaquette_links(p)).closed


def test_winding_cut_sizes():
    assert len(build_lattice(2, 2).winding_cut("x")) == 2
    assert len(build_lattice(3, 2).winding_cut("y")) == 3
    assert len(build_lattice(3, 2).winding_cut("x")) == 2


def test_rectangular_loops():
    lat = build_lattice(2, 2)
    loop = lat.rectangular_loop(0, 1, 1)
    assert list(loop) == list(lat.plaquette_links(0))
    lat3 = build_lattice(3, 3)
    loop = lat3.rectangular_loop(0, 2, 1)
    assert len(loop) == 6 and loop.closed
    with pytest.raises(LatticeError):
        lat3.rectangular_loop(0, 0, 1)


def test_all_rectangles_close_on_4x4():
    lat = build_lattice(4, 4)
    for corner in range(lat.n_sites):
        for w in range(1, 5):
            for h in range(1, 5):
                loop = lat.rectangular_loop(corner, w, h)
                assert loop.closed
                assert len(loop) == 2 * (w + h)


def test_path_rejects_broken_chain():
    lat = build_lattice(3, 3)
    with pytest.raises(LatticeError):
        lat.path([(lat.link_at(0, 0, "x"), +1), (lat.link_at(2, 2, "y"), +1)])


def test_wrapping_loop_crosses_cut_once():
    lat = build_lattice(3, 2)
    loop = lat.wrapping_loop("x", 1)
    assert loop.closed and len(loop) == 3
    cut = set(lat.winding_cut("x"))
    assert sum(1 for link, _ in loop if link in cut) == 1
