import pytest

from tcbounds.simplicial import boundary_sphere, from_maximal_simplices, full_simplex

RP2_FACES = [[0, 1, 3], [0, 1, 4], [0, 2, 3], [0, 2, 5], [0, 4, 5],
             [1, 2, 4], [1, 2, 5], [1, 3, 5], [2, 3, 4], [3, 4, 5]]


def torus7_faces():
    out = []
    for i in range(7):
        out.append(sorted([i, (i + 1) % 7, (i + 3) % 7]))
        out.append(sorted([i, (i + 2) % 7, (i + 3) % 7]))
    return out


@pytest.fixture(scope="session")
def torus7():
    return from_maximal_simplices(torus7_faces(), name="torus_7")


@pytest.fixture(scope="session")
def rp2():
    return from_maximal_simplices(RP2_FACES, name="rp2_6")


@pytest.fixture(scope="session")
def circle():
    return boundary_sphere(1)


@pytest.fixture(scope="session")
def sphere2():
    return boundary_sphere(2)


@pytest.fixture(scope="session")
def delta3():
    return full_simplex(3)
