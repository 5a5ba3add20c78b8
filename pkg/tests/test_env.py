import numpy as np
import pytest

from swarm_app.core.env import (
    EnvKind,
    Environment,
    TransitionMatrix,
    build_chain,
    build_grid_chain,
    build_line_chain,
    format_environment,
    format_overlay,
    parse_environment,
    parse_overlay,
)
from swarm_app.core.errors import (
    ConnectivityError,
    EmptyEnvironmentError,
    EnvironmentFormatError,
    InvalidDimensionError,
    ShapeMismatchError,
)


def test_line_chain_columns():
    P = build_line_chain(5).toarray()
    np.testing.assert_array_equal(P[:, 0], [0.2, 0.8, 0, 0, 0])
    np.testing.assert_array_equal(P[:, 2], [0, 0.4, 0.2, 0.4, 0])
    np.testing.assert_array_equal(P[:, 4], [0, 0, 0, 0.8, 0.2])


def test_two_cell_line_chain():
    np.testing.assert_array_equal(build_line_chain(2).toarray(), [[0.2, 0.8], [0.8, 0.2]])


def test_single_step_from_first_cell_is_exact():
    P = build_line_chain(5)
    rho = np.zeros(5)
    rho[0] = 1.0
    np.testing.assert_array_equal(P @ rho, [0.2, 0.8, 0.0, 0.0, 0.0])


def test_line_and_single_column_grid_are_different_chains():
    line = Environment.line(5)
    column = Environment.grid(np.zeros((5, 1), dtype=bool))
    P_line = build_chain(line).toarray()
    P_column = build_chain(column).toarray()
    np.testing.assert_array_equal(P_line, build_line_chain(5).toarray())
    np.testing.assert_allclose(P_column[:, 0], [0.04, 0.96, 0, 0, 0])
    np.testing.assert_allclose(P_column[:, 2], [0, 0.48, 0.04, 0.48, 0])
    assert not np.allclose(P_line, P_column)
    with pytest.raises(InvalidDimensionError):
        build_grid_chain(line)


@pytest.mark.parametrize("n", [0, 1])
def test_line_chain_rejects_tiny_lines(n):
    with pytest.raises(InvalidDimensionError):
        build_line_chain(n)


def test_grid_interior_column():
    env = Environment.grid(np.zeros((3, 3), dtype=bool))
    P = build_grid_chain(env).toarray()
    centre = env.index_of((1, 1))
    column = env.to_array(P[:, centre])
    np.testing.assert_allclose(column, [[0.10, 0.14, 0.10], [0.14, 0.04, 0.14], [0.10, 0.14, 0.10]])


def test_grid_corner_redistributes_blocked_mass():
    env = Environment.grid(np.zeros((4, 4), dtype=bool))
    P = build_grid_chain(env).toarray()
    corner = env.index_of((0, 0))
    share = (1.0 - 0.04 - 2 * 0.14 - 0.10) / 3
    assert P[corner, corner] == pytest.approx(0.04)
    assert P[env.index_of((0, 1)), corner] == pytest.approx(0.14 + share)
    assert P[env.index_of((1, 0)), corner] == pytest.approx(0.14 + share)
    assert P[env.index_of((1, 1)), corner] == pytest.approx(0.10 + share)
    assert P[:, corner].sum() == pytest.approx(1.0)


def test_grid_obstacle_neighbour_gets_no_mass(arrow_env, arrow_chain):
    P = arrow_chain.toarray()
    np.testing.assert_allclose(P.sum(axis=0), 1.0, atol=1e-12)
    assert P.min() >= 0
    for j in range(arrow_env.n):
        reachable = set(np.flatnonzero(P[:, j]))
        assert reachable == set(arrow_env.neighbors(j)) | {j}


def test_single_cell_grid_stays_put():
    env = Environment.grid(np.zeros((1, 1), dtype=bool))
    np.testing.assert_array_equal(build_grid_chain(env).toarray(), [[1.0]])


def test_all_obstacles_is_empty():
    with pytest.raises(EmptyEnvironmentError):
        Environment.grid(np.ones((3, 3), dtype=bool))


def test_disconnected_free_space_is_rejected():
    mask = np.zeros((3, 5), dtype=bool)
    mask[:, 2] = True
    with pytest.raises(ConnectivityError):
        Environment.grid(mask)


def test_transition_matrix_checks_column_sums():
    from scipy import sparse
    with pytest.raises(InvalidDimensionError):
        TransitionMatrix(sparse.csc_array(np.array([[0.5, 0.5], [0.4, 0.5]])))


def test_arrow_environment_layout(arrow_env):
    assert arrow_env.kind is EnvKind.GRID
    assert arrow_env.shape == (10, 12)
    assert arrow_env.n == 95
    assert int(arrow_env.obstacles.sum()) == 25


def test_row_major_indexing(arrow_env):
    assert arrow_env.coord_of(0) == (0, 2)
    assert arrow_env.index_of((0, 0)) is None
    for i, coord in enumerate(arrow_env.coords):
        assert arrow_env.index_of(coord) == i


def test_hop_ball_on_line(line20):
    ball = line20.hop_ball(0, 3)
    assert ball == {0: 0, 1: 1, 2: 2, 3: 3}
    assert line20.hop_distance(0, 19) == 19


def test_diagonal_hops_on_grid():
    env = Environment.grid(np.zeros((5, 5), dtype=bool))
    assert env.hop_distance(env.index_of((0, 0)), env.index_of((4, 4))) == 4


def test_irregular_cells_of_a_line(line20):
    assert line20.irregular_cells() == [0, 19]


def test_parse_environment_round_trips():
    text = "grid 3 4\n....\n.#..\n....\n"
    env = parse_environment(text)
    assert env.n == 11
    assert format_environment(env) == text


def test_parse_line_environment():
    env = parse_environment("line 7\n")
    assert env.kind is EnvKind.LINE
    assert env.n == 7


@pytest.mark.parametrize("text", [
    "",
    "ring 3\n",
    "grid 2 3\n...\n",
    "grid 2 3\n...\n..\n",
    "grid 2 3\n...\n.o.\n",
])
def test_malformed_environment_files(text):
    with pytest.raises(EnvironmentFormatError):
        parse_environment(text)


def test_overlay_parses_targets():
    env = parse_environment("grid 2 3\n...\n#..\n")
    mask = parse_overlay("grid 2 3\n.X.\n#.X\n", env)
    assert mask.tolist() == [False, True, False, False, True]
    assert format_overlay(mask, env) == "grid 2 3\n.X.\n#.X\n"


def test_overlay_target_on_obstacle_is_rejected():
    env = parse_environment("grid 2 3\n...\n#..\n")
    with pytest.raises(ShapeMismatchError):
        parse_overlay("grid 2 3\n...\nX..\n", env)


def test_overlay_dimensions_must_match():
    env = parse_environment("grid 2 3\n...\n...\n")
    with pytest.raises(ShapeMismatchError):
        parse_overlay("grid 3 2\n..\n..\n..\n", env)


def test_line_overlay():
    env = Environment.line(6)
    mask = parse_overlay("line 6\n..XX..\n", env)
    assert np.flatnonzero(mask).tolist() == [2, 3]


def test_bundled_arrow_overlay(arrow_mask):
    assert arrow_mask.sum() == 20
