import numpy as np

from swarm_app.cli.outputs import cell_frame
from swarm_app.cli.render import pgm_levels, render_ascii, write_pgm
from swarm_app.core.env import Environment, parse_environment


def test_ascii_buckets_on_a_line():
    env = Environment.line(6)
    text = render_ascii(np.array([1.0, 0.3, 0.0, -0.3, -1.0, 0.6]), env)
    assert text == "#+.-=#\n"


def test_ascii_zero_vector():
    env = Environment.line(4)
    assert render_ascii(np.zeros(4), env) == "....\n"


def test_ascii_marks_obstacles():
    env = parse_environment("grid 2 3\n.#.\n...\n")
    assert render_ascii(np.array([1.0, -1.0, 0.0, 0.0, 0.0]), env) == "#@=\n...\n"


def test_pgm_levels():
    env = parse_environment("grid 2 2\n.#\n..\n")
    image, low, high = pgm_levels(np.array([0.0, 1.0, 0.5]), env)
    assert (low, high) == (0.0, 1.0)
    assert image.tolist() == [[1, 0], [65535, 32768]]

    flat, _, _ = pgm_levels(np.full(3, 2.0), env)
    assert flat.tolist() == [[32768, 0], [32768, 32768]]


def test_pgm_file_and_sidecar(tmp_path):
    env = Environment.line(5)
    path = tmp_path / 'harmonic.pgm'
    write_pgm(np.linspace(-1, 1, 5), env, str(path))
    data = path.read_bytes()
    assert data.startswith(b'P5')
    assert b'65535' in data[:32]
    sidecar = (tmp_path / 'harmonic.pgm.txt').read_text()
    assert 'min = -1\n' in sidecar
    assert 'max = 1\n' in sidecar


def test_cell_frame_columns():
    env = parse_environment("grid 2 2\n.#\n..\n")
    frame = cell_frame(env, total=[0.5, 0.1, 0.2])
    assert list(frame.columns) == ['cell', 'row', 'col', 'total']
    assert frame[['row', 'col']].values.tolist() == [[0, 0], [1, 0], [1, 1]]
