import math

import numpy as np
import pytest
from helpers import (
    batch_loss,
    enumerate_class_scores,
    finite_diff_gradients,
    gradient_errors,
    random_records,
    twelve_bit_schema,
)

from edm_rulex import studydata
from edm_rulex.errors import NumericError, ValidationError
from edm_rulex.neural import (
    Network,
    TrainConfig,
    class_score,
    dataset_mse,
    forward,
    init_network,
    load_network,
    loss_and_gradients,
    network_from_dict,
    network_to_dict,
    save_network,
    train,
)
from edm_rulex.schema import encode_dataset


def zero_net(inputs, hidden, outputs):
    return Network(
        v=np.zeros((hidden, inputs)),
        b_h=np.zeros(hidden),
        w=np.zeros((outputs, hidden)),
        b_o=np.zeros(outputs),
    )


def test_init_deterministic():
    schema = twelve_bit_schema()
    cfg = TrainConfig(seed=99)
    a, b = init_network(schema, cfg), init_network(schema, cfg)
    assert np.array_equal(a.v, b.v) and np.array_equal(a.w, b.w)
    assert np.array_equal(a.b_h, b.b_h) and np.array_equal(a.b_o, b.b_o)


def test_init_zero_scale():
    net = init_network(twelve_bit_schema(), TrainConfig(init_scale=0.0))
    assert not net.v.any() and not net.w.any()


def test_init_sizes_default_schema():
    schema = studydata.default_student_schema()
    net = init_network(schema, TrainConfig())
    assert net.input_size == 76
    assert net.output_size == 4
    assert net.hidden_size == 2 * math.ceil(math.sqrt(76))


def test_forward_zero_weights():
    net = zero_net(5, 3, 4)
    assert np.allclose(forward(net, np.zeros(5, dtype=np.uint8)), 0.5)
    assert np.allclose(forward(net, np.ones(5, dtype=np.uint8)), 0.5)


def test_forward_hand_example():
    # 1-1-1 net with unit weights, zero biases, x = 1
    net = Network(v=np.array([[1.0]]), b_h=np.zeros(1), w=np.array([[1.0]]), b_o=np.zeros(1))
    h = 1 / (1 + math.exp(-1))
    expected = 1 / (1 + math.exp(-h))
    y = forward(net, np.array([1], dtype=np.uint8))
    assert math.isclose(y[0], expected, rel_tol=1e-12)
    assert abs(h - 0.7311) < 1e-4 and abs(y[0] - 0.6750) < 1e-4


def test_forward_open_interval():
    rng = np.random.default_rng(5)
    for _ in range(100):
        net = Network(
            v=rng.normal(scale=3, size=(4, 8)),
            b_h=rng.normal(size=4),
            w=rng.normal(scale=3, size=(3, 4)),
            b_o=rng.normal(size=3),
        )
        for _ in range(100):
            y = forward(net, rng.integers(0, 2, 8))
            assert np.all(y > 0) and np.all(y < 1)


def test_forward_length_mismatch():
    with pytest.raises(ValidationError, match="length"):
        forward(zero_net(5, 2, 2), np.zeros(4, dtype=np.uint8))


def test_class_score_matches_forward():
    rng = np.random.default_rng(2)
    net = Network(
        v=rng.normal(size=(3, 6)),
        b_h=rng.normal(size=3),
        w=rng.normal(size=(2, 3)),
        b_o=rng.normal(size=2),
    )
    bits = rng.integers(0, 2, 6)
    assert class_score(net, bits, 1) == forward(net, bits)[1]
    assert class_score(zero_net(6, 2, 2), bits, 0) == 0.5
    with pytest.raises(ValidationError):
        class_score(net, bits, 2)


def test_class_score_argmax_matches_enumeration():
    schema = twelve_bit_schema()
    rng = np.random.default_rng(17)
    records = random_records(schema, 60, rng)
    encoded = encode_dataset(records, schema)
    cfg = TrainConfig(max_epochs=60, hidden_size=6, seed=4)
    result = train(init_network(schema, cfg), encoded, cfg)
    net = result.network
    scores = enumerate_class_scores(net, 0)
    best = int(np.argmax(scores))
    best_loop, best_val = 0, -1.0
    for i in range(2**12):
        bits = (i >> np.arange(12)) & 1
        val = class_score(net, bits, 0)
        if val > best_val:
            best_loop, best_val = i, val
    assert best_loop == best


def test_monotone_link():
    # d y_k / d w[k][j] = y_k (1 - y_k) h_j >= 0 whenever h_j > 0
    rng = np.random.default_rng(8)
    net = Network(
        v=rng.normal(size=(4, 6)),
        b_h=rng.normal(size=4),
        w=rng.normal(size=(3, 4)),
        b_o=rng.normal(size=3),
    )
    bits = rng.integers(0, 2, 6)
    base = forward(net, bits)[1]
    net.w[1, 2] += 0.25  # sigmoid hidden activations are always positive
    assert forward(net, bits)[1] >= base


def test_train_memorizes_single_record():
    schema = twelve_bit_schema()
    rng = np.random.default_rng(0)
    encoded = encode_dataset(random_records(schema, 1, rng), schema)
    cfg = TrainConfig(max_epochs=500, seed=1)
    result = train(init_network(schema, cfg), encoded, cfg)
    assert result.final_mse < 0.01
    assert result.epochs_run <= 500


def test_train_separable_toy_task():
    # T copies A; B is irrelevant: 4 patterns, default config
    from edm_rulex.schema import Attribute, AttributeSchema, ROLE_TARGET, StudentRecord

    schema = AttributeSchema(
        (
            Attribute("A", ("a1", "a2")),
            Attribute("B", ("b1", "b2")),
            Attribute("T", ("t1", "t2"), ROLE_TARGET),
        )
    )
    records = [
        StudentRecord({"A": a, "B": b, "T": "t1" if a == "a1" else "t2"})
        for a in ("a1", "a2")
        for b in ("b1", "b2")
    ]
    encoded = encode_dataset(records, schema)
    cfg = TrainConfig(seed=3)
    result = train(init_network(schema, cfg), encoded, cfg)
    for vec in encoded:
        assert int(np.argmax(forward(result.network, vec.bits))) == vec.target_index


def test_gradients_match_finite_differences():
    schema = twelve_bit_schema()  # reshaped below to 6-3-2
    rng = np.random.default_rng(42)
    from edm_rulex.schema import EncodedVector

    dataset = [
        EncodedVector(bits=rng.integers(0, 2, 6, dtype=np.uint8), target_index=int(rng.integers(2)))
        for _ in range(8)
    ]
    worst = 0.0
    for draw in range(5):
        net = Network(
            v=rng.uniform(-0.5, 0.5, (3, 6)),
            b_h=rng.uniform(-0.5, 0.5, 3),
            w=rng.uniform(-0.5, 0.5, (2, 3)),
            b_o=rng.uniform(-0.5, 0.5, 2),
        )
        loss, analytic = loss_and_gradients(net, dataset)
        assert math.isclose(loss, batch_loss(net, dataset), rel_tol=1e-12)
        numeric = finite_diff_gradients(net, dataset)
        worst = max(worst, gradient_errors(analytic, numeric))
    assert worst < 1e-5


def test_train_empty_dataset():
    with pytest.raises(ValidationError, match="empty"):
        train(zero_net(3, 2, 2), [], TrainConfig())


def test_train_divergence_reports_rate():
    schema = twelve_bit_schema()
    rng = np.random.default_rng(0)
    encoded = encode_dataset(random_records(schema, 4, rng), schema)
    cfg = TrainConfig(max_epochs=3, seed=1)
    net = init_network(schema, cfg)
    net.v[0, 0] = np.nan  # simulate a blown-up run
    with pytest.raises(NumericError, match="smaller learning rate"):
        train(net, encoded, cfg)


def test_train_deterministic():
    schema = twelve_bit_schema()
    rng = np.random.default_rng(1)
    records = random_records(schema, 30, rng)
    encoded = encode_dataset(records, schema)
    cfg = TrainConfig(max_epochs=20, seed=11)
    r1 = train(init_network(schema, cfg), encoded, cfg)
    r2 = train(init_network(schema, cfg), encoded, cfg)
    assert np.array_equal(r1.network.v, r2.network.v)
    assert r1.mse_history == r2.mse_history


def test_network_json_round_trip(tmp_path):
    rng = np.random.default_rng(6)
    net = Network(
        v=rng.normal(size=(3, 5)),
        b_h=rng.normal(size=3),
        w=rng.normal(size=(2, 3)),
        b_o=rng.normal(size=2),
        metadata={"note": "round trip"},
    )
    path = tmp_path / "net.json"
    save_network(net, path)
    back = load_network(path)
    assert np.array_equal(back.v, net.v) and np.array_equal(back.b_o, net.b_o)
    assert back.metadata == net.metadata
    doc = network_to_dict(net)
    doc["hidden_size"] = 99
    with pytest.raises(ValidationError, match="sizes"):
        network_from_dict(doc)


def test_dataset_mse_matches_forward():
    schema = twelve_bit_schema()
    rng = np.random.default_rng(3)
    encoded = encode_dataset(random_records(schema, 10, rng), schema)
    net = init_network(schema, TrainConfig(seed=0))
    manual = 0.0
    for vec in encoded:
        y = forward(net, vec.bits)
        t = np.zeros(net.output_size)
        t[vec.target_index] = 1
        manual += float(((y - t) ** 2).sum()) / net.output_size
    assert math.isclose(dataset_mse(net, encoded), manual / len(encoded), rel_tol=1e-12)


def test_config_validation():
    for bad in (
        dict(learning_rate=0.0),
        dict(momentum=1.0),
        dict(max_epochs=0),
        dict(target_mse=0.0),
    ):
        with pytest.raises(ValidationError):
            TrainConfig(**bad)
