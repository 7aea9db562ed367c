"""Age classifiers: bin schemes, VANN variants, fusion, baselines, training."""

from __future__ import annotations

import numpy as np
import pytest

from voiceage.errors import (
    DegenerateDataError,
    DimensionError,
    RangeError,
    StratificationError,
    ValidationError,
)
from voiceage.models.baselines import LinearSvm, knn_classify
from voiceage.models.bins import AB, DECADE10, QUARTER25, SCHEMES, AgeBinScheme, age_to_bin
from voiceage.models.training import (
    ConfusionMatrix,
    EpochRecord,
    LabeledDataset,
    evaluate,
    predict,
    train_classifier,
)
from voiceage.models.vann import (
    CatFusion,
    MfbFusion,
    VannA,
    VannAvCat,
    VannAvMfb,
    VannConfig,
    VannV,
    build_model,
)
from voiceage.nn import losses
from voiceage.nn.checkpoint import save_checkpoint_bytes
from voiceage.nn.tensor import Tensor

from conftest import band_task_dataset


class TestAgeBins:
    def test_ab_boundary_cases(self):
        """A covers age <= 25, B covers age > 60, 26-60 is excluded."""
        assert age_to_bin(25, AB) == 0
        assert age_to_bin(61, AB) == 1
        assert age_to_bin(40, AB) is None
        assert age_to_bin(26, AB) is None
        assert age_to_bin(60, AB) is None

    def test_quarter25_boundaries(self):
        """Bins are <=25, 26-50, 51-75, >75."""
        assert age_to_bin(26, QUARTER25) == 1
        assert age_to_bin(25, QUARTER25) == 0
        assert age_to_bin(50, QUARTER25) == 1
        assert age_to_bin(51, QUARTER25) == 2
        assert age_to_bin(75, QUARTER25) == 2
        assert age_to_bin(76, QUARTER25) == 3

    def test_decade10_covers_every_age(self):
        for age in range(0, 120):
            bin_index = age_to_bin(age, DECADE10)
            assert bin_index is not None
            assert 0 <= bin_index < DECADE10.class_count

    def test_decade10_edges(self):
        assert age_to_bin(19, DECADE10) == 0
        assert age_to_bin(20, DECADE10) == 1
        assert age_to_bin(69, DECADE10) == 5
        assert age_to_bin(70, DECADE10) == 6

    def test_quarter25_total(self):
        for age in range(0, 120):
            assert age_to_bin(age, QUARTER25) is not None

    def test_negative_age_rejected(self):
        with pytest.raises(RangeError):
            age_to_bin(-1, DECADE10)

    def test_non_finite_age_rejected(self):
        with pytest.raises(RangeError):
            age_to_bin(float("nan"), DECADE10)

    def test_scheme_registry(self):
        assert set(SCHEMES) == {"decade10", "quarter25", "ab"}
        assert SCHEMES["ab"].labels == ("A", "B")

    def test_scheme_validation(self):
        with pytest.raises(ValidationError):
            AgeBinScheme("bad", boundaries=(30, 20), labels=("x", "y", "z"))
        with pytest.raises(ValidationError):
            AgeBinScheme("bad", boundaries=(30,), labels=("only-one",))


def small_config(modality: str = "audio", class_count: int = 4) -> VannConfig:
    return VannConfig(
        modality=modality,
        class_count=class_count,
        conv_filters=4,
        dense_width=16,
        epochs=3,
        batch_size=8,
    )


class TestVannForward:
    def test_audio_logit_shape(self):
        model = VannA(small_config("audio"))
        x = Tensor(np.zeros((2, 1, 128, 128), dtype=np.float32))
        assert model(x).shape == (2, 4)

    def test_visual_logit_shape(self):
        model = VannV(small_config("visual"))
        x = Tensor(np.zeros((2, 3, 128, 128), dtype=np.float32))
        assert model(x).shape == (2, 4)

    def test_softmax_rows_sum_to_one(self):
        from voiceage.nn import ops

        model = VannA(small_config("audio"))
        rng = np.random.default_rng(0)
        x = Tensor(rng.random((3, 1, 128, 128)).astype(np.float32))
        probs = ops.softmax(model(x), axis=-1)
        np.testing.assert_allclose(probs.data.sum(axis=1), 1.0, rtol=1e-5)

    def test_untrained_model_scores_chance_on_balanced_data(self):
        """Accuracy of an untrained net on balanced random data stays within
        3 binomial sigma of 1/K."""
        k = 4
        n = 200
        model = VannA(small_config("audio", class_count=k))
        rng = np.random.default_rng(1)
        inputs = rng.random((n, 1, 128, 128)).astype(np.float32)
        labels = np.tile(np.arange(k), n // k)
        dataset = LabeledDataset(inputs=inputs, labels=labels)
        accuracy, _ = evaluate(model, dataset)
        sigma = np.sqrt((1 / k) * (1 - 1 / k) / n)
        assert abs(accuracy - 1 / k) <= 3 * sigma

    def test_build_model_dispatch(self):
        assert isinstance(build_model(small_config("audio")), VannA)
        assert isinstance(build_model(small_config("visual")), VannV)
        assert isinstance(build_model(small_config("av-cat")), VannAvCat)
        assert isinstance(build_model(small_config("av-mfb")), VannAvMfb)

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            VannConfig(modality="telepathy", class_count=2)
        with pytest.raises(ValidationError):
            VannConfig(modality="audio", class_count=0)
        with pytest.raises(ValidationError):
            VannConfig(modality="audio", class_count=2, epochs=0)


class TestCatFusion:
    def test_fused_width_is_config_width(self):
        config = small_config("av-cat")
        model = VannAvCat(config)
        audio = Tensor(np.zeros((2, 1, 128, 128), dtype=np.float32))
        visual = Tensor(np.zeros((2, 3, 128, 128), dtype=np.float32))
        assert model(audio, visual).shape == (2, 4)

    def test_concat_dense_input_width_is_sum_of_dims(self):
        fusion = CatFusion(audio_dim=6, visual_dim=10, out_dim=8, seed=0)
        assert fusion.dense.weight.shape == (16, 8)

    def test_zero_visual_reduces_to_audio_slice(self):
        """With all-zero visual features the pre-norm activation equals the
        audio block of the weight matrix alone."""
        fusion = CatFusion(audio_dim=5, visual_dim=7, out_dim=6, seed=3)
        rng = np.random.default_rng(2)
        audio = rng.standard_normal((4, 5)).astype(np.float32)
        manual = audio @ fusion.dense.weight.data[:5] + fusion.dense.bias.data
        direct = fusion.dense(
            Tensor(np.concatenate([audio, np.zeros((4, 7), dtype=np.float32)], axis=1))
        )
        np.testing.assert_allclose(direct.data, manual, rtol=1e-5)

    def test_batch_mismatch_rejected(self):
        fusion = CatFusion(4, 4, 4, seed=0)
        with pytest.raises(DimensionError):
            fusion(
                Tensor(np.zeros((2, 4), dtype=np.float32)),
                Tensor(np.zeros((3, 4), dtype=np.float32)),
                True,
            )

    def test_gradient_reaches_both_trunks(self):
        """One backward pass leaves non-zero gradients on both conv kernels."""
        model = VannAvCat(small_config("av-cat"))
        rng = np.random.default_rng(5)
        audio = Tensor(rng.random((4, 1, 128, 128)).astype(np.float32))
        visual = Tensor(rng.random((4, 3, 128, 128)).astype(np.float32))
        loss = losses.cross_entropy(model(audio, visual, training=True), np.array([0, 1, 2, 3]))
        loss.backward()
        assert np.any(model.audio_trunk.conv.kernel.grad != 0)
        assert np.any(model.visual_trunk.conv.kernel.grad != 0)


class TestMfbFusion:
    def test_zero_either_side_zeroes_output(self):
        fusion = MfbFusion(audio_dim=4, visual_dim=4, factors=3, out_dim=5, seed=1)
        rng = np.random.default_rng(3)
        live = Tensor(rng.standard_normal((2, 4)).astype(np.float32))
        dead = Tensor(np.zeros((2, 4), dtype=np.float32))
        np.testing.assert_array_equal(fusion(live, dead).data, 0.0)
        np.testing.assert_array_equal(fusion(dead, live).data, 0.0)

    def test_output_is_unit_norm(self):
        fusion = MfbFusion(audio_dim=6, visual_dim=6, factors=2, out_dim=8, seed=2)
        rng = np.random.default_rng(4)
        a = Tensor(rng.standard_normal((5, 6)).astype(np.float32))
        v = Tensor(rng.standard_normal((5, 6)).astype(np.float32))
        norms = np.linalg.norm(fusion(a, v).data, axis=1)
        np.testing.assert_allclose(norms, 1.0, rtol=1e-4)

    def test_single_factor_is_projected_elementwise_product(self):
        """k=1: output equals l2-normalized signed sqrt of the plain product
        of the two linear projections."""
        fusion = MfbFusion(audio_dim=3, visual_dim=5, factors=1, out_dim=7, seed=6)
        rng = np.random.default_rng(7)
        a = rng.standard_normal((2, 3)).astype(np.float32)
        v = rng.standard_normal((2, 5)).astype(np.float32)
        out = fusion(Tensor(a), Tensor(v)).data

        product = (a @ fusion.audio_proj.weight.data) * (v @ fusion.visual_proj.weight.data)
        signed = np.sign(product) * np.sqrt(np.abs(product))
        oracle = signed / np.linalg.norm(signed, axis=1, keepdims=True)
        np.testing.assert_allclose(out, oracle, rtol=1e-3, atol=1e-5)

    def test_swap_asymmetry_and_symmetry(self):
        """Swapping the inputs changes the output unless both projections
        share identical weights."""
        fusion = MfbFusion(audio_dim=4, visual_dim=4, factors=2, out_dim=6, seed=8)
        rng = np.random.default_rng(9)
        a = Tensor(rng.standard_normal((3, 4)).astype(np.float32))
        v = Tensor(rng.standard_normal((3, 4)).astype(np.float32))
        assert not np.allclose(fusion(a, v).data, fusion(v, a).data)

        fusion.visual_proj.weight.data = fusion.audio_proj.weight.data.copy()
        np.testing.assert_allclose(fusion(a, v).data, fusion(v, a).data, rtol=1e-5)

    def test_rejects_bad_factor_count(self):
        with pytest.raises(ValidationError):
            MfbFusion(4, 4, factors=0, out_dim=4, seed=0)

    def test_av_mfb_logit_shape(self):
        model = VannAvMfb(small_config("av-mfb"))
        audio = Tensor(np.zeros((2, 1, 128, 128), dtype=np.float32))
        visual = Tensor(np.zeros((2, 3, 128, 128), dtype=np.float32))
        assert model(audio, visual).shape == (2, 4)


def gaussian_clusters(n_per_class: int, separation: float, seed: int, dims: int = 8):
    rng = np.random.default_rng(seed)
    features = []
    labels = []
    for cls in range(2):
        center = np.full(dims, cls * separation)
        features.append(center + rng.standard_normal((n_per_class, dims)))
        labels.append(np.full(n_per_class, cls))
    return np.concatenate(features), np.concatenate(labels)


class TestKnn:
    def test_exact_training_point_with_k1(self):
        features = np.array([[0.0, 0.0], [10.0, 10.0]])
        labels = np.array([3, 5])
        assert knn_classify(features, labels, np.array([10.0, 10.0]), k=1) == 5

    def test_separated_clusters_are_perfect(self):
        """Two clusters 10 sigma apart: every held-out query is correct."""
        train_x, train_y = gaussian_clusters(50, separation=10.0, seed=0)
        test_x, test_y = gaussian_clusters(20, separation=10.0, seed=1)
        predictions = [knn_classify(train_x, train_y, q, k=5) for q in test_x]
        assert np.array_equal(predictions, test_y)

    def test_tie_breaks_to_lowest_class(self):
        """Equal vote counts and equal distance sums resolve to class 0."""
        features = np.array([[1.0, 0.0], [-1.0, 0.0]])
        labels = np.array([0, 1])
        assert knn_classify(features, labels, np.array([0.0, 0.0]), k=2) == 0

    def test_tie_on_votes_prefers_smaller_distance_sum(self):
        features = np.array([[1.0, 0.0], [-2.0, 0.0]])
        labels = np.array([1, 0])
        # class 1 is closer, so the vote tie goes to class 1 despite its index
        assert knn_classify(features, labels, np.array([0.0, 0.0]), k=2) == 1

    def test_empty_training_set_rejected(self):
        with pytest.raises(ValidationError):
            knn_classify(np.zeros((0, 2)), np.zeros(0, dtype=int), np.zeros(2), k=1)

    def test_bad_k_rejected(self):
        with pytest.raises(RangeError):
            knn_classify(np.zeros((2, 2)), np.array([0, 1]), np.zeros(2), k=0)


class TestLinearSvm:
    def test_separable_toy_task_reaches_full_training_accuracy(self):
        train_x, train_y = gaussian_clusters(40, separation=10.0, seed=2, dims=2)
        model = LinearSvm.train(train_x, train_y, C=1.0, epochs=20, seed=0)
        assert np.mean(model.predict_batch(train_x) == train_y) == 1.0

    def test_zero_vector_predicts_largest_bias(self):
        model = LinearSvm(
            weights=np.array([[1.0, 1.0], [2.0, -1.0], [0.5, 0.5]]),
            biases=np.array([0.1, 0.9, -0.3]),
        )
        assert model.predict(np.zeros(2)) == 1

    def test_input_scaling_leaves_predictions_unchanged(self):
        """Scaling inputs by c and C by 1/c^2 preserves every test argmax."""
        train_x, train_y = gaussian_clusters(40, separation=10.0, seed=3, dims=4)
        test_x, _ = gaussian_clusters(15, separation=10.0, seed=4, dims=4)
        scale = 3.0
        base = LinearSvm.train(train_x, train_y, C=1.0, epochs=20, seed=0)
        scaled = LinearSvm.train(train_x * scale, train_y, C=1.0 / scale**2, epochs=20, seed=0)
        np.testing.assert_array_equal(
            base.predict_batch(test_x), scaled.predict_batch(test_x * scale)
        )

    def test_single_class_rejected(self):
        with pytest.raises(DegenerateDataError):
            LinearSvm.train(np.ones((5, 2)), np.zeros(5, dtype=int), C=1.0, epochs=1, seed=0)

    def test_deterministic_per_seed(self):
        train_x, train_y = gaussian_clusters(30, separation=5.0, seed=5, dims=3)
        a = LinearSvm.train(train_x, train_y, C=1.0, epochs=5, seed=7)
        b = LinearSvm.train(train_x, train_y, C=1.0, epochs=5, seed=7)
        np.testing.assert_array_equal(a.weights, b.weights)
        np.testing.assert_array_equal(a.biases, b.biases)


class TestConfusionMatrix:
    def test_perfect_predictor_is_diagonal(self):
        truth = np.array([0, 1, 2, 0, 1, 2])
        matrix = ConfusionMatrix.from_predictions(truth, truth, ("a", "b", "c"))
        np.testing.assert_array_equal(matrix.counts, np.diag([2, 2, 2]))
        assert matrix.accuracy == 1.0

    def test_constant_predictor_fills_one_column(self):
        truth = np.array([0, 1, 2, 1])
        predicted = np.full(4, 2)
        matrix = ConfusionMatrix.from_predictions(truth, predicted, ("a", "b", "c"))
        assert np.all(matrix.counts[:, [0, 1]] == 0)
        assert matrix.counts[:, 2].sum() == 4

    def test_accuracy_is_trace_over_total(self):
        rng = np.random.default_rng(6)
        truth = rng.integers(0, 4, size=100)
        predicted = rng.integers(0, 4, size=100)
        matrix = ConfusionMatrix.from_predictions(truth, predicted, ("a", "b", "c", "d"))
        assert matrix.total == 100
        assert matrix.accuracy == pytest.approx(np.trace(matrix.counts) / 100)
        assert matrix.accuracy == pytest.approx(float(np.mean(truth == predicted)))

    def test_row_sums_are_per_class_counts(self):
        truth = np.array([0, 0, 1, 2, 2, 2])
        predicted = np.array([1, 0, 1, 0, 2, 2])
        matrix = ConfusionMatrix.from_predictions(truth, predicted, ("a", "b", "c"))
        np.testing.assert_array_equal(matrix.counts.sum(axis=1), [2, 1, 3])

    def test_csv_has_label_header_row_and_column(self):
        matrix = ConfusionMatrix.from_predictions(
            np.array([0, 1]), np.array([0, 1]), ("A", "B")
        )
        lines = matrix.to_csv().strip().split("\n")
        assert lines[0] == ",A,B"
        assert lines[1].startswith("A,")
        assert lines[2].startswith("B,")


class TestTrainClassifier:
    def test_separable_band_task_reaches_95_percent(self):
        """Low-band vs high-band synthetic spectrograms are solved within
        the epoch budget."""
        config = small_config("audio", class_count=2)
        train_set = band_task_dataset(64, seed=0)
        test_set = band_task_dataset(32, seed=1)
        model = VannA(config, seed=0)
        records = train_classifier(model, config, train_set, test_set, seed=0)
        assert records[-1].test_acc >= 0.95

    def test_loss_decreases_over_training(self):
        config = small_config("audio", class_count=2)
        train_set = band_task_dataset(48, seed=2)
        model = VannA(config, seed=0)
        records = train_classifier(model, config, train_set, seed=0)
        assert records[-1].train_loss < records[0].train_loss

    def test_training_is_deterministic_per_seed(self):
        config = small_config("audio", class_count=2)
        train_set = band_task_dataset(32, seed=3)

        def run() -> bytes:
            model = VannA(config, seed=0)
            train_classifier(model, config, train_set, seed=11)
            return save_checkpoint_bytes(model.state_arrays())

        assert run() == run()

    def test_resume_reproduces_uninterrupted_run(self, tmp_path):
        """Stopping after epoch 2 of 3 and resuming yields bit-identical
        weights to a straight-through run."""
        train_set = band_task_dataset(32, seed=4)
        full_config = small_config("audio", class_count=2)

        straight = VannA(full_config, seed=0)
        train_classifier(straight, full_config, train_set, seed=5)
        straight_bytes = save_checkpoint_bytes(straight.state_arrays())

        ckpt = tmp_path / "resume.ckpt"
        partial_config = VannConfig(
            modality="audio", class_count=2, conv_filters=4, dense_width=16,
            epochs=2, batch_size=8,
        )
        interrupted = VannA(partial_config, seed=0)
        train_classifier(
            interrupted, partial_config, train_set, seed=5, checkpoint_path=str(ckpt)
        )

        resumed = VannA(full_config, seed=0)
        train_classifier(
            resumed, full_config, train_set, seed=5,
            checkpoint_path=str(ckpt), resume=True,
        )
        assert save_checkpoint_bytes(resumed.state_arrays()) == straight_bytes

    def test_missing_class_raises_stratification_error(self):
        config = small_config("audio", class_count=3)
        dataset = band_task_dataset(16, seed=6)  # only classes 0 and 1
        with pytest.raises(StratificationError):
            train_classifier(VannA(config, seed=0), config, dataset, seed=0)

    def test_empty_training_set_rejected(self):
        config = small_config("audio", class_count=2)
        empty = LabeledDataset(
            inputs=np.zeros((0, 1, 128, 128), dtype=np.float32),
            labels=np.zeros(0, dtype=np.int64),
        )
        with pytest.raises(ValidationError):
            train_classifier(VannA(config, seed=0), config, empty, seed=0)

    def test_log_file_format(self, tmp_path):
        config = small_config("audio", class_count=2)
        train_set = band_task_dataset(24, seed=7)
        test_set = band_task_dataset(16, seed=8)
        log_path = tmp_path / "train.log"
        model = VannA(config, seed=0)
        records = train_classifier(
            model, config, train_set, test_set, seed=0, log_path=str(log_path)
        )
        lines = log_path.read_text().strip().split("\n")
        assert lines[0] == "epoch\ttrain_loss\ttest_acc"
        assert len(lines) == 1 + len(records) == 1 + config.epochs
        first = lines[1].split("\t")
        assert int(first[0]) == 1
        float(first[1])
        float(first[2])

    def test_epoch_record_line(self):
        record = EpochRecord(epoch=3, train_loss=0.25, test_acc=0.875)
        parts = record.line().split("\t")
        assert parts[0] == "3"
        assert float(parts[1]) == 0.25
        assert float(parts[2]) == 0.875


class TestEvaluate:
    def test_accuracy_against_recount(self):
        config = small_config("audio", class_count=2)
        dataset = band_task_dataset(40, seed=9)
        model = VannA(config, seed=0)
        accuracy, matrix = evaluate(model, dataset)
        predictions = predict(model, dataset)
        assert accuracy == pytest.approx(float(np.mean(predictions == dataset.labels)))
        assert matrix.total == 40

    def test_empty_dataset_rejected(self):
        config = small_config("audio", class_count=2)
        empty = LabeledDataset(
            inputs=np.zeros((0, 1, 128, 128), dtype=np.float32),
            labels=np.zeros(0, dtype=np.int64),
        )
        with pytest.raises(ValidationError):
            evaluate(VannA(config, seed=0), empty)

    def test_unlabeled_entries_rejected(self):
        config = small_config("audio", class_count=2)
        dataset = LabeledDataset(
            inputs=np.zeros((2, 1, 128, 128), dtype=np.float32),
            labels=np.array([0, -1]),
        )
        with pytest.raises(ValidationError):
            evaluate(VannA(config, seed=0), dataset)
