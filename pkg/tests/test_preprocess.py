import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ckdbench.dataset_io import (
    CKD_SCHEMA,
    DISCRETE_INTEGER,
    REAL,
    Dataset,
    Schema,
    ckd_surrogate_spec,
    nominal,
    synth_generate,
)
from ckdbench.errors import AllMissingForClass, DimensionMismatch, PlanGap, ResidualMissing
from ckdbench.preprocess import (
    TRAIN_FOLD_ONLY,
    ImputationPlan,
    StandardizationStats,
    build_imputation_plan,
    encode,
    feature_names,
    impute,
    round_for_display,
    standardize,
)

SMALL = Schema((("n", REAL), ("k", DISCRETE_INTEGER), ("flag", nominal("yes", "no"))),
               class_attribute="class", positive_label="a", negative_label="b")


def small(cells, labels):
    return Dataset(SMALL, tuple(tuple(r) for r in cells), tuple(labels))


class TestPlan:
    def test_mean_and_mode(self):
        ds = small([(2.0, 1, "yes"), (4.0, 2, "yes"), (None, None, "no"), (9.0, 5, "no")],
                   ["a", "a", "a", "b"])
        plan = build_imputation_plan(ds)
        assert plan.by_class["n"]["a"] == 3.0
        assert plan.by_class["flag"]["a"] == "yes"
        # discrete means stay real
        assert plan.by_class["k"]["a"] == 1.5
        assert round_for_display(plan, SMALL)["k"]["a"] == 2

    def test_mode_tie_goes_to_first_allowed(self):
        ds = small([(1.0, 1, "no"), (1.0, 1, "yes")], ["a", "a"])
        assert build_imputation_plan(ds).by_class["flag"]["a"] == "yes"

    def test_all_missing_in_class(self):
        ds = small([(None, 1, "yes"), (3.0, 1, "no")], ["a", "b"])
        with pytest.raises(AllMissingForClass):
            build_imputation_plan(ds)

    def test_unknown_scope(self):
        with pytest.raises(ValueError):
            build_imputation_plan(small([(1.0, 1, "yes")], ["a"]), scope="nope")

    def test_brute_force_means(self, surrogate):
        plan = build_imputation_plan(surrogate)
        for j, (name, kind) in enumerate(CKD_SCHEMA.attributes):
            if kind.is_nominal:
                continue
            for label in ("ckd", "notckd"):
                vals = [row[j] for row, lab in zip(surrogate.cells, surrogate.labels)
                        if lab == label and row[j] is not None]
                assert abs(plan.by_class[name][label] - sum(vals) / len(vals)) < 1e-9

    def test_json_round_trip(self, surrogate):
        plan = build_imputation_plan(surrogate)
        back = ImputationPlan.from_dict(json.loads(plan.to_json()))
        assert back == plan


class TestImpute:
    def test_no_missing_is_identity(self):
        ds = small([(1.0, 1, "yes"), (2.0, 3, "no")], ["a", "b"])
        assert impute(ds, build_imputation_plan(ds)) == ds

    def test_single_nominal_cell(self):
        ds = Dataset(CKD_SCHEMA, (), ())
        plan = ImputationPlan({n: {} for n in CKD_SCHEMA.names}, {})
        plan.by_class["rbc"]["ckd"] = "normal"
        row = [1] * 24
        row[CKD_SCHEMA.index("rbc")] = None
        for name, kind in CKD_SCHEMA.attributes:
            if kind.is_nominal:
                row[CKD_SCHEMA.index(name)] = kind.values[0] if name != "rbc" else None
        ds = Dataset(CKD_SCHEMA, (tuple(row),), ("ckd",))
        out = impute(ds, plan)
        expected = list(row)
        expected[CKD_SCHEMA.index("rbc")] = "normal"
        assert out.cells[0] == tuple(expected)

    def test_plan_gap(self):
        ds = small([(None, 1, "yes")], ["a"])
        with pytest.raises(PlanGap):
            impute(ds, ImputationPlan({"n": {}, "k": {}, "flag": {}}, {}))
        with pytest.raises(PlanGap):
            impute(ds, ImputationPlan({"n": {"a": 1.0}}, {}), use_labels=False)

    def test_properties(self, surrogate):
        plan = build_imputation_plan(surrogate)
        out = impute(surrogate, plan)
        assert all(v is not None for row in out.cells for v in row)
        for before, after in zip(surrogate.cells, out.cells):
            for b, a in zip(before, after):
                if b is not None:
                    assert a == b and type(a) is type(b)
        assert impute(out, plan) == out

    def test_label_free_fill(self):
        ds = small([(2.0, 1, "yes"), (None, 1, "yes"), (6.0, 1, "no")], ["a", "a", "b"])
        plan = build_imputation_plan(ds, TRAIN_FOLD_ONLY)
        assert impute(ds, plan, use_labels=False).cells[1][0] == 4.0
        assert impute(ds, plan).cells[1][0] == 2.0


class TestEncode:
    def test_binary_nominal(self):
        fm = encode(small([(1.0, 2, "yes"), (0.5, 0, "no")], ["a", "b"]))
        assert fm.feature_names == ("n", "k", "flag=yes", "flag=no")
        assert fm.values.tolist() == [[1.0, 2.0, 1.0, 0.0], [0.5, 0.0, 0.0, 1.0]]
        assert fm.labels.tolist() == [1, 0]

    def test_specific_gravity_column_order(self, surrogate):
        ds = impute(surrogate, build_imputation_plan(surrogate))
        fm = encode(ds)
        names = list(fm.feature_names)
        cols = [names.index(f"sg={v}") for v in ("1.005", "1.010", "1.015", "1.020", "1.025")]
        assert cols == list(range(cols[0], cols[0] + 5))
        row = next(i for i, r in enumerate(ds.cells) if r[CKD_SCHEMA.index("sg")] == "1.015")
        assert fm.values[row, cols].tolist() == [0, 0, 1, 0, 0]

    def test_ckd_feature_count(self):
        # hand count: 11 numeric/discrete attributes; nominal sizes sg 5, al 6, su 6 and
        # ten binary attributes (rbc pc pcc ba htn dm cad appet pe ane)
        assert len(feature_names(CKD_SCHEMA)) == 11 + 5 + 6 + 6 + 10 * 2 == 48

    def test_residual_missing(self):
        with pytest.raises(ResidualMissing):
            encode(small([(None, 1, "yes")], ["a"]))
        with pytest.raises(ResidualMissing):
            encode(small([(1.0, 1, None)], ["a"]))

    def test_deterministic(self):
        a = synth_generate(ckd_surrogate_spec(), 60, 5)
        b = synth_generate(ckd_surrogate_spec(), 60, 5)
        fa = encode(impute(a, build_imputation_plan(a)))
        fb = encode(impute(b, build_imputation_plan(b)))
        assert fa.values.tobytes() == fb.values.tobytes()


class TestStandardize:
    def _fm(self, cols):
        ds = small([(float(c), 0, "yes") for c in cols], ["a"] * len(cols))
        return encode(ds)

    def test_two_points(self):
        out, _ = standardize(self._fm([1, 3]))
        assert out.values[:, 0].tolist() == [-1.0, 1.0]

    def test_constant_column(self):
        out, _ = standardize(self._fm([5, 5, 5]))
        assert out.values[:, 0].tolist() == [0.0, 0.0, 0.0]

    def test_dimension_mismatch(self):
        stats = StandardizationStats.fit(np.ones((3, 2)))
        with pytest.raises(DimensionMismatch):
            stats.apply(np.ones((3, 5)))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=30),
           st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30))
    def test_fit_and_monotone(self, train, test):
        stats = StandardizationStats.fit(np.array(train)[:, None])
        z = stats.apply(np.array(train)[:, None])[:, 0]
        assert abs(z.mean()) < 1e-9
        assert abs(z.std() - 1.0) < 1e-9 or np.all(np.abs(z) < 1e-9)
        t = np.array(test)
        zt = stats.apply(t[:, None])[:, 0]
        # positive scale: ordering is preserved (ties may appear through rounding)
        order = np.argsort(t, kind="stable")
        assert np.all(np.diff(zt[order]) >= 0)
