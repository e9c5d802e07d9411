import pytest

from mbhf.config import EngineConfig
from mbhf.config.constants import LITERATURE_SERIES_FILE, Tier
from mbhf.errors import ClassMismatch, UnregisteredDefinition
from mbhf.models import Identity
from mbhf.series import default_registry
from mbhf.storage.file_manager import data_path
from mbhf.verify import IdentityChecker, check_transform_equivalence, load_corpus, relative_deviation, run_corpus

GAUSS_CALL = {"name": "2F1", "params": ["a", "b", "c"], "args": ["z"]}
GAUSS_PARAMS = {"a": 0.31, "b": 0.43, "c": 2.11}


def identity(record_id, lhs, rhs, points, tolerance=1e-8):
    return Identity.from_dict({
        "id": record_id,
        "tolerance": tolerance,
        "lhs": lhs,
        "rhs": rhs,
        "samplePoints": [{"params": GAUSS_PARAMS, "point": p} for p in points],
    })


PFAFF_RHS = [{"prefactor": {"powers": [["1-z", "-a"]]},
              "call": {"name": "2F1", "params": ["a", "c-b", "c"], "args": ["z/(z-1)"]}}]


@pytest.fixture
def checker(config):
    return IdentityChecker(config=config)


def test_corpus_loads_both_tiers():
    corpus = load_corpus()
    ids = [i.id for i in corpus]
    assert len(ids) == len(set(ids))
    assert {i.tier for i in corpus} == {Tier.EXPLICIT, Tier.LITERATURE}
    assert "F1-Euler-1" in ids and "HC-1aC" in ids


def test_relative_deviation():
    assert relative_deviation(2, 2.002) == pytest.approx(1e-3)
    assert relative_deviation(0, 0) == 0


def test_named_identity_passes(checker):
    report = checker.check_identity(identity("pfaff", {"kind": "named", "call": GAUSS_CALL}, PFAFF_RHS,
                                             [{"z": -0.4}, {"z": 0.3}, {"z": 0.1 + 0.2j}]))
    assert report.status == "pass"
    assert len(report.points) == 3
    assert report.max_deviation < 1e-8


def test_wrong_prefactor_fails(checker):
    rhs = [{**PFAFF_RHS[0], "prefactor": {"powers": [["1-z", "-b"]]}}]
    report = checker.check_identity(identity("pfaff-wrong", {"kind": "named", "call": GAUSS_CALL}, rhs, [{"z": -0.4}]))
    assert report.status == "fail"
    assert report.points[0].deviation > 1e-3


def test_divergent_point_is_nonconvergent(checker):
    report = checker.check_identity(identity("outside", {"kind": "named", "call": GAUSS_CALL},
                                             [{"call": GAUSS_CALL}], [{"z": 2.0}]))
    assert report.status == "nonconvergent"


def test_path_left_hand_side_is_integrated(checker):
    report = checker.check_identity(identity("euler-path", {"kind": "path", "path": "2F1-1aE"},
                                             [{"call": GAUSS_CALL}], [{"z": 0.3}], tolerance=1e-5))
    assert report.passed


def test_point_errors_are_recorded(checker):
    # the kernel -z of the seed is negative at z = 0.3
    report = checker.check_identity(identity("branch", {"kind": "path", "path": "2F1"},
                                             [{"call": GAUSS_CALL}], [{"z": 0.3}], tolerance=1e-5))
    assert report.status == "nonconvergent"
    assert "NonPositiveKernelBase" in report.points[0].error


def test_explicit_identities_pass(config):
    report = run_corpus(ids=["F2-Euler-1", "F1-Euler-1"], config=config)
    assert [r.identity_id for r in report.identities] == ["F1-Euler-1", "F2-Euler-1"]
    assert report.passed


def test_literature_identity_needs_definitions(checker, config):
    hc = next(i for i in load_corpus() if i.id == "HC-1aC")
    with pytest.raises(UnregisteredDefinition):
        checker.check_identity(hc)
    report = run_corpus([hc], config=config)
    assert report.identities[0].status == "error"
    assert report.identities[0].error_type == "UnregisteredDefinition"


def test_registered_definitions_clear_the_requirement(config, seeds):
    registry = default_registry()
    registry.load_file(str(data_path(LITERATURE_SERIES_FILE)), validate=False, seed_lookup=seeds.get)
    hc = next(i for i in load_corpus() if i.id == "HC-1aC")
    assert IdentityChecker(registry, config=config).missing_definitions(hc) == []


def test_empty_selection():
    report = run_corpus(ids=["no-such-identity"])
    assert report.identities == []
    assert report.passed
    assert report.to_dict()["summary"]["total"] == 0


def test_threaded_corpus_run_is_ordered():
    report = run_corpus(ids=["F2-Euler-1", "F1-Euler-1"], config=EngineConfig(threads=2))
    assert [r.identity_id for r in report.identities] == ["F1-Euler-1", "F2-Euler-1"]


def test_transform_equivalence(config, generic_params):
    report = check_transform_equivalence("F1", "F_1-2aE", generic_params, {"x": -0.2, "y": -0.15 + 0.2j},
                                         config=config)
    assert report.passed
    assert report.points[0].deviation < 1e-4


def test_transform_equivalence_rejects_other_seed(config, generic_params):
    with pytest.raises(ClassMismatch):
        check_transform_equivalence("F2", "F_1-2aE", generic_params, {"x": -0.2, "y": -0.15}, config=config)


# complex points keep the kernels of the D and E forms off the negative axis
TWO_FOLD_POINT = {"x": -0.2 + 0.2j, "y": -0.15 + 0.2j}
H_C_PARAMS = {"a": 0.9, "b": 0.8, "c": 0.7, "d": 2.6}
H_C_POINT = {"x": 0.3j, "y": -0.1 - 0.1j, "z": -0.25j}


@pytest.mark.slow
@pytest.mark.parametrize("seed, path", [
    ("F1", "F_1-2aE1aE"), ("F1", "F_1-2aC1aE"), ("F1", "F_1-12kL"), ("F1", "F_1-12kM"),
    ("F2", "F2-1aD"), ("F3", "F3-2aE"),
])
def test_two_fold_paths_keep_the_value(config, generic_params, seed, path):
    report = check_transform_equivalence(seed, path, generic_params, TWO_FOLD_POINT, config=config)
    assert report.passed, report.points[0].to_dict()


@pytest.mark.slow
@pytest.mark.parametrize("path", ["H_C-1aC", "H_C-1aD", "H_C-1aD3aC", "H_C-1aD3aE", "H_C-23lK", "H_C-23lM"])
def test_h_c_paths_keep_the_value(config, path):
    report = check_transform_equivalence("H_C", path, H_C_PARAMS, H_C_POINT, config=config)
    assert report.passed, report.points[0].to_dict()


def test_unsettled_quadrature_is_not_converged(config, generic_params):
    report = check_transform_equivalence("F1", "F_1-2aE", generic_params, TWO_FOLD_POINT, tolerance=1e-30,
                                         config=config)
    assert not report.points[0].converged
    assert not report.passed


def test_order_three_block_symmetries_pass(config):
    ids = ["HC-B135-symmetry", "HC-B345-symmetry", "HC-B245-symmetry"]
    report = run_corpus(ids=ids, config=config)
    assert [r.identity_id for r in report.identities] == ids
    assert all(len(r.points) >= 2 for r in report.identities)
    assert report.passed


@pytest.mark.slow
def test_explicit_corpus(config):
    report = run_corpus(tiers=[Tier.EXPLICIT], config=config)
    assert len(report.identities) == sum(1 for i in load_corpus() if i.tier is Tier.EXPLICIT)
    assert [r.identity_id for r in report.identities if r.status == "error"] == []
