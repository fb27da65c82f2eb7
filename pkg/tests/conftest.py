import contextlib
import time

import pytest

from semtree import SyntheticTreeSpec, Taxonomy, encode, generate_synthetic

from helpers import TOY_PARENTS

# criterion id -> (description, passed); filled by the acceptance tests
# and rendered as one line each at the end of the run.
ACCEPTANCE: dict[str, tuple[str, bool]] = {}


@pytest.fixture
def criterion():
    @contextlib.contextmanager
    def _criterion(cid, description):
        try:
            yield
        except BaseException:
            ACCEPTANCE[cid] = (description, False)
            raise
        ACCEPTANCE[cid] = (description, True)

    return _criterion


@pytest.fixture
def toy_taxonomy():
    return Taxonomy(parents=TOY_PARENTS)


@pytest.fixture
def toy_encoding(toy_taxonomy):
    return encode(toy_taxonomy)


@pytest.fixture(scope="session")
def full_scale_tree():
    """Session-wide synthetic forest: 117,659 classes over 20 levels."""
    spec = SyntheticTreeSpec(num_classes=117_659, num_levels=20, seed=0)
    t0 = time.perf_counter()
    taxonomy = generate_synthetic(spec)
    t1 = time.perf_counter()
    encoding = encode(taxonomy)
    t2 = time.perf_counter()
    return {
        "taxonomy": taxonomy,
        "encoding": encoding,
        "generate_seconds": t1 - t0,
        "encode_seconds": t2 - t1,
    }


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE):
        description, ok = ACCEPTANCE[cid]
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'}  {cid}  {description}"
        )
