import pytest

from edm_rulex.schema import Attribute, AttributeSchema, ROLE_TARGET


@pytest.fixture
def toy_schema():
    # A:{a1,a2,a3}, B:{b1,b2}, target T:{t1,t2}
    return AttributeSchema(
        (
            Attribute("A", ("a1", "a2", "a3")),
            Attribute("B", ("b1", "b2")),
            Attribute("T", ("t1", "t2"), ROLE_TARGET),
        )
    )
