from fastapi.testclient import TestClient

from _instances import e1_system, e2_system

from padyn.service import create_app
from padyn.systems import serialize_system


def client() -> TestClient:
    return TestClient(create_app())


def test_version_endpoint():
    r = client().get("/version")
    assert r.status_code == 200
    body = r.json()
    assert body["name"] == "padyn"


def test_validate_endpoint_e1():
    r = client().post("/validate", json={"system": serialize_system(e1_system())})
    assert r.status_code == 200
    body = r.json()
    assert body["verdicts"]["system_valid"]
    assert body["exit_code"] == 0


def test_crossed_product_endpoint_e1():
    r = client().post(
        "/crossed-product", json={"system": serialize_system(e1_system()), "alpha": "alpha"}
    )
    assert r.status_code == 200
    body = r.json()
    assert body["dims"]["crossed_product"] == 9
    assert body["blocks"]["crossed_product"] == [3]
    assert body["verdicts"]["green_morita"]


def test_imprimitivity_endpoint_e2():
    payload = {"system": serialize_system(e2_system()), "alpha": "alpha", "beta": "beta"}
    r = client().post("/imprimitivity", json=payload)
    assert r.status_code == 200
    body = r.json()
    assert body["verdicts"]["morita_main"]
    assert body["blocks"]["A_K"] == [2]
    assert body["exit_code"] == 0


def test_invalid_system_maps_to_422():
    broken = serialize_system(e1_system())
    broken["actions"]["alpha"]["group"] = "missing"
    r = client().post("/validate", json={"system": broken})
    assert r.status_code == 422
    assert any("missing" in w for w in r.json()["detail"])


def test_unknown_action_name_maps_to_422():
    r = client().post(
        "/crossed-product", json={"system": serialize_system(e1_system()), "alpha": "zeta"}
    )
    assert r.status_code == 422


def test_random_instance_endpoint_deterministic():
    c = client()
    r1 = c.post("/random-instance", json={"seed": 5})
    r2 = c.post("/random-instance", json={"seed": 5})
    assert r1.status_code == r2.status_code == 200
    assert r1.json()["detail"]["system"] == r2.json()["detail"]["system"]


def test_stress_endpoint_small_batch():
    r = client().post("/stress", json={"count": 3, "seed": 2, "max_points": 4, "max_group_order": 2, "max_fiber_dim": 1})
    assert r.status_code == 200
    body = r.json()
    assert body["verdicts"]["all_instances"]
    assert len(body["detail"]["instances"]) == 3
