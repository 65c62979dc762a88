import pytest
from fastapi.testclient import TestClient

from dietwise import coco, fixtures_data, nutrition, security
from dietwise.service import AppConfig, create_app

# low scrypt cost keeps the suite fast; production default is ~100 ms/verify
TEST_SCRYPT_N = 2 ** 8


@pytest.fixture(scope="session")
def master_key():
    return security.generate_master_key()


@pytest.fixture()
def seed_catalog():
    catalog = nutrition.MemoryCatalog()
    catalog.load_seed(fixtures_data.seed_catalog_text())
    return catalog


@pytest.fixture(scope="session")
def mini_dataset():
    return coco.parse_coco(fixtures_data.coco_mini_text())


def make_app(master_key, **overrides):
    config = AppConfig(master_key=master_key, insecure_dev=True,
                       scrypt_n=TEST_SCRYPT_N, admin_users=("admin",),
                       **overrides)
    return create_app(config)


@pytest.fixture()
def client(master_key):
    app = make_app(master_key)
    with TestClient(app) as test_client:
        yield test_client


def register_and_login(client, name="alice", secret="correct-horse",
                       conditions=(), restrictions=()):
    response = client.post("/api/v1/auth/register", json={
        "name": name, "secret": secret,
        "conditions": list(conditions), "restrictions": list(restrictions)})
    assert response.status_code == 201, response.text
    response = client.post("/api/v1/auth/login",
                           json={"name": name, "secret": secret})
    assert response.status_code == 200, response.text
    return response.json()["token"]
