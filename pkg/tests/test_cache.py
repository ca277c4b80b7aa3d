import pytest
import os
from unittest.mock import patch, MagicMock
from sqlalchemy import create_engine
from sqlalchemy.exc import OperationalError
from sqlalchemy.orm import sessionmaker, Session as SQLAlchemySession

# Adjust import path based on structure
import sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../src')))

from fpure_cli import config
from fpure_cli.cache import (
    Base,
    CachedReport,
    cache_key,
    init_cache,
    load_report,
    open_cache,
    reset_cache,
    store_report,
)

LOGGER = 'fpure_cli.cache.logger'
OS_REMOVE = 'fpure_cli.cache.os.remove'

SAMPLE_JOB = {"command": "fpt", "p": 3, "variables": ["x", "y"], "generators": ["x*y"], "levels": [1, 2]}
SAMPLE_PAYLOAD = '{\n  "command": "fpt",\n  "status": "ok"\n}'


# --- Fixtures ---

@pytest.fixture(scope="function")
def db_session() -> SQLAlchemySession:
    """Fixture for creating an in-memory SQLite cache session for each test."""
    engine = create_engine("sqlite:///:memory:")
    Base.metadata.create_all(engine)

    TestingSessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)
    session = TestingSessionLocal()

    try:
        yield session
    finally:
        session.close()
        Base.metadata.drop_all(engine)


# --- cache keys ---

def test_cache_key_is_stable_under_key_order():
    reordered = dict(reversed(list(SAMPLE_JOB.items())))
    assert cache_key(SAMPLE_JOB) == cache_key(reordered)
    assert len(cache_key(SAMPLE_JOB)) == 64


def test_cache_key_changes_with_job():
    other = dict(SAMPLE_JOB, levels=[1])
    assert cache_key(SAMPLE_JOB) != cache_key(other)
    assert cache_key(SAMPLE_JOB) != cache_key(dict(SAMPLE_JOB, p=5))


# --- store and load ---

def test_store_and_load(db_session):
    # Arrange
    key = cache_key(SAMPLE_JOB)

    # Act
    row = store_report(db_session, key, "fpt", SAMPLE_PAYLOAD)

    # Assert
    assert row is not None
    assert row.id is not None
    assert row.command == "fpt"
    assert row.created_at is not None
    assert load_report(db_session, key) == SAMPLE_PAYLOAD
    assert "fpt" in repr(row)


def test_load_missing_key(db_session):
    assert load_report(db_session, "0" * 64) is None


def test_store_replaces_existing(db_session):
    key = cache_key(SAMPLE_JOB)
    store_report(db_session, key, "fpt", SAMPLE_PAYLOAD)
    store_report(db_session, key, "fpt", '{"status": "not_fpure"}')

    assert db_session.query(CachedReport).count() == 1
    assert load_report(db_session, key) == '{"status": "not_fpure"}'


@patch(LOGGER)
def test_damaged_payload_is_ignored(mock_logger, db_session):
    # Arrange
    key = cache_key(SAMPLE_JOB)
    row = store_report(db_session, key, "fpt", SAMPLE_PAYLOAD)
    row.payload = SAMPLE_PAYLOAD.replace("ok", "no")
    db_session.commit()

    # Act
    result = load_report(db_session, key)

    # Assert
    assert result is None
    mock_logger.warning.assert_called_once()
    assert "checksum" in mock_logger.warning.call_args[0][0]


@patch(LOGGER)
def test_load_survives_database_errors(mock_logger):
    session = MagicMock()
    session.query.side_effect = OperationalError("SELECT", {}, Exception("disk I/O error"))

    assert load_report(session, "abc") is None
    mock_logger.warning.assert_called_once()


@patch(LOGGER)
def test_store_rolls_back_on_database_errors(mock_logger):
    session = MagicMock()
    session.query.return_value.filter_by.return_value.first.return_value = None
    session.commit.side_effect = OperationalError("INSERT", {}, Exception("database is locked"))

    assert store_report(session, "abc", "fpt", SAMPLE_PAYLOAD) is None
    session.rollback.assert_called_once()
    mock_logger.warning.assert_called_once()


# --- cache files ---

def test_init_cache_creates_directory(tmp_path):
    cache_dir = tmp_path / "nested" / "cache"
    engine, Session = init_cache(str(cache_dir))
    try:
        session = Session()
        store_report(session, "k", "theta", SAMPLE_PAYLOAD)
        session.close()
        assert os.path.exists(config.get_cache_db_path(str(cache_dir)))
    finally:
        engine.dispose()


@patch(LOGGER)
def test_open_cache_on_damaged_file(mock_logger, tmp_path):
    path = config.get_cache_db_path(str(tmp_path))
    with open(path, "wb") as fh:
        fh.write(b"this is not an sqlite database" * 64)

    engine, session = open_cache(str(tmp_path))

    assert (engine, session) == (None, None)
    mock_logger.warning.assert_called_once()
    assert "continuing without it" in mock_logger.warning.call_args[0][0]


def test_open_cache_gives_a_session(tmp_path):
    engine, session = open_cache(str(tmp_path))
    try:
        assert load_report(session, "k") is None
    finally:
        session.close()
        engine.dispose()


def test_init_cache_in_memory():
    engine, Session = init_cache(None)
    session = Session()
    assert load_report(session, "k") is None
    session.close()
    engine.dispose()


@patch(LOGGER)
def test_reset_cache_removes_reports(mock_logger, tmp_path):
    # Arrange
    cache_dir = str(tmp_path)
    engine, Session = init_cache(cache_dir)
    session = Session()
    store_report(session, "k", "fpt", SAMPLE_PAYLOAD)
    session.close()
    engine.dispose()
    db_path = config.get_cache_db_path(cache_dir)

    # Act
    success = reset_cache(cache_dir)

    # Assert
    assert success is True
    mock_logger.info.assert_any_call(f"Removing cache file: {db_path}")
    mock_logger.info.assert_any_call("Creating cache tables...")
    mock_logger.info.assert_any_call("Cache reset completed successfully.")
    engine, Session = init_cache(cache_dir)
    session = Session()
    assert load_report(session, "k") is None
    session.close()
    engine.dispose()


@patch(LOGGER)
def test_reset_cache_without_existing_file(mock_logger, tmp_path):
    cache_dir = str(tmp_path / "fresh")

    assert reset_cache(cache_dir) is True
    assert os.path.exists(config.get_cache_db_path(cache_dir))
    for log_call in mock_logger.info.call_args_list:
        assert not log_call[0][0].startswith("Removing cache file")


@patch(OS_REMOVE, side_effect=OSError("Permission denied"))
@patch(LOGGER)
def test_reset_cache_remove_fails(mock_logger, mock_remove, tmp_path):
    # Arrange
    cache_dir = str(tmp_path)
    engine, _ = init_cache(cache_dir)
    engine.dispose()

    # Act
    success = reset_cache(cache_dir)

    # Assert
    assert success is False
    mock_remove.assert_called_once_with(config.get_cache_db_path(cache_dir))
    mock_logger.error.assert_called_once_with("Error removing cache file: Permission denied")
