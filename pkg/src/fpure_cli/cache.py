"""
Replay cache for computed reports, stored in a SQLite file under the cache directory.
"""
import hashlib
import json
import logging
import os
from datetime import datetime

from sqlalchemy import Column, DateTime, Integer, String, Text, create_engine
from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import declarative_base, sessionmaker

from . import config

# Set up logging
logger = logging.getLogger(__name__)

# Create SQLAlchemy base
Base = declarative_base()


class CachedReport(Base):
    """One serialized report, keyed by the hash of the job that produced it."""
    __tablename__ = 'cached_reports'

    id = Column(Integer, primary_key=True)
    key = Column(String(64), unique=True, nullable=False)
    command = Column(String(32), nullable=False)
    payload = Column(Text, nullable=False)
    checksum = Column(String(64), nullable=False)
    created_at = Column(DateTime, default=datetime.now)

    def __repr__(self):
        return f"<CachedReport(command='{self.command}', key='{self.key[:12]}')>"


def _connection_string(cache_dir):
    if cache_dir is None:
        return "sqlite://"
    return f"sqlite:///{config.get_cache_db_path(cache_dir)}"


def init_cache(cache_dir):
    """Create the cache tables; returns (engine, Session factory). None gives an in-memory cache."""
    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
    engine = create_engine(_connection_string(cache_dir))
    Base.metadata.create_all(engine)
    logger.debug(f"Cache initialized at {cache_dir or 'memory'}")
    return engine, sessionmaker(bind=engine)


def open_cache(cache_dir):
    """(engine, session) for the cache in `cache_dir`, or (None, None) when it cannot be opened."""
    try:
        engine, Session = init_cache(cache_dir)
    except (SQLAlchemyError, OSError) as e:
        logger.warning(f"Report cache unavailable, continuing without it: {e}")
        return None, None
    return engine, Session()


def _checksum(payload):
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def cache_key(job):
    """sha256 of the canonical JSON form of a job description."""
    canonical = json.dumps(job, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_report(session, key):
    """The stored payload for `key`, or None when absent or damaged."""
    try:
        row = session.query(CachedReport).filter_by(key=key).first()
    except SQLAlchemyError as e:
        logger.warning(f"Could not read the report cache, recomputing: {e}")
        return None
    if row is None:
        return None
    if _checksum(row.payload) != row.checksum:
        logger.warning(f"Cached report {key[:12]} failed its checksum, recomputing")
        return None
    logger.debug(f"Cache hit for {row.command} ({key[:12]})")
    return row.payload


def store_report(session, key, command, payload):
    """Insert or replace the report stored under `key`."""
    try:
        row = session.query(CachedReport).filter_by(key=key).first()
        if row is None:
            row = CachedReport(key=key, command=command)
            session.add(row)
        row.payload = payload
        row.checksum = _checksum(payload)
        row.created_at = datetime.now()
        session.commit()
        logger.debug(f"Stored {command} report ({key[:12]})")
        return row
    except SQLAlchemyError as e:
        logger.warning(f"Could not write the report cache: {e}")
        session.rollback()
        return None


def reset_cache(cache_dir):
    """Delete the cache file and recreate empty tables."""
    db_path = config.get_cache_db_path(cache_dir)
    if os.path.exists(db_path):
        logger.info(f"Removing cache file: {db_path}")
        try:
            os.remove(db_path)
        except OSError as e:
            logger.error(f"Error removing cache file: {e}")
            return False

    logger.info("Creating cache tables...")
    engine, _ = init_cache(cache_dir)
    engine.dispose()
    logger.info("Cache reset completed successfully.")
    return True
