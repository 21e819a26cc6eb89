"""
Configuration settings for the TL1 matrix completion toolkit
"""

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()


class Config:
    """Application configuration"""

    # ADMM solver defaults
    DEFAULT_RHO = float(os.getenv("TL1MC_RHO", "0.1"))
    DEFAULT_TAU = float(os.getenv("TL1MC_TAU", "1.618"))
    DEFAULT_TOL = float(os.getenv("TL1MC_TOL", "1e-5"))
    DEFAULT_MAX_ITERS = int(os.getenv("TL1MC_MAX_ITERS", "500"))

    # Rank counting: singular values above this fraction of sigma_1
    RANK_THRESHOLD = float(os.getenv("TL1MC_RANK_THRESHOLD", "1e-2"))

    # Entrywise bound used for synthetic data, as a multiple of ||A0||_inf
    ZETA_INFLATION = 1.2

    # Rating data (both datasets use a 1-5 scale)
    RATING_ZETA = 5.0
    RATING_CLIP = (1.0, 5.0)
    VALIDATION_FRACTION = 0.5

    # Benchmarks
    DEFAULT_TRIALS = int(os.getenv("TL1MC_TRIALS", "10"))
    MAX_WORKERS = int(os.getenv("TL1MC_WORKERS", "1"))

    # Outputs
    OUTPUT_DIR = Path(os.getenv("TL1MC_OUTPUT_DIR", "results"))

    # Logging
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    LOG_FILE = os.getenv("LOG_FILE", "")

    @classmethod
    def create_directories(cls):
        """Create necessary directories"""
        directories = [cls.OUTPUT_DIR]
        if cls.LOG_FILE:
            directories.append(Path(cls.LOG_FILE).parent)

        for directory in directories:
            directory.mkdir(parents=True, exist_ok=True)

    @classmethod
    def validate_config(cls):
        """Validate critical configuration"""
        errors = []

        if cls.DEFAULT_RHO <= 0:
            errors.append("TL1MC_RHO must be positive")

        if not 0 < cls.DEFAULT_TAU < (1 + 5 ** 0.5) / 2:
            errors.append("TL1MC_TAU must lie in (0, (1+sqrt(5))/2)")

        if cls.DEFAULT_TOL <= 0:
            errors.append("TL1MC_TOL must be positive")

        if cls.DEFAULT_MAX_ITERS < 1:
            errors.append("TL1MC_MAX_ITERS must be at least 1")

        if not 0 < cls.RANK_THRESHOLD < 1:
            errors.append("TL1MC_RANK_THRESHOLD must lie in (0, 1)")

        if cls.MAX_WORKERS < 1:
            errors.append("TL1MC_WORKERS must be at least 1")

        return errors


# Environment-specific configurations
class DevelopmentConfig(Config):
    """Development environment configuration"""
    DEBUG = True
    LOG_LEVEL = os.getenv("LOG_LEVEL", "DEBUG")


class ProductionConfig(Config):
    """Production environment configuration"""
    DEBUG = False
    LOG_LEVEL = "INFO"


class TestingConfig(Config):
    """Testing environment configuration"""
    TESTING = True
    DEFAULT_MAX_ITERS = 200
    DEFAULT_TRIALS = 2
    LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING")


# Configuration factory
def get_config():
    """Get configuration based on environment"""
    env = os.getenv("ENVIRONMENT", "development").lower()

    if env == "production":
        return ProductionConfig()
    elif env == "testing":
        return TestingConfig()
    else:
        return DevelopmentConfig()


# Active configuration, resolved once from ENVIRONMENT
settings = get_config()
