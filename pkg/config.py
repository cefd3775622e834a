import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    # Celery broker for the benchmark workers; eager in-process execution when unset
    BROKER_URL = os.environ.get('BROKER_URL')
    RESULT_BACKEND = os.environ.get('RESULT_BACKEND')
    BROKER_CONNECTION_RETRY_ON_STARTUP = True

    # Logging
    LOG_DIR = os.environ.get('REACHAVOID_LOG_DIR', 'logs')
    LOG_LEVEL = os.environ.get('REACHAVOID_LOG_LEVEL', 'INFO')

    # Numerical tolerances
    TIE_TOLERANCE = float(os.environ.get('REACHAVOID_TIE_TOLERANCE', 1e-9))
    CAPTURE_RADIUS_FACTOR = float(os.environ.get('REACHAVOID_CAPTURE_RADIUS_FACTOR', 1e-6))
    LOCUS_PLANE_SWITCH = 1e-9
    EVENT_TOLERANCE = 1e-12

    # Assignment
    PENALTY_FACTOR = 10.0
    BRUTE_FORCE_CAP = int(float(os.environ.get('REACHAVOID_BRUTE_FORCE_CAP', 1e7)))
    OPTIMAL_SET_LIMIT = int(os.environ.get('REACHAVOID_OPTIMAL_SET_LIMIT', 10000))

    # Simulation
    STEP_FACTOR = float(os.environ.get('REACHAVOID_STEP_FACTOR', 1e-3))
    MAX_TIME_FACTOR = 10.0

    # Benchmark scenario generation
    BENCH_BOX = 15.0
    BENCH_PURSUER_SPEEDS = (1.5, 2.5)
    BENCH_EVADER_SPEEDS = (0.8, 2.0)
    BENCH_SIZES = '(3,3),(6,5),(8,6),(10,8),(20,15)'
    BENCH_TRIALS = int(os.environ.get('REACHAVOID_BENCH_TRIALS', 5))

    # Random duel states per winning region in the verification suites
    VERIFY_DUEL_SAMPLES = int(os.environ.get('REACHAVOID_VERIFY_DUEL_SAMPLES', 1000))
