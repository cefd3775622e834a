from reachavoid import celery, current_app
from reachavoid.services import benchmark


@celery.task
def run_bench_trial(n, m, entropy, cap):
    """
    Celery task timing one random benchmark instance.
    Logs the outcome of the operation.
    """
    logger = current_app().logger

    logger.info(f"BENCH_TRIAL_START: n={n} m={m} entropy={entropy}")
    try:
        result = benchmark.run_trial(n, m, entropy, cap)
    except Exception as e:
        logger.error(f"BENCH_TRIAL_CRITICAL_FAIL: n={n} m={m} entropy={entropy}: {e}", exc_info=True)
        raise

    if result["brute_force_seconds"] is None:
        logger.info(f"BENCH_TRIAL_NA: brute force over cap {int(cap)} for n={n} m={m}")
    elif result["payoffs_agree"] is False:
        logger.error(f"BENCH_TRIAL_MISMATCH: LP and brute force disagree for n={n} m={m} entropy={entropy}")
    logger.info(f"BENCH_TRIAL_SUCCESS: n={n} m={m} lp={result['lp_seconds']:.6f}s")
    return result
