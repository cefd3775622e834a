from reachavoid import create_app

reachavoid_app = create_app()

from reachavoid import celery  # noqa: E402
from reachavoid.tasks import bench_tasks  # noqa: E402,F401  registers run_bench_trial
