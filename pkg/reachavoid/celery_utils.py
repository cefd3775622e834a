import ssl


def configure_celery(app, celery):
    """
    Configures the shared Celery instance from the app config.
    Uses strictly lowercase configuration keys (Celery 5.x+). Without a
    BROKER_URL the tasks run eagerly in-process, so the benchmark works with
    no Redis available.
    """
    # 1. Fetch settings from the app config (loaded from Config.py/env vars)
    broker_url = app.config.get('BROKER_URL')
    result_backend = app.config.get('RESULT_BACKEND') or broker_url

    # 2. Eager mode when there is no broker
    if not broker_url:
        celery.conf.update(
            broker_url='memory://',
            result_backend='cache+memory://',
            task_always_eager=True,
            task_eager_propagates=True,
        )
    else:
        celery.conf.update(
            broker_url=broker_url,
            result_backend=result_backend,
            broker_connection_retry_on_startup=app.config.get('BROKER_CONNECTION_RETRY_ON_STARTUP', True),
            task_always_eager=False,
            task_serializer='json',
            result_serializer='json',
        )

    # 3. Managed Redis behind 'rediss://' uses self-signed certificates
    if broker_url and broker_url.startswith('rediss://'):
        ssl_conf = {'ssl_cert_reqs': ssl.CERT_NONE}
        celery.conf.update(
            broker_use_ssl=ssl_conf,
            redis_backend_use_ssl=ssl_conf
        )

    # 4. Run every task inside the context of the most recently created app
    celery.reachavoid_app = app

    class ContextTask(celery.Task):
        def __call__(self, *args, **kwargs):
            with celery.reachavoid_app.app_context():
                return self.run(*args, **kwargs)

    celery.Task = ContextTask
    return celery
