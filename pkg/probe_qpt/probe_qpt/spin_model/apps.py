from django.apps import AppConfig


class SpinModelConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'spin_model'
    verbose_name = 'Cadeia de Ising'
