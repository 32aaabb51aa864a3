from django.apps import AppConfig


class ProbeProtocolConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'probe_protocol'
    verbose_name = 'Protocolos da sonda'
