from django.apps import AppConfig


class BathsConfig(AppConfig):
    name = 'baths'
    verbose_name = 'System-bath models'
