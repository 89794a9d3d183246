from django.apps import AppConfig


class OperatorsConfig(AppConfig):
    name = 'operators'
    verbose_name = 'Dense operator algebra'
