from django.apps import AppConfig


class ConcatenationConfig(AppConfig):
    name = 'concatenation'
    verbose_name = 'Concatenated circuit layouts'
