from django.apps import AppConfig


class SpectraConfig(AppConfig):
    name = 'spectra'
    verbose_name = 'Coupling-strength bounds for physical baths'
