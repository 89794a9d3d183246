import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'ftnm.settings')
django.setup()
