"""Configure Django before pytest collects the apps' Django test modules."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'probe_qpt.settings')
django.setup()
