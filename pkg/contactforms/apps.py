from django.apps import AppConfig


class ContactformsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'contactforms'
    verbose_name = 'Contact forms'
