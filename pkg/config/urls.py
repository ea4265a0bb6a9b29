"""
URL configuration for config project.

/admin/ is the Django admin (stored scenario runs); /api/ exposes the
contactforms operations.
"""
from django.contrib import admin
from django.urls import path, include

urlpatterns = [
    path('admin/', admin.site.urls),
    path('api/', include('contactforms.urls')),
]
