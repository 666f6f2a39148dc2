"""Reminiscence-therapy workflow service: patient memory catalogs, session
lifecycle with reports, clinical assessments, life-story books and
slideshows, and a REST API for therapist clients."""

__version__ = "0.1.0"
