"""
Services package.
Business logic and external service integrations.
"""
