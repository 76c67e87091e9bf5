"""Service Tests Package"""
