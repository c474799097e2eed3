"""
Tests for DocVault OCR Service
"""
