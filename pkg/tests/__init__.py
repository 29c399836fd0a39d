"""Tests for Document AI Agent."""
