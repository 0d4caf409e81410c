"""Logging and output helpers shared by the command modules"""
