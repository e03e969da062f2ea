"""
tests 包初始化
"""
