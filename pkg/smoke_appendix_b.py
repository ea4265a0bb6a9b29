#!/usr/bin/env python
"""
Smoke test for the golden reproduction of the 9-dimensional local model
Run: python smoke_appendix_b.py
"""
import os
import sys
import time

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
django.setup()

from contactforms import golden
from contactforms.scenario import run_scenario, shipped

print("=" * 60)
print("GOLDEN REPRODUCTION")
print("=" * 60)

# Test 1: Direct computation
print("\n1. Comparing computed forms with the printed ones...")
started = time.perf_counter()
try:
    reports = golden.reproduce()
except Exception as e:
    print(f"   ✗ Error: {e}")
    import traceback
    traceback.print_exc()
    sys.exit(1)

failed = 0
for report in reports:
    print(f"   {report}")
    if not report.passed:
        failed += 1
        for violation in report.violations[:5]:
            print(f"      {violation}")
print(f"   ({time.perf_counter() - started:.1f}s)")

# Test 2: The shipped scenario
print("\n2. Running the appendix_b scenario...")
result = run_scenario(shipped('appendix_b'))
for report in result.reports:
    print(f"   {report}")
if result.error:
    print(f"   ✗ {result.error}")
if result.exit_code:
    failed += 1

print("\n" + "=" * 60)
if failed:
    print(f"{failed} FAILURES ✗")
    print("=" * 60)
    sys.exit(1)
print("ALL CHECKS PASSED! ✓")
print("=" * 60)
