#!/usr/bin/env python3
import sys
from pathlib import Path

print("=" * 60)
print("[*] ofdm-lab - Environment Verification")
print("=" * 60)

print(f"\n[OK] Python {sys.version_info.major}.{sys.version_info.minor}.{sys.version_info.micro}")

# packages
packages = ["numpy", "scipy", "yaml", "pydantic"]

print("\n[PACKAGES]")
failed_packages = []
for pkg in packages:
    try:
        mod = __import__(pkg)
        version = getattr(mod, "__version__", "installed")
        print(f"   [OK] {pkg:20s} {version}")
    except ImportError:
        print(f"   [FAIL] {pkg:20s} missing")
        failed_packages.append(pkg)

# shipped experiment configs must pass validation
print("\n[CONFIG FILES]")
failed_configs = []
if not failed_packages:
    from apps.harness.run_experiment import load_and_check

    for path in sorted(Path("configs").glob("*.yaml")):
        _, issues = load_and_check(path)
        errors = [issue for issue in issues if issue.severity == "error"]
        if errors:
            print(f"   [FAIL] {path} ({errors[0].field}: {errors[0].message[:30]})")
            failed_configs.append(path)
        else:
            print(f"   [OK] {path}")

print("\n[MODULES]")
modules = [
    "src.ofdm.signal_core",
    "src.ofdm.hpa",
    "src.ofdm.codes",
    "src.ofdm.metrics",
    "src.ofdm.bounds",
    "apps.harness.run_experiment",
]

failed_modules = []
for mod_name in modules:
    try:
        __import__(mod_name)
        print(f"   [OK] {mod_name}")
    except Exception as e:
        print(f"   [FAIL] {mod_name} ({str(e)[:40]})")
        failed_modules.append(mod_name)

print("\n" + "=" * 60)
if not failed_packages and not failed_modules and not failed_configs:
    print("[SUCCESS] Environment verified! All dependencies OK.")
else:
    print(
        f"[ERROR] {len(failed_packages)} packages, {len(failed_modules)} modules "
        f"and {len(failed_configs)} configs failed."
    )
print("=" * 60)
sys.exit(1 if failed_packages or failed_modules or failed_configs else 0)
