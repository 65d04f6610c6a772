"""Run the acceptance tests and print only the per-criterion summary."""
import subprocess
import sys


def main():
    proc = subprocess.run([sys.executable, "-m", "pytest", "-q", "tests/test_acceptance.py"],
                          capture_output=True, text=True)
    lines = proc.stdout.splitlines()
    picked = [l for l in lines if l.startswith("[PASS]") or l.startswith("[FAIL]")]
    print("\n".join(picked) if picked else proc.stdout + proc.stderr)
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main())
